"""Figure rendering for the report path.

Renders the per-coefficient histograms of a capacity stream (optionally
overlaid with a reference stream) as one panel per free subset, written to
an image file next to the delimited report output.
"""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .core import card_lex_masks, subset_label
from .evaluate import DEFAULT_BINS


def plot_coefficient_histograms(path, capacities: np.ndarray, n: int,
                                reference: np.ndarray | None = None,
                                bins: int = DEFAULT_BINS,
                                label: str = "generator",
                                reference_label: str = "exact") -> None:
    masks = card_lex_masks(n)
    ncols = min(4, len(masks))
    nrows = math.ceil(len(masks) / ncols)
    fig, axes = plt.subplots(nrows, ncols, figsize=(3.2 * ncols, 2.4 * nrows),
                             sharex=True, sharey=True, squeeze=False)
    caps = np.atleast_2d(capacities)
    ref = None if reference is None else np.atleast_2d(reference)
    for ax, S in zip(axes.flat, masks):
        ax.hist(caps[:, S], bins=bins, range=(0, 1), density=True,
                alpha=0.6, label=label)
        if ref is not None:
            ax.hist(ref[:, S], bins=bins, range=(0, 1), density=True,
                    histtype="step", color="k", label=reference_label)
        ax.set_title(subset_label(S, n), fontsize=9)
    for ax in axes.flat[len(masks):]:
        ax.set_visible(False)
    axes.flat[0].legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
