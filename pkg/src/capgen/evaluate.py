"""Histograms, Kullback-Leibler divergence and timing benchmarks.

Divergences are computed between per-coefficient histograms of generated
capacities and those of the exact generator; a small additive pseudo-mass
keeps them finite when bins are empty (it perturbs small values, which is
why the reproduction checks are ratio bands rather than exact matches).
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass

import numpy as np
from scipy.stats import beta as beta_dist

from .core import card_lex_masks, subset_label

DEFAULT_BINS = 20


@dataclass(frozen=True)
class CoefficientHistogram:
    subset: int
    counts: np.ndarray  # length B, over equal-width bins on [0, 1]
    total: int

    @property
    def bins(self) -> int:
        return self.counts.size

    @classmethod
    def from_values(cls, subset: int, values: np.ndarray, bins: int = DEFAULT_BINS) -> "CoefficientHistogram":
        counts, _ = np.histogram(values, bins=bins, range=(0.0, 1.0))
        return cls(subset=subset, counts=counts, total=int(counts.sum()))

    @classmethod
    def from_masses(cls, subset: int, masses: np.ndarray, total: int) -> "CoefficientHistogram":
        """Analytic reference distribution expressed on the same binning."""
        masses = np.asarray(masses, dtype=float)
        return cls(subset=subset, counts=masses * total, total=total)

    def smoothed_masses(self) -> np.ndarray:
        eps = 1.0 / (10.0 * self.total)
        m = self.counts / self.total + eps
        return m / m.sum()


def kl_divergence(p: CoefficientHistogram, q: CoefficientHistogram) -> float:
    """D_KL(p || q) over smoothed bin masses, natural log."""
    if p.bins != q.bins:
        raise ValueError("histograms use different binnings")
    pm = p.smoothed_masses()
    qm = q.smoothed_masses()
    return float(np.sum(pm * np.log(pm / qm)))


def coefficient_histograms(capacities: np.ndarray, n: int, bins: int = DEFAULT_BINS) -> dict[int, CoefficientHistogram]:
    caps = np.atleast_2d(capacities)
    return {
        S: CoefficientHistogram.from_values(S, caps[:, S], bins)
        for S in card_lex_masks(n)
    }


@dataclass(frozen=True)
class KLReport:
    n: int
    per_subset: dict[int, float]

    @property
    def total(self) -> float:
        return float(sum(self.per_subset.values()))

    def to_dict(self) -> dict:
        out = {subset_label(S, self.n): v for S, v in self.per_subset.items()}
        out["sum"] = self.total
        return out


def kl_report(capacities: np.ndarray, reference: np.ndarray, n: int,
              bins: int = DEFAULT_BINS) -> KLReport:
    """Per-coefficient divergence of a generator stream against the reference."""
    p_h = coefficient_histograms(capacities, n, bins)
    q_h = coefficient_histograms(reference, n, bins)
    return KLReport(n=n, per_subset={S: kl_divergence(p_h[S], q_h[S]) for S in p_h})


def kl_table(streams: dict[str, np.ndarray], reference: np.ndarray, n: int,
             bins: int = DEFAULT_BINS) -> dict[str, KLReport]:
    return {name: kl_report(caps, reference, n, bins) for name, caps in streams.items()}


def beta_mixture_bin_masses(n: int, rank_probs: np.ndarray, bins: int = DEFAULT_BINS) -> np.ndarray:
    """Bin masses of the Beta-mixture law of a coefficient.

    rank_probs[i-1] = P(Rk(S) = i); the value at rank i among the 2^n - 2
    sorted uniforms follows Beta(i, 2^n - 1 - i).
    """
    edges = np.linspace(0.0, 1.0, bins + 1)
    m = (1 << n) - 2
    masses = np.zeros(bins)
    for i in range(1, m + 1):
        w = rank_probs[i - 1]
        if w == 0.0:
            continue
        cdf = beta_dist.cdf(edges, i, (1 << n) - 1 - i)
        masses += w * np.diff(cdf)
    return masses


def bench(fn, *, runs: int = 3) -> dict[str, float]:
    """Median wall-clock seconds over `runs` timed runs, one warm-up excluded."""
    fn()  # warm-up
    times = []
    for _ in range(runs):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return {"median_seconds": float(np.median(times)), "runs": runs}


def write_kl_report_json(path, reports: dict[str, KLReport]) -> None:
    with open(path, "w") as fh:
        json.dump({name: rep.to_dict() for name, rep in reports.items()}, fh, indent=2)
