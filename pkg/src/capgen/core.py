"""Ground types for subsets, capacities and the Choquet integral.

Subsets of the criterion set N = {1, ..., n} are encoded as n-bit masks:
bit i set means criterion i+1 belongs to the subset.  A capacity is a dense
vector of 2^n coefficients indexed by mask.  n is capped at 8: the number of
linear extensions of the Boolean lattice is unknown beyond that.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

MAX_N = 8


def check_n(n: int) -> None:
    if not (2 <= n <= MAX_N):
        raise ValueError(f"ground-set size must satisfy 2 <= n <= {MAX_N}, got {n}")


def popcount(mask: int) -> int:
    return int(mask).bit_count()


def full_mask(n: int) -> int:
    return (1 << n) - 1


def free_subsets(n: int) -> list[int]:
    """Masks of the free poset 2^N minus the empty set and N, in raw mask order."""
    return [m for m in range(1, full_mask(n))]


def members(mask: int, n: int) -> list[int]:
    """1-based criterion indices of a mask, ascending."""
    return [i + 1 for i in range(n) if mask >> i & 1]


def subset_label(mask: int, n: int) -> str:
    if mask == 0:
        return "{}"
    if mask == full_mask(n):
        return "N"
    return "{" + ",".join(str(i) for i in members(mask, n)) + "}"


def parse_subset_label(label: str, n: int) -> int:
    if label == "{}":
        return 0
    if label == "N":
        return full_mask(n)
    body = label.strip("{}")
    mask = 0
    for tok in body.split(","):
        i = int(tok)
        if not 1 <= i <= n:
            raise ValueError(f"criterion index {i} out of range for n={n}")
        mask |= 1 << (i - 1)
    return mask


def card_lex_masks(n: int) -> list[int]:
    """Free subsets in the cardinal-lexicographic order.

    Subsets are sorted by cardinality, ties broken lexicographically on the
    sorted element lists, e.g. for n=4: 1, 2, 3, 4, 12, 13, 14, 23, 24, 34,
    123, 124, 134, 234.
    """
    return sorted(free_subsets(n), key=lambda m: (popcount(m), members(m, n)))


@dataclass(frozen=True)
class CardLexOrder:
    """Position Ord(S) in {1, ..., 2^n - 2} of every free subset."""

    n: int
    rank: dict[int, int] = field(repr=False)
    inverse: tuple[int, ...] = field(repr=False)

    @classmethod
    def build(cls, n: int) -> "CardLexOrder":
        check_n(n)
        masks = card_lex_masks(n)
        return cls(n=n, rank={m: i + 1 for i, m in enumerate(masks)}, inverse=tuple(masks))

    def ord(self, mask: int) -> int:
        return self.rank[mask]

    def mask_at(self, position: int) -> int:
        return self.inverse[position - 1]


def is_monotone(values: Sequence[float] | np.ndarray, n: int | None = None) -> bool:
    """True iff the coefficient array is a normalized monotone capacity.

    Checks mu(empty)=0, mu(N)=1 and every covering pair (S, S u {i}); by
    transitivity this is equivalent to the full pairwise check.  Comparisons
    are exact.
    """
    v = np.asarray(values, dtype=float)
    if n is None:
        n = int(v.size).bit_length() - 1
    if v.size != 1 << n:
        raise ValueError(f"expected {1 << n} coefficients, got {v.size}")
    if v[0] != 0.0 or v[-1] != 1.0:
        return False
    for s in range(1 << n):
        for i in range(n):
            if not s >> i & 1:
                if v[s] > v[s | 1 << i]:
                    return False
    return True


@dataclass(frozen=True)
class Capacity:
    """A monotone set function with mu(empty)=0 and mu(N)=1."""

    n: int
    values: np.ndarray

    def __post_init__(self):
        check_n(self.n)
        if self.values.size != 1 << self.n:
            raise ValueError("coefficient array length does not match 2^n")

    @classmethod
    def from_values(cls, n: int, values: Sequence[float]) -> "Capacity":
        v = np.array(values, dtype=float)
        if not is_monotone(v, n):
            raise ValueError("coefficients violate normalization or monotonicity")
        return cls(n=n, values=v)

    @classmethod
    def additive_uniform(cls, n: int) -> "Capacity":
        """mu(S) = |S| / n."""
        v = np.array([popcount(s) / n for s in range(1 << n)])
        return cls(n=n, values=v)

    def __call__(self, mask: int) -> float:
        return float(self.values[mask])

    def dual(self) -> "Capacity":
        """nu(S) = 1 - mu(N \\ S); valid whenever mu is."""
        fm = full_mask(self.n)
        v = np.array([1.0 - self.values[fm ^ s] for s in range(1 << self.n)])
        return Capacity(n=self.n, values=v)


@dataclass(frozen=True)
class Alternative:
    """A score vector in [0,1]^n."""

    scores: tuple[float, ...]

    def __post_init__(self):
        if any(not 0.0 <= s <= 1.0 for s in self.scores):
            raise ValueError("scores must lie in [0,1]")

    @classmethod
    def binary(cls, mask: int, n: int) -> "Alternative":
        return cls(tuple(1.0 if mask >> i & 1 else 0.0 for i in range(n)))


def choquet(mu: Capacity, x: Alternative | Sequence[float]) -> float:
    """Choquet integral of x against mu.

    Sums the sorted increments of x weighted by the capacity of the upper
    level sets.  Ties in the sorting permutation are broken by ascending
    criterion index; the value is tie-invariant.
    """
    scores = x.scores if isinstance(x, Alternative) else tuple(x)
    n = mu.n
    if len(scores) != n:
        raise ValueError(f"alternative has {len(scores)} scores, capacity has n={n}")
    order = sorted(range(n), key=lambda i: (scores[i], i))
    total = 0.0
    prev = 0.0
    remaining = full_mask(n)
    for i in order:
        total += (scores[i] - prev) * mu.values[remaining]
        prev = scores[i]
        remaining &= ~(1 << i)
    return total


def choquet_linear_form(x: Alternative | Sequence[float], n: int) -> tuple[dict[int, float], float]:
    """C_mu(x) as a linear function of the free coefficients of mu.

    Returns (coefficients keyed by free mask, constant term).  The constant
    collects the contribution of mu(N) = 1; mu(empty) never contributes.
    """
    scores = x.scores if isinstance(x, Alternative) else tuple(x)
    order = sorted(range(n), key=lambda i: (scores[i], i))
    coeffs: dict[int, float] = {}
    const = 0.0
    prev = 0.0
    remaining = full_mask(n)
    for i in order:
        w = scores[i] - prev
        if remaining == full_mask(n):
            const += w
        elif remaining != 0:
            coeffs[remaining] = coeffs.get(remaining, 0.0) + w
        prev = scores[i]
        remaining &= ~(1 << i)
    return coeffs, const


def unconditional_rank_bounds(n: int, mask: int) -> tuple[int, int]:
    """Smallest and largest possible rank of S over all linear extensions.

    Ranks run over 1..2^n-2 for the free subsets (empty set at 0, N at
    2^n-1).  The bounds count the 2^|S| - 1 nonempty subsets of S forced
    before it (S included) and the 2^(n-|S|) - 2 proper supersets of S
    below N forced after it.
    """
    check_n(n)
    if mask == 0 or mask == full_mask(n):
        raise ValueError("rank bounds are defined for free subsets only")
    s = popcount(mask)
    return (1 << s) - 1, (1 << n) - (1 << (n - s))


# --- capacity CSV I/O ---------------------------------------------------------

def csv_header(n: int) -> list[str]:
    masks = [0] + card_lex_masks(n) + [full_mask(n)]
    return [subset_label(m, n) for m in masks]


def write_capacities_csv(path, n: int, values: np.ndarray) -> None:
    """One capacity per row, columns in cardinal-lex order, 17 significant digits.

    Subset labels contain commas, so the header cells are quoted by the csv
    writer.
    """
    values = np.atleast_2d(np.asarray(values, dtype=float))
    if values.shape[1] != 1 << n:
        raise ValueError("column count does not match 2^n")
    cols = [0] + card_lex_masks(n) + [full_mask(n)]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(csv_header(n))
        for row in values:
            writer.writerow([format(row[m], ".17g") for m in cols])


def read_capacities_csv(path) -> tuple[int, np.ndarray]:
    """Returns (n, array of shape (count, 2^n) indexed by mask)."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        width = len(header)
        n = (width).bit_length() - 1
        if 1 << n != width:
            raise ValueError(f"header has {width} columns, expected a power of two")
        masks = [parse_subset_label(lbl, n) for lbl in header]
        rows = []
        for cells in reader:
            if not cells:
                continue
            out = np.zeros(width)
            for m, v in zip(masks, cells):
                out[m] = float(v)
            rows.append(out)
    return n, np.array(rows) if rows else np.empty((0, width))
