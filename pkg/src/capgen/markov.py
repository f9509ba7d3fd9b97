"""Markov-chain sampling of linear extensions and the rank-probability table.

The chain is the classical adjacent-transposition walk: pick a position
uniformly, swap the two neighbouring subsets iff they are incomparable under
inclusion, otherwise stay put.  Its stationary distribution is uniform over
the linear extensions.  Long runs of the chain estimate P(Rk(S) = i), the
probability of subset S sitting at rank i in a uniformly random extension;
the table is built once off-line and reused by the improved node generator.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .core import card_lex_masks, check_n, free_subsets


def initial_extension(n: int) -> list[int]:
    """The cardinal-lexicographic order, always a valid linear extension."""
    return card_lex_masks(n)


def default_burn_in(n: int) -> int:
    m = (1 << n) - 2
    return 50 * m * m


def default_thinning(n: int) -> int:
    m = (1 << n) - 2
    return m * m


def chain_step(ext: list[int], rng: np.random.Generator) -> list[int]:
    """One lazy adjacent-transposition step; always returns a valid extension."""
    out = list(ext)
    j = int(rng.integers(0, len(out) - 1))
    a, b = out[j], out[j + 1]
    if a & b != a and a & b != b:  # incomparable: neither contains the other
        out[j], out[j + 1] = b, a
    return out


@dataclass(frozen=True)
class RankProbabilityTable:
    """prob[mask][i-1] = estimated P(Rk(S) = i), ranks i in 1..2^n-2."""

    n: int
    samples: int
    burn_in: int
    thinning: int
    prob: np.ndarray  # shape (2^n, 2^n - 2); rows for 0 and N are zero

    def row(self, mask: int) -> np.ndarray:
        return self.prob[mask]

    def to_json(self, path) -> None:
        data = {
            "n": self.n,
            "samples": self.samples,
            "burn_in": self.burn_in,
            "thinning": self.thinning,
            "prob": {str(m): [float(p) for p in self.prob[m]] for m in free_subsets(self.n)},
        }
        with open(path, "w") as fh:
            json.dump(data, fh)

    @classmethod
    def from_json(cls, path) -> "RankProbabilityTable":
        with open(path) as fh:
            data = json.load(fh)
        n = int(data["n"])
        m = (1 << n) - 2
        prob = np.zeros((1 << n, m))
        for key, row in data["prob"].items():
            prob[int(key)] = row
        return cls(
            n=n,
            samples=int(data["samples"]),
            burn_in=int(data["burn_in"]),
            thinning=int(data["thinning"]),
            prob=prob,
        )


def _run_chain(n: int, burn_in: int, thinning: int, samples: int,
               rng: np.random.Generator, visit):
    """Drive the chain, calling visit(state) on each retained extension."""
    state = initial_extension(n)
    m = len(state)
    # flat comparability lookup: comparable[a * 2^n + b]
    size = 1 << n
    comparable = np.zeros(size * size, dtype=bool)
    for a in range(size):
        for b in range(size):
            comparable[a * size + b] = (a & b == a) or (a & b == b)
    comp = comparable.tolist()

    taken = 0
    steps_done = 0
    block = 1 << 16
    next_retain = burn_in + thinning
    while taken < samples:
        js = rng.integers(0, m - 1, size=block)
        for j in js.tolist():
            a = state[j]
            b = state[j + 1]
            if not comp[a * size + b]:
                state[j] = b
                state[j + 1] = a
            steps_done += 1
            if steps_done == next_retain:
                visit(state)
                taken += 1
                next_retain += thinning
                if taken == samples:
                    break
    return state


def sample_extensions(n: int, samples: int, seed=None, burn_in: int | None = None,
                      thinning: int | None = None,
                      rng: np.random.Generator | None = None) -> np.ndarray:
    """Retained chain states as an array (samples, 2^n - 2) of masks."""
    check_n(n)
    if rng is None:
        rng = np.random.default_rng(seed)
    if burn_in is None:
        burn_in = default_burn_in(n)
    if thinning is None:
        thinning = default_thinning(n)
    m = (1 << n) - 2
    out = np.empty((samples, m), dtype=np.uint8)
    idx = 0

    def visit(state):
        nonlocal idx
        out[idx] = state
        idx += 1

    _run_chain(n, burn_in, thinning, samples, rng, visit)
    return out


def estimate_rank_table(n: int, samples: int, seed=None, burn_in: int | None = None,
                        thinning: int | None = None) -> RankProbabilityTable:
    """Rank-probability table from relative frequencies over retained extensions."""
    check_n(n)
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    if burn_in is None:
        burn_in = default_burn_in(n)
    if thinning is None:
        thinning = default_thinning(n)
    m = (1 << n) - 2
    counts = np.zeros((1 << n, m), dtype=np.int64)

    def visit(state):
        for i, mask in enumerate(state):
            counts[mask, i] += 1

    _run_chain(n, burn_in, thinning, samples, rng, visit)
    prob = counts / samples
    return RankProbabilityTable(n=n, samples=samples, burn_in=burn_in,
                                thinning=thinning, prob=prob)


def exact_rank_table(n: int, extensions: np.ndarray) -> RankProbabilityTable:
    """Exact rank frequencies counted over a full enumeration."""
    m = (1 << n) - 2
    counts = np.zeros((1 << n, m), dtype=np.int64)
    for i in range(m):
        np.add.at(counts[:, i], extensions[:, i].astype(np.intp), 1)
    prob = counts / len(extensions)
    return RankProbabilityTable(n=n, samples=len(extensions), burn_in=0,
                                thinning=0, prob=prob)


def markov_generate(n: int, k: int, seed=None, burn_in: int | None = None,
                    thinning: int | None = None) -> np.ndarray:
    """One retained chain state per capacity, then sorted-uniform assignment."""
    check_n(n)
    out = np.zeros((k, 1 << n))
    out[:, -1] = 1.0
    if k == 0:
        return out
    rng = np.random.default_rng(seed)
    exts = sample_extensions(n, k, burn_in=burn_in, thinning=thinning, rng=rng)
    m = (1 << n) - 2
    u = np.sort(rng.random((k, m)), axis=1)
    out[np.arange(k)[:, None], exts.astype(np.intp)] = u
    return out
