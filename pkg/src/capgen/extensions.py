"""Enumeration of the linear extensions of (2^N \\ {0, N}, subseteq).

The enumeration is a DFS over the elements that are currently selectable:
an element becomes selectable once all of its lower covers have been placed,
so each emitted sequence lists subsets in an order compatible with
inclusion.  Optional precedence pairs (dominated before dominant) restrict
the output to the extensions where mu(dominated) <= mu(dominant) holds by
construction; they simply augment the precedence relation.

Enumeration is capped at n <= 4 (1 680 384 extensions); beyond that the
count explodes and the Markov-chain sampler must be used instead.
"""

from __future__ import annotations

import json
from functools import lru_cache

import numpy as np

from .core import check_n, free_subsets, full_mask, popcount

ENUM_MAX_N = 4


def upper_covers(mask: int, n: int) -> list[int]:
    """Covers of mask inside the free poset (supersets with one extra element)."""
    fm = full_mask(n)
    return [mask | 1 << i for i in range(n) if not mask >> i & 1 and mask | 1 << i != fm]


def lower_covers(mask: int, n: int) -> list[int]:
    return [mask & ~(1 << i) for i in range(n) if mask >> i & 1 and mask & ~(1 << i) != 0]


def maximal_elements(present: set[int] | list[int]) -> set[int]:
    """Elements of a sub-poset of (2^N, subseteq) with no present strict superset."""
    elems = set(present)
    if not elems:
        raise ValueError("empty poset has no maximal elements")
    out = set()
    for s in elems:
        if not any(t != s and t & s == s for t in elems):
            out.add(s)
    return out


def _precedence_lists(n: int, extra_edges: list[tuple[int, int]] | None):
    """Successor lists and in-degrees over the free subsets.

    Edges run from smaller to larger under inclusion (cover edges) plus any
    extra (before, after) pairs.
    """
    free = free_subsets(n)
    succ: dict[int, list[int]] = {m: upper_covers(m, n) for m in free}
    if extra_edges:
        for before, after in extra_edges:
            if before not in succ or after not in succ:
                raise ValueError("precedence pair outside the free poset")
            if after != before and after & before == after:
                # dominant strictly below dominated contradicts monotonicity
                raise ValueError(f"pair ({before}, {after}) contradicts inclusion")
            succ[before] = succ[before] + [after]
    indeg = {m: 0 for m in free}
    for m, outs in succ.items():
        for t in outs:
            indeg[t] += 1
    return free, succ, indeg


def count_linear_extensions(n: int, extra_edges: list[tuple[int, int]] | None = None) -> int:
    """Count by dynamic programming over down-sets (independent of the DFS).

    f(placed) sums f(placed + next) over all currently selectable elements;
    the state space is the lattice of down-sets of the precedence order.
    """
    check_n(n)
    free, succ, indeg = _precedence_lists(n, extra_edges)
    index = {m: i for i, m in enumerate(free)}
    succ_idx = [[index[t] for t in succ[m]] for m in free]
    m_total = len(free)
    all_placed = (1 << m_total) - 1

    preds = [[] for _ in range(m_total)]
    for j in range(m_total):
        for i in succ_idx[j]:
            preds[i].append(j)

    @lru_cache(maxsize=None)
    def g(placed: int) -> int:
        if placed == all_placed:
            return 1
        total = 0
        for i in range(m_total):
            if placed >> i & 1:
                continue
            if all(placed >> j & 1 for j in preds[i]):
                total += g(placed | 1 << i)
        return total

    result = g(0)
    g.cache_clear()
    return result


def enumerate_linear_extensions(
    n: int, extra_edges: list[tuple[int, int]] | None = None
) -> np.ndarray:
    """All linear extensions as an array of shape (count, 2^n - 2) of masks.

    Rows are emitted in DFS order; each row is a permutation of the free
    subsets in which every subset precedes its proper supersets (and every
    'before' precedes its 'after' for the extra precedence pairs).
    """
    check_n(n)
    if n > ENUM_MAX_N:
        raise ValueError(
            f"enumeration is limited to n <= {ENUM_MAX_N}; the extension count "
            f"beyond that is astronomically large (use the Markov-chain sampler)"
        )
    free, succ, indeg = _precedence_lists(n, extra_edges)
    m_total = len(free)
    count = count_linear_extensions(n, extra_edges)
    out = np.empty((count, m_total), dtype=np.uint8)
    if count == 0:
        return out

    seq = [0] * m_total
    pending = dict(indeg)
    avail = [m for m in free if indeg[m] == 0]
    row = 0

    def rec(depth: int, avail: list[int]) -> None:
        nonlocal row
        if depth == m_total:
            out[row] = seq
            row += 1
            return
        for k, s in enumerate(avail):
            seq[depth] = s
            added = []
            for t in succ[s]:
                pending[t] -= 1
                if pending[t] == 0:
                    added.append(t)
            rec(depth + 1, avail[:k] + avail[k + 1 :] + added)
            for t in succ[s]:
                pending[t] += 1

    rec(0, avail)
    assert row == count
    return out


def is_linear_extension(seq, n: int) -> bool:
    """Permutation of all free subsets where S appears before every strict superset."""
    free = free_subsets(n)
    if sorted(seq) != sorted(free):
        return False
    pos = {s: i for i, s in enumerate(seq)}
    for s in free:
        for t in upper_covers(s, n):
            if pos[s] > pos[t]:
                return False
    return True


def ecg_sample(extensions: np.ndarray, n: int, k: int, rng: np.random.Generator) -> np.ndarray:
    """Exact generator: sorted uniforms assigned along uniformly chosen extensions.

    Returns an array (k, 2^n) of capacities indexed by mask.
    """
    if len(extensions) == 0:
        raise ValueError("empty extension set")
    m = (1 << n) - 2
    out = np.zeros((k, 1 << n))
    out[:, -1] = 1.0
    if k == 0:
        return out
    chosen = extensions[rng.integers(0, len(extensions), size=k)].astype(np.intp)
    u = np.sort(rng.random((k, m)), axis=1)
    out[np.arange(k)[:, None], chosen] = u
    return out


def write_extensions_jsonl(path, extensions: np.ndarray) -> None:
    with open(path, "w") as fh:
        for row in extensions:
            fh.write(json.dumps([int(v) for v in row]) + "\n")


def position_frequencies(extensions: np.ndarray, n: int) -> np.ndarray:
    """freq[mask][i-1] = fraction of extensions with mask at rank i (ranks 1..m)."""
    m = (1 << n) - 2
    counts = np.zeros((1 << n, m), dtype=np.int64)
    for i in range(m):
        col = extensions[:, i]
        np.add.at(counts[:, i], col, 1)
    return counts / len(extensions)
