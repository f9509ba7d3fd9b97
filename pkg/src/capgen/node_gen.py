"""Random-node capacity generators.

The classical generator visits the free subsets in random order and draws
each coefficient uniformly between the tightest monotonicity bounds implied
by the values already placed.  The improved generator replaces the uniform
law with a mixture of Beta order statistics: the coefficient at rank k among
m sorted uniforms follows Beta(k, m-k+1), so a rank is drawn first (from a
pre-estimated rank-probability table truncated to the ranks still feasible)
and the value is then a Beta draw of that rank, rejected until it falls
inside the monotonicity interval.

Feasible-rank intervals are computed by inclusion-exclusion (the Poincare
sieve) over the already-generated subsets that are necessarily ranked before
or after the current one.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .core import check_n, free_subsets, full_mask, popcount, unconditional_rank_bounds
from .markov import RankProbabilityTable

RETRY_CAP = 1000


@dataclass
class GenerationState:
    """Subsets already assigned, in assignment order."""

    n: int
    masks: list[int] = field(default_factory=list)
    values: list[float] = field(default_factory=list)

    def assign(self, mask: int, value: float) -> None:
        if mask in self.masks:
            raise ValueError(f"subset {mask} assigned twice")
        self.masks.append(mask)
        self.values.append(value)

    @property
    def p(self) -> int:
        return len(self.masks)


def value_bounds(state: GenerationState, S: int) -> tuple[float, float]:
    """Monotonicity interval [Min_p mu(S), Max_p mu(S)] given the state."""
    lo = 0.0
    hi = 1.0
    for mask, a in zip(state.masks, state.values):
        if mask & S == mask:  # mask subset of S
            if a > lo:
                lo = a
        if mask & S == S:  # mask superset of S
            if a < hi:
                hi = a
    return lo, hi


def _dedupe_maximal(masks: list[int]) -> list[int]:
    """Keep only inclusion-maximal members; the union of down-sets is unchanged."""
    out = []
    for m in masks:
        if not any(o != m and m & o == m for o in masks):
            if m not in out:
                out.append(m)
    return out


def _dedupe_minimal(masks: list[int]) -> list[int]:
    out = []
    for m in masks:
        if not any(o != m and m & o == o for o in masks):
            if m not in out:
                out.append(m)
    return out


def _sieve_union_downsets(members: list[int]) -> int:
    """|union of (2^M \\ {0}) over members| by inclusion-exclusion."""
    members = _dedupe_maximal(members)
    q = len(members)
    total = 0
    for k in range(1, q + 1):
        sign = 1 if k % 2 == 1 else -1
        for combo in combinations(members, k):
            inter = combo[0]
            for m in combo[1:]:
                inter &= m
            total += sign * ((1 << popcount(inter)) - 1)
    return total


def _sieve_union_upsets(members: list[int], n: int) -> int:
    """|union of proper up-sets (supersets != N) over members| by inclusion-exclusion."""
    members = _dedupe_minimal(members)
    q = len(members)
    total = 0
    for k in range(1, q + 1):
        sign = 1 if k % 2 == 1 else -1
        for combo in combinations(members, k):
            union = 0
            for m in combo:
                union |= m
            total += sign * ((1 << (n - popcount(union))) - 1)
    return total


def _before_members(state: GenerationState, S: int, forced_before=None) -> list[int]:
    """Assigned subsets necessarily ranked before S (plus S itself).

    A subset qualifies directly when it is included in S (or when the extra
    predicate forced_before says the constraints force it before S); any
    assigned subset whose value does not exceed the value of a qualifying one
    is dragged in with it.
    """
    amax = None
    for mask, a in zip(state.masks, state.values):
        direct = mask & S == mask
        if not direct and forced_before is not None:
            direct = forced_before(mask)
        if direct and (amax is None or a > amax):
            amax = a
    members = [S]
    if amax is not None:
        members += [m for m, a in zip(state.masks, state.values) if a <= amax]
    return members


def _after_members(state: GenerationState, S: int, forced_after=None) -> list[int]:
    amin = None
    for mask, a in zip(state.masks, state.values):
        direct = mask & S == S
        if not direct and forced_after is not None:
            direct = forced_after(mask)
        if direct and (amin is None or a < amin):
            amin = a
    members = [S]
    if amin is not None:
        members += [m for m, a in zip(state.masks, state.values) if a >= amin]
    return members


def sieve_min_rank(state: GenerationState, S: int, forced_before=None) -> int:
    """Smallest feasible rank of S given the state (conditional lower bound)."""
    return _sieve_union_downsets(_before_members(state, S, forced_before))


def sieve_max_rank(state: GenerationState, S: int, forced_after=None) -> int:
    """Largest feasible rank of S given the state (conditional upper bound)."""
    n = state.n
    return (1 << n) - 1 - _sieve_union_upsets(_after_members(state, S, forced_after), n)


def sample_beta(alpha: int, beta: int, rng: np.random.Generator) -> float:
    """Exact Beta(alpha, beta) draw for integer parameters >= 1."""
    if alpha < 1 or beta < 1:
        raise ValueError("Beta parameters must be >= 1")
    return float(rng.beta(alpha, beta))


def sample_beta_order_statistic(alpha: int, beta: int, rng: np.random.Generator) -> float:
    """Alternative scheme: the alpha-th smallest of alpha+beta-1 uniforms."""
    if alpha < 1 or beta < 1:
        raise ValueError("Beta parameters must be >= 1")
    u = rng.random(alpha + beta - 1)
    return float(np.partition(u, alpha - 1)[alpha - 1])


def rng_generate(n: int, k: int, seed=None) -> np.ndarray:
    """Classical random-node generator: uniform draws inside the bounds."""
    check_n(n)
    rng = np.random.default_rng(seed)
    free = free_subsets(n)
    out = np.zeros((k, 1 << n))
    out[:, -1] = 1.0
    for row in range(k):
        order = rng.permutation(len(free))
        state = GenerationState(n)
        for idx in order:
            S = free[idx]
            lo, hi = value_bounds(state, S)
            v = lo + (hi - lo) * rng.random()
            state.assign(S, v)
            out[row, S] = v
    return out


def _draw_value(S: int, lo: float, hi: float, lo_rk: int, hi_rk: int,
                row_prob, n: int, rng: np.random.Generator) -> float:
    """One IRNG coefficient draw: rank from the truncated table, then Beta.

    Falls back to Uniform(lo, hi) when the truncated rank support carries no
    mass or after RETRY_CAP rejected Beta draws.
    """
    pr_min = sum(row_prob[: lo_rk - 1])
    pr_max = sum(row_prob[hi_rk:])
    inner = 1.0 - pr_min - pr_max
    if inner <= 1e-12:
        return lo + (hi - lo) * rng.random()
    two_n_minus_1 = (1 << n) - 1
    for _ in range(RETRY_CAP):
        r = pr_min + inner * rng.random()
        rank = lo_rk
        acc = pr_min + row_prob[lo_rk - 1]
        while r > acc and rank < hi_rk:
            rank += 1
            acc += row_prob[rank - 1]
        b = float(rng.beta(rank, two_n_minus_1 - rank))
        if lo < b < hi:
            return b
    return lo + (hi - lo) * rng.random()


def irng_generate(n: int, k: int, table: RankProbabilityTable, seed=None) -> np.ndarray:
    """Improved random-node generator driven by the rank-probability table."""
    check_n(n)
    if table.n != n:
        raise ValueError(f"table is for n={table.n}, requested n={n}")
    rng = np.random.default_rng(seed)
    free = free_subsets(n)
    rows = {S: table.prob[S].tolist() for S in free}
    out = np.zeros((k, 1 << n))
    out[:, -1] = 1.0
    for row in range(k):
        order = rng.permutation(len(free))
        state = GenerationState(n)
        for idx in order:
            S = free[idx]
            lo, hi = value_bounds(state, S)
            lo_rk = sieve_min_rank(state, S)
            hi_rk = sieve_max_rank(state, S)
            v = _draw_value(S, lo, hi, lo_rk, hi_rk, rows[S], n, rng)
            state.assign(S, v)
            out[row, S] = v
    return out
