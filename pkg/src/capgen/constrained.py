"""Constraint-aware generators and the final acceptance filter.

The exact generator handles pairwise mu(dominated) <= mu(dominant)
constraints by enumerating only the extensions where the dominated subset
precedes its dominant; the improved node generator handles the full relaxed
constraint system by tightening the value bounds and widening the sieve
membership with the constraint-forced order relation.
"""

from __future__ import annotations

import numpy as np

from .core import Capacity, CardLexOrder, check_n, free_subsets
from .extensions import ecg_sample, enumerate_linear_extensions
from .markov import RankProbabilityTable
from .node_gen import (
    GenerationState,
    _draw_value,
    sieve_max_rank,
    sieve_min_rank,
    value_bounds,
)
from .preferences import ConstraintSystem, PreferenceSystem, satisfies_SR

RESTART_CAP = 1000


class EmptyFeasibleSet(Exception):
    """No extension or no capacity satisfies the requested constraints."""


def revised_enumerate(n: int, pairs: list[tuple[int, int]]) -> np.ndarray:
    """Linear extensions where each dominated subset precedes its dominant.

    pairs are (dominated, dominant) masks; the result equals the full
    enumeration filtered on position(dominated) < position(dominant).
    """
    return enumerate_linear_extensions(n, extra_edges=list(pairs))


def revised_ecg_sample(extensions: np.ndarray, n: int, k: int,
                       rng: np.random.Generator) -> np.ndarray:
    if len(extensions) == 0:
        raise EmptyFeasibleSet("constraint pairs admit no linear extension")
    return ecg_sample(extensions, n, k, rng)


def constraint_order_relation(sc: ConstraintSystem, order: CardLexOrder, S: int, Sp: int) -> float:
    """R(S, S'): nonpositive iff the constraints force mu(S) <= mu(S')."""
    if order.ord(S) < order.ord(Sp):
        return sc.pair_bounds(S, Sp)[1]
    return -sc.pair_bounds(Sp, S)[0]


def revised_value_bounds(state: GenerationState, S: int, sc: ConstraintSystem,
                         order: CardLexOrder) -> tuple[float, float]:
    """Monotonicity bounds tightened by the constraint system.

    lo > hi signals a dead-end partial assignment; callers restart the draw.
    """
    lo, hi = value_bounds(state, S)
    vlo, vhi = sc.single_bounds(S)
    lo = max(lo, vlo)
    hi = min(hi, vhi)
    ord_S = order.ord(S)
    for mask, a in zip(state.masks, state.values):
        if order.ord(mask) > ord_S:
            plo, phi = sc.pair_bounds(S, mask)  # bounds on mu(S) - mu(mask)
            lo = max(lo, plo + a)
            hi = min(hi, phi + a)
        else:
            plo, phi = sc.pair_bounds(mask, S)  # bounds on mu(mask) - mu(S)
            lo = max(lo, a - phi)
            hi = min(hi, a - plo)
    return lo, hi


def revised_sieve_bounds(state: GenerationState, S: int, sc: ConstraintSystem,
                         order: CardLexOrder) -> tuple[int, int]:
    """Sieve rank bounds with constraint-forced predecessors and successors."""

    def forced_before(mask: int) -> bool:
        return constraint_order_relation(sc, order, mask, S) <= 0.0

    def forced_after(mask: int) -> bool:
        return constraint_order_relation(sc, order, S, mask) <= 0.0

    return (
        sieve_min_rank(state, S, forced_before=forced_before),
        sieve_max_rank(state, S, forced_after=forced_after),
    )


def revised_irng_generate(n: int, k: int, table: RankProbabilityTable,
                          sc: ConstraintSystem, seed=None) -> np.ndarray:
    """Improved node generator with constraint-tightened bounds.

    A dead-end state (empty value interval) restarts the whole capacity,
    keeping the draws of one capacity independent; after RESTART_CAP
    restarts the tightest interval seen is reported in the error.
    """
    check_n(n)
    if table.n != n:
        raise ValueError(f"table is for n={table.n}, requested n={n}")
    if sc.n != n:
        raise ValueError(f"constraint system is for n={sc.n}, requested n={n}")
    rng = np.random.default_rng(seed)
    order = CardLexOrder.build(n)
    free = free_subsets(n)
    rows = {S: table.prob[S].tolist() for S in free}
    out = np.zeros((k, 1 << n))
    out[:, -1] = 1.0
    for row in range(k):
        for attempt in range(RESTART_CAP):
            perm = rng.permutation(len(free))
            state = GenerationState(n)
            dead_end = None
            for idx in perm:
                S = free[idx]
                lo, hi = revised_value_bounds(state, S, sc, order)
                if lo > hi:
                    dead_end = (S, lo, hi)
                    break
                lo_rk, hi_rk = revised_sieve_bounds(state, S, sc, order)
                v = _draw_value(S, lo, hi, lo_rk, hi_rk, rows[S], n, rng)
                state.assign(S, v)
            if dead_end is None:
                for mask, v in zip(state.masks, state.values):
                    out[row, mask] = v
                break
        else:
            S, lo, hi = dead_end
            raise EmptyFeasibleSet(
                f"restart cap exceeded; tightest interval seen for subset "
                f"{S:#b}: [{lo:.6g}, {hi:.6g}]"
            )
    return out


def filter_SR(capacities: np.ndarray, prefs: PreferenceSystem) -> tuple[np.ndarray, float]:
    """Keep the capacities compatible with the preference system.

    Returns (accepted rows, acceptance rate); the rate is the Monte Carlo
    proxy for the volume ratio of the preference polytope.
    """
    n = prefs.n
    keep = []
    for row in np.atleast_2d(capacities):
        if satisfies_SR(Capacity(n=n, values=row), prefs):
            keep.append(row)
    total = len(np.atleast_2d(capacities))
    rate = len(keep) / total if total else 1.0
    accepted = np.array(keep) if keep else np.empty((0, capacities.shape[-1]))
    return accepted, rate
