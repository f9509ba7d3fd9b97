"""Preference systems and their two-variable constraint relaxation.

A preference system holds strict preferences (a preferred to b by at least
epsilon in Choquet value) and indifferences over a list of alternatives.
Its exact polytope is awkward to sample, so it is relaxed to a system of
per-coefficient bounds (constraint 2) and pairwise-difference bounds
(constraint 1) obtained by minimizing and maximizing mu(S) and
mu(S) - mu(S') over the exact polytope with the simplex solver.  Every
capacity satisfying the preferences satisfies the relaxation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .core import (
    Alternative,
    Capacity,
    card_lex_masks,
    check_n,
    choquet,
    choquet_linear_form,
    free_subsets,
    full_mask,
)
from .simplex import INFEASIBLE, UNBOUNDED, LinearProgram, solve

INDIFF_TOL = 1e-9


class InfeasiblePreferences(Exception):
    """The preference system admits no compatible capacity."""


@dataclass(frozen=True)
class PreferenceSystem:
    n: int
    alternatives: tuple[Alternative, ...]
    strict: tuple[tuple[int, int], ...] = ()      # (a, b): a preferred to b
    indifferent: tuple[tuple[int, int], ...] = ()
    epsilon: float = 0.001

    def __post_init__(self):
        check_n(self.n)
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        m = len(self.alternatives)
        for a, b in list(self.strict) + list(self.indifferent):
            if not (0 <= a < m and 0 <= b < m):
                raise ValueError("alternative index out of range")
        if set(self.strict) & set(self.indifferent):
            raise ValueError("a pair cannot be both strict and indifferent")

    @classmethod
    def from_dict(cls, data: dict) -> "PreferenceSystem":
        return cls(
            n=int(data["n"]),
            alternatives=tuple(Alternative(tuple(map(float, row))) for row in data["alternatives"]),
            strict=tuple((int(a), int(b)) for a, b in data.get("strict", [])),
            indifferent=tuple((int(a), int(b)) for a, b in data.get("indifferent", [])),
            epsilon=float(data.get("epsilon", 0.001)),
        )

    @classmethod
    def from_json(cls, path) -> "PreferenceSystem":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def to_json(self, path) -> None:
        data = {
            "n": self.n,
            "alternatives": [list(a.scores) for a in self.alternatives],
            "strict": [list(p) for p in self.strict],
            "indifferent": [list(p) for p in self.indifferent],
            "epsilon": self.epsilon,
        }
        with open(path, "w") as fh:
            json.dump(data, fh)


def satisfies_SR(mu: Capacity, prefs: PreferenceSystem) -> bool:
    """All strict inequalities (with epsilon) and indifferences hold under mu."""
    if mu.n != prefs.n:
        raise ValueError("dimension mismatch")
    vals = [choquet(mu, a) for a in prefs.alternatives]
    for a, b in prefs.strict:
        if not vals[a] >= vals[b] + prefs.epsilon:
            return False
    for a, b in prefs.indifferent:
        if abs(vals[a] - vals[b]) > INDIFF_TOL:
            return False
    return True


@dataclass(frozen=True)
class ConstraintSystem:
    """Bounds on single coefficients and on ordered pairwise differences.

    Pair keys (S, S') follow the convention Ord(S) < Ord(S') in the
    cardinal-lexicographic order; the stored interval bounds mu(S) - mu(S').
    Absent entries mean the vacuous bounds (0, 1) resp. (-1, 1).
    """

    n: int
    single: dict[int, tuple[float, float]] = field(default_factory=dict)
    pair: dict[tuple[int, int], tuple[float, float]] = field(default_factory=dict)

    def single_bounds(self, S: int) -> tuple[float, float]:
        return self.single.get(S, (0.0, 1.0))

    def pair_bounds(self, S: int, Sp: int) -> tuple[float, float]:
        return self.pair.get((S, Sp), (-1.0, 1.0))

    def dominance_pairs(self) -> list[tuple[int, int]]:
        """(dominated, dominant) pairs implied by difference bounds at alpha=0."""
        out = []
        for (a, b), (lo, hi) in self.pair.items():
            if hi <= 0.0 and not (b & a == a):  # mu(a) <= mu(b), skip inclusion-implied
                out.append((a, b))
            if lo >= 0.0 and not (a & b == b):  # mu(b) <= mu(a)
                out.append((b, a))
        return out

    def to_json(self, path) -> None:
        data = {
            "n": self.n,
            "single": {str(k): [lo, hi] for k, (lo, hi) in self.single.items()},
            "pair": {f"{a},{b}": [lo, hi] for (a, b), (lo, hi) in self.pair.items()},
        }
        with open(path, "w") as fh:
            json.dump(data, fh)

    @classmethod
    def from_json(cls, path) -> "ConstraintSystem":
        with open(path) as fh:
            data = json.load(fh)
        single = {int(k): (float(v[0]), float(v[1])) for k, v in data.get("single", {}).items()}
        pair = {}
        for key, v in data.get("pair", {}).items():
            a, b = key.split(",")
            pair[(int(a), int(b))] = (float(v[0]), float(v[1]))
        return cls(n=int(data["n"]), single=single, pair=pair)


def satisfies_SC(mu: Capacity, sc: ConstraintSystem, tol: float = 1e-9) -> bool:
    for S, (lo, hi) in sc.single.items():
        v = mu.values[S]
        if v < lo - tol or v > hi + tol:
            return False
    for (a, b), (lo, hi) in sc.pair.items():
        d = mu.values[a] - mu.values[b]
        if d < lo - tol or d > hi + tol:
            return False
    return True


def _base_lp_rows(prefs: PreferenceSystem, var_index: dict[int, int]):
    """Preference and monotonicity rows over the free-coefficient variables."""
    n = prefs.n
    nvar = len(var_index)
    rows = []
    forms = [choquet_linear_form(a, n) for a in prefs.alternatives]

    def diff_row(a: int, b: int):
        coeffs_a, const_a = forms[a]
        coeffs_b, const_b = forms[b]
        row = np.zeros(nvar)
        for mask, w in coeffs_a.items():
            row[var_index[mask]] += w
        for mask, w in coeffs_b.items():
            row[var_index[mask]] -= w
        return row, const_a - const_b

    for a, b in prefs.strict:
        row, const = diff_row(a, b)
        rows.append((row, ">=", prefs.epsilon - const))
    for a, b in prefs.indifferent:
        row, const = diff_row(a, b)
        rows.append((row, "=", -const))

    # monotonicity over covering pairs; empty set and N give the box rows
    fm = full_mask(n)
    for S in free_subsets(n):
        for i in range(n):
            if S >> i & 1:
                continue
            T = S | 1 << i
            row = np.zeros(nvar)
            if T == fm:
                row[var_index[S]] = 1.0
                rows.append((row, "<=", 1.0))
            else:
                row[var_index[T]] = 1.0
                row[var_index[S]] = -1.0
                rows.append((row, ">=", 0.0))
    return rows


def _optimize(rows, objective, maximize, nvar):
    lp = LinearProgram(c=np.asarray(objective, dtype=float), maximize=maximize)
    for row, rel, rhs in rows:
        lp.add(row, rel, rhs)
    res = solve(lp)
    if res.status == INFEASIBLE:
        raise InfeasiblePreferences("preference system admits no capacity")
    if res.status == UNBOUNDED:  # impossible over the bounded capacity polytope
        raise RuntimeError("LP unbounded over the capacity polytope")
    return res.value


def derive_SC(prefs: PreferenceSystem) -> ConstraintSystem:
    """Relax the preference system by LP: bounds for every mu(S) and mu(S)-mu(S').

    Solves 2*m + 2*C(m,2) linear programs over the exact polytope (m = 2^n-2
    free coefficients); indifferences enter every LP as equality rows rather
    than by symbolic variable elimination, which leaves the relaxed polytope
    unchanged.
    """
    n = prefs.n
    masks = card_lex_masks(n)
    var_index = {m: i for i, m in enumerate(masks)}
    nvar = len(masks)
    rows = _base_lp_rows(prefs, var_index)

    single: dict[int, tuple[float, float]] = {}
    for S in masks:
        obj = np.zeros(nvar)
        obj[var_index[S]] = 1.0
        lo = _optimize(rows, obj, False, nvar)
        hi = _optimize(rows, obj, True, nvar)
        single[S] = (lo, hi)

    pair: dict[tuple[int, int], tuple[float, float]] = {}
    for i, S in enumerate(masks):
        for Sp in masks[i + 1 :]:
            obj = np.zeros(nvar)
            obj[var_index[S]] = 1.0
            obj[var_index[Sp]] = -1.0
            lo = _optimize(rows, obj, False, nvar)
            hi = _optimize(rows, obj, True, nvar)
            pair[(S, Sp)] = (lo, hi)

    return ConstraintSystem(n=n, single=single, pair=pair)
