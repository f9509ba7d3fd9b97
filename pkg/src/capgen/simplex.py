"""Small dense two-phase simplex solver.

Sized for the constraint-derivation LPs of this package (at most 2^n - 2
variables with n <= 8, a handful of preference rows plus the monotonicity
covering pairs), so a plain tableau with Bland's anti-cycling rule is
enough.  Variables are nonnegative; upper bounds are passed as ordinary
rows by the callers.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

TOL = 1e-9

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass
class LinearProgram:
    """min or max of c.x subject to rows (a, rel, b) with rel in {<=, >=, =}, x >= 0."""

    c: np.ndarray
    maximize: bool = False
    rows: list = field(default_factory=list)

    def add(self, coeffs, rel: str, rhs: float) -> None:
        if rel not in ("<=", ">=", "="):
            raise ValueError(f"unknown relation {rel!r}")
        a = np.asarray(coeffs, dtype=float)
        if a.size != np.asarray(self.c).size:
            raise ValueError("constraint dimension mismatch")
        self.rows.append((a, rel, float(rhs)))


@dataclass(frozen=True)
class SimplexResult:
    status: str
    value: float | None = None
    x: np.ndarray | None = None
    dual_gap: float | None = None


def _pivot(T: np.ndarray, basis: list[int], r: int, c: int) -> None:
    T[r] /= T[r, c]
    for i in range(T.shape[0]):
        if i != r and T[i, c] != 0.0:
            T[i] -= T[i, c] * T[r]
    basis[r] = c


def _phase(T: np.ndarray, basis: list[int], ncols: int) -> str:
    """Run simplex iterations on tableau T (last row = objective, last col = rhs)."""
    mrows = T.shape[0] - 1
    while True:
        obj = T[-1, :ncols]
        # Bland: smallest index with negative reduced cost
        enter = -1
        for j in range(ncols):
            if obj[j] < -TOL:
                enter = j
                break
        if enter < 0:
            return OPTIMAL
        ratios = []
        for i in range(mrows):
            if T[i, enter] > TOL:
                ratios.append((T[i, -1] / T[i, enter], basis[i], i))
        if not ratios:
            return UNBOUNDED
        # min ratio, ties broken on smallest basis index (Bland)
        _, _, leave = min(ratios)
        _pivot(T, basis, leave, enter)


def solve(lp: LinearProgram) -> SimplexResult:
    """Two-phase dense simplex.  Distinguishes optimal / infeasible / unbounded."""
    c = np.asarray(lp.c, dtype=float)
    nvar = c.size
    if lp.maximize:
        c = -c

    rows = []
    for a, rel, b in lp.rows:
        a = np.asarray(a, dtype=float)
        if b < 0:  # keep rhs nonnegative so artificials start feasible
            a, b = -a, -b
            rel = {"<=": ">=", ">=": "<=", "=": "="}[rel]
        rows.append((a, rel, b))

    m = len(rows)
    nslack = sum(1 for _, rel, _ in rows if rel != "=")
    nart = sum(1 for _, rel, _ in rows if rel != "<=")
    ncols = nvar + nslack + nart
    A = np.zeros((m, ncols))
    b = np.zeros(m)
    basis: list[int] = [0] * m
    s = nvar
    t = nvar + nslack
    art_cols = []
    for i, (a, rel, rhs) in enumerate(rows):
        A[i, :nvar] = a
        b[i] = rhs
        if rel == "<=":
            A[i, s] = 1.0
            basis[i] = s
            s += 1
        elif rel == ">=":
            A[i, s] = -1.0
            s += 1
            A[i, t] = 1.0
            basis[i] = t
            art_cols.append(t)
            t += 1
        else:
            A[i, t] = 1.0
            basis[i] = t
            art_cols.append(t)
            t += 1

    T = np.zeros((m + 1, ncols + 1))
    T[:m, :ncols] = A
    T[:m, -1] = b

    # phase 1: minimize the artificial sum
    if art_cols:
        for j in art_cols:
            T[-1, j] = 1.0
        for i in range(m):
            if basis[i] in art_cols:
                T[-1] -= T[i]
        status = _phase(T, basis, ncols)
        if status != OPTIMAL or T[-1, -1] < -1e-7:
            return SimplexResult(status=INFEASIBLE)
        # drive remaining artificials out of the basis where possible
        for i in range(m):
            if basis[i] in art_cols:
                for j in range(nvar + nslack):
                    if abs(T[i, j]) > TOL:
                        _pivot(T, basis, i, j)
                        break
        # forbid artificials from re-entering
        for j in art_cols:
            T[:, j] = 0.0

    # phase 2: original objective
    T[-1, :] = 0.0
    T[-1, :nvar] = c
    for i in range(m):
        if T[-1, basis[i]] != 0.0:
            T[-1] -= T[-1, basis[i]] * T[i]
    status = _phase(T, basis, ncols)
    if status == UNBOUNDED:
        return SimplexResult(status=UNBOUNDED)

    x = np.zeros(nvar)
    for i in range(m):
        if basis[i] < nvar:
            x[basis[i]] = T[i, -1]
    value = float(c @ x)

    # duality check: multipliers from the basis certify the optimum
    c_ext = np.zeros(ncols)
    c_ext[:nvar] = c
    B = A[:, basis]
    y, *_ = np.linalg.lstsq(B.T, c_ext[basis], rcond=None)
    gap = abs(value - float(y @ b))

    if lp.maximize:
        value = -value
    return SimplexResult(status=OPTIMAL, value=value, x=x, dual_gap=gap)
