"""Small exact linear programs over ``Fraction`` (two-phase simplex, Bland's rule).

Solves ``max c·x`` subject to ``A_ub x <= b_ub``, ``A_eq x = b_eq``, ``x >= 0``.
Sized for the few-dozen-variable certificate problems in this package; the
point is exactness, not speed.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

F = Fraction


@dataclass(frozen=True)
class LPResult:
    status: str  # optimal | infeasible | unbounded
    x: tuple = ()
    value: Fraction | None = None


def _pivot(T, basis, row, col):
    pr = T[row]
    p = pr[col]
    if p != 1:
        T[row] = pr = [v / p for v in pr]
    for i, r in enumerate(T):
        if i != row and r[col] != 0:
            f = r[col]
            T[i] = [a - f * b for a, b in zip(r, pr)]
    basis[row] = col


def _simplex(T, basis, ncols):
    """Maximise the objective stored in the last row (as ``-c``); Bland's rule."""
    obj = T[-1]
    while True:
        obj = T[-1]
        col = next((j for j in range(ncols) if obj[j] < 0), None)
        if col is None:
            return "optimal"
        best = None
        for i in range(len(T) - 1):
            a = T[i][col]
            if a > 0:
                ratio = T[i][-1] / a
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:
            return "unbounded"
        _pivot(T, basis, best[1], col)


def linprog_max(c, A_ub=(), b_ub=(), A_eq=(), b_eq=()) -> LPResult:
    n = len(c)
    rows = [([F(v) for v in a], F(b), True) for a, b in zip(A_ub, b_ub)]
    rows += [([F(v) for v in a], F(b), False) for a, b in zip(A_eq, b_eq)]
    m = len(rows)
    n_slack = sum(1 for _, _, ub in rows if ub)
    ncols = n + n_slack + m  # originals, slacks, artificials
    T = []
    s = 0
    for i, (a, b, ub) in enumerate(rows):
        row = a + [F(0)] * (n_slack + m) + [b]
        if ub:
            row[n + s] = F(1)
            s += 1
        if b < 0:
            row = [-v for v in row]
        row[n + n_slack + i] = F(1)
        T.append(row)
    basis = [n + n_slack + i for i in range(m)]
    # phase 1: maximise -(sum of artificials)
    obj = [F(0)] * (ncols + 1)
    for j in range(n + n_slack, ncols):
        obj[j] = F(1)
    for r in T:
        obj = [o - v for o, v in zip(obj, r)]
    T.append(obj)
    _simplex(T, basis, ncols)
    if T[-1][-1] != 0:
        return LPResult("infeasible")
    # drive remaining artificials out of the basis
    for i in range(m):
        if basis[i] >= n + n_slack:
            col = next((j for j in range(n + n_slack) if T[i][j] != 0), None)
            if col is not None:
                _pivot(T, basis, i, col)
    keep = [i for i in range(m) if basis[i] < n + n_slack]
    width = n + n_slack
    T2 = [T[i][:width] + [T[i][-1]] for i in keep]
    basis2 = [basis[i] for i in keep]
    obj = [-F(v) for v in c] + [F(0)] * (n_slack + 1)
    for i, b in enumerate(basis2):
        if obj[b] != 0:
            f = obj[b]
            obj = [o - f * v for o, v in zip(obj, T2[i])]
    T2.append(obj)
    status = _simplex(T2, basis2, width)
    if status == "unbounded":
        return LPResult("unbounded")
    x = [F(0)] * width
    for i, b in enumerate(basis2):
        x[b] = T2[i][-1]
    xs = tuple(x[:n])
    return LPResult("optimal", xs, sum((F(ci) * xi for ci, xi in zip(c, xs)), F(0)))
