"""Two-phase primal simplex with variable bounds, on a dense tableau.

The solver normalizes every model to `min c'x, Ax = b, 0 <= x <= u`:
finite lower bounds are shifted out, upper-bounded-only variables are
negated, free variables are split, and slack columns turn inequalities
into equalities.  Phase 1 starts from an all-artificial basis; the
artificial block doubles as an explicit basis inverse, which is what the
dual values are read from.  Pricing is steepest-edge-flavored with a
Bland fallback after a run of degenerate steps, and nonbasic variables
may sit at either bound (bound flips do not pivot).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .programs import EQ, GE, LE, ModelError, OptimizationModel

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"
ITERATION_LIMIT = "iteration_limit"

_STALL_LIMIT = 60


@dataclass
class SimplexResult:
    status: str
    x: dict[str, float] | None
    objective: float | None
    duals: dict[str, float] | None
    iterations: int


def _standard_form(model: OptimizationModel):
    """Rewrite into equality form with all lower bounds at zero."""
    inf = math.inf
    transforms: dict[str, tuple[str, int, float]] = {}
    upper: list[float] = []
    cost: list[float] = []
    const = 0.0
    for v in model.variables:
        c = model.objective.get(v.name, 0.0)
        col = len(upper)
        if v.lower > -inf:
            transforms[v.name] = ("shift", col, v.lower)
            upper.append(v.upper - v.lower)
            cost.append(c)
            const += c * v.lower
        elif v.upper < inf:
            transforms[v.name] = ("negate", col, v.upper)
            upper.append(inf)
            cost.append(-c)
            const += c * v.upper
        else:
            transforms[v.name] = ("split", col, 0.0)
            upper.extend((inf, inf))
            cost.extend((c, -c))
    nstruct = len(upper)
    m = len(model.constraints)
    nslack = sum(1 for row in model.constraints if row.sense != EQ)
    A = np.zeros((m, nstruct + nslack))
    b = np.zeros(m)
    flips = np.ones(m)
    scol = nstruct
    for i, row in enumerate(model.constraints):
        rhs = row.rhs
        for name, coef in row.coeffs:
            kind, col, off = transforms[name]
            if kind == "shift":
                A[i, col] += coef
                rhs -= coef * off
            elif kind == "negate":
                A[i, col] -= coef
                rhs -= coef * off
            else:
                A[i, col] += coef
                A[i, col + 1] -= coef
        if row.sense == LE:
            A[i, scol] = 1.0
            scol += 1
        elif row.sense == GE:
            A[i, scol] = -1.0
            scol += 1
        b[i] = rhs
        if b[i] < 0:
            A[i] *= -1.0
            b[i] *= -1.0
            flips[i] = -1.0
    u = np.array(upper + [inf] * nslack)
    c = np.array(cost + [0.0] * nslack)
    return transforms, A, b, c, u, const, flips


def _run(T, Tb, basis, in_basis, at_upper, upper, c, allow, maxiter):
    """Pivot until optimal, unbounded, or out of iterations."""
    m, n = T.shape
    ctol = 1e-9 * (1.0 + (np.abs(c).max() if n else 0.0))
    ptol = 1e-9
    bland = False
    stall = 0
    iters = 0
    while iters < maxiter:
        iters += 1
        up_idx = np.flatnonzero(at_upper)
        xB = Tb - T[:, up_idx] @ upper[up_idx] if up_idx.size else Tb.copy()
        r = c - c[basis] @ T if m else c.copy()
        cand = allow & ~in_basis & (
            (~at_upper & (r < -ctol)) | (at_upper & (r > ctol)))
        idx = np.flatnonzero(cand)
        if idx.size == 0:
            return OPTIMAL, iters
        if bland:
            j = idx[0]
        else:
            norms = 1.0 + (T[:, idx] ** 2).sum(axis=0)
            j = idx[np.argmax(r[idx] ** 2 / norms)]
        g = (-T[:, j] if at_upper[j] else T[:, j])
        ratios = np.full(m, math.inf)
        pos = g > ptol
        ratios[pos] = np.maximum(xB[pos], 0.0) / g[pos]
        ub = upper[basis]
        neg = (g < -ptol) & np.isfinite(ub)
        ratios[neg] = np.maximum(ub[neg] - xB[neg], 0.0) / -g[neg]
        row_min = ratios.min() if m else math.inf
        t_own = upper[j]
        if math.isfinite(t_own) and t_own <= row_min:
            at_upper[j] = not at_upper[j]
            stall = 0 if t_own > 1e-12 else stall + 1
            if stall >= _STALL_LIMIT:
                bland = True
            continue
        if not math.isfinite(row_min):
            return UNBOUNDED, iters
        rows = np.flatnonzero(ratios <= row_min + 1e-12)
        if bland:
            rr = rows[np.argmin(basis[rows])]
        else:
            rr = rows[np.argmax(np.abs(g[rows]))]
        lv = basis[rr]
        piv = T[rr, j]
        T[rr] /= piv
        Tb[rr] /= piv
        col = T[:, j].copy()
        col[rr] = 0.0
        T -= np.outer(col, T[rr])
        Tb -= col * Tb[rr]
        basis[rr] = j
        in_basis[j] = True
        in_basis[lv] = False
        at_upper[j] = False
        at_upper[lv] = g[rr] < 0
        if row_min > 1e-12:
            stall = 0
            bland = False
        else:
            stall += 1
            if stall >= _STALL_LIMIT:
                bland = True
    return ITERATION_LIMIT, iters


def solve_lp(model: OptimizationModel, *, maxiter: int = 50000) -> SimplexResult:
    """Solve the linear relaxation of `model` (integrality is ignored).

    Models with a quadratic objective are rejected; strip it first if a
    feasible vertex is all that is needed.
    """
    model.validate()
    if model.quadratic:
        raise ModelError("quadratic objective passed to the LP solver")
    transforms, A, b, c, u, const, flips = _standard_form(model)
    m, nreal = A.shape
    T = np.hstack([A, np.eye(m)])
    Tb = b.copy()
    n = nreal + m
    upper = np.concatenate([u, np.full(m, math.inf)])
    basis = np.arange(nreal, n)
    in_basis = np.zeros(n, dtype=bool)
    in_basis[basis] = True
    at_upper = np.zeros(n, dtype=bool)
    allow = np.zeros(n, dtype=bool)
    allow[:nreal] = upper[:nreal] > 0

    c1 = np.concatenate([np.zeros(nreal), np.ones(m)])
    status, it1 = _run(T, Tb, basis, in_basis, at_upper, upper, c1, allow, maxiter)
    if status == ITERATION_LIMIT:
        return SimplexResult(ITERATION_LIMIT, None, None, None, it1)
    xB = _basic_values(T, Tb, at_upper, upper)
    art_sum = float(xB[basis >= nreal].sum()) if m else 0.0
    if art_sum > 1e-7 * (1.0 + (abs(b).max() if m else 0.0)):
        return SimplexResult(INFEASIBLE, None, None, None, it1)
    upper[nreal:] = 0.0

    c2 = np.concatenate([c, np.zeros(m)])
    status, it2 = _run(T, Tb, basis, in_basis, at_upper, upper, c2, allow, maxiter)
    iters = it1 + it2
    if status != OPTIMAL:
        return SimplexResult(status, None, None, None, iters)

    x_full = np.where(at_upper & np.isfinite(upper), upper, 0.0)
    x_full[basis] = _basic_values(T, Tb, at_upper, upper)
    x: dict[str, float] = {}
    for v in model.variables:
        kind, col, off = transforms[v.name]
        if kind == "shift":
            x[v.name] = float(x_full[col] + off)
        elif kind == "negate":
            x[v.name] = float(off - x_full[col])
        else:
            x[v.name] = float(x_full[col] - x_full[col + 1])
    y = c2[basis] @ T[:, nreal:] if m else np.zeros(0)
    duals = {row.name: float(y[i] * flips[i])
             for i, row in enumerate(model.constraints)}
    obj = float(c2 @ x_full + const)
    return SimplexResult(OPTIMAL, x, obj, duals, iters)


def _basic_values(T, Tb, at_upper, upper):
    up_idx = np.flatnonzero(at_upper)
    if up_idx.size:
        return Tb - T[:, up_idx] @ upper[up_idx]
    return Tb.copy()
