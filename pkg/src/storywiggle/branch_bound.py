"""Branch and bound for integer programs over the simplex relaxation.

Depth-first with most-fractional branching (declaration order breaks
ties), floor child explored first.  The open-node stack is re-sorted to
best-bound order every few thousand nodes so long runs do not starve on
one subtree.  Warm assignments are validated and used as incumbents, and
a node is pruned as soon as its relaxation cannot beat the incumbent.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

from .programs import (ModelError, OptimizationModel, Variable,
                       model_violations, objective_value)
from .simplex import INFEASIBLE, ITERATION_LIMIT, OPTIMAL, UNBOUNDED, solve_lp

NODE_LIMIT = "node_limit"
TIME_LIMIT = "time_limit"

_RESORT_EVERY = 10000


@dataclass
class BnbResult:
    status: str
    x: dict[str, float] | None
    objective: float | None
    best_bound: float
    nodes: int

    @property
    def gap(self) -> float:
        if self.objective is None or not math.isfinite(self.best_bound):
            return math.inf
        return (self.objective - self.best_bound) / max(1.0, abs(self.objective))


def _with_bounds(model: OptimizationModel, bounds: dict[str, tuple[float, float]]):
    variables = [Variable(v.name, *bounds[v.name], v.integral) if v.name in bounds
                 else v for v in model.variables]
    clone = OptimizationModel(model.name, variables, model.constraints,
                              model.objective, model.quadratic)
    return clone


def _rounded(x: dict[str, float], int_names: list[str]) -> dict[str, float]:
    out = dict(x)
    for name in int_names:
        out[name] = float(round(out[name]))
    return out


def solve_ilp(model: OptimizationModel, *,
              warm: tuple[dict[str, float], ...] = (),
              node_limit: int = 200000,
              time_limit: float | None = None,
              priority: dict[str, int] | None = None) -> BnbResult:
    """Minimize `model` with its integrality constraints enforced.

    `warm` holds candidate assignments; feasible integral ones seed the
    incumbent.  `priority` maps variable names to branching classes, a
    lower class branching earlier (default: one class).
    """
    model.validate()
    if model.quadratic:
        raise ModelError("quadratic objective passed to the integer solver")
    int_names = [v.name for v in model.variables if v.integral]
    if not int_names:
        lp = solve_lp(model)
        status = {OPTIMAL: OPTIMAL, INFEASIBLE: INFEASIBLE,
                  UNBOUNDED: UNBOUNDED}.get(lp.status, ITERATION_LIMIT)
        bound = lp.objective if lp.objective is not None else -math.inf
        return BnbResult(status, lp.x, lp.objective, bound, 1)
    order = {name: i for i, name in enumerate(int_names)}
    prio = priority or {}

    inc_x: dict[str, float] | None = None
    inc_obj = math.inf
    for cand in warm:
        if any(name not in cand for name in model.variable_names()):
            continue
        full = _rounded(cand, int_names)
        if model_violations(model, full, tol=1e-5):
            continue
        if any(abs(cand[n] - full[n]) > 1e-6 for n in int_names):
            continue
        val = objective_value(model, full)
        if val < inc_obj:
            inc_obj, inc_x = val, full

    deadline = time.monotonic() + time_limit if time_limit is not None else None
    stack: list[tuple[dict[str, tuple[float, float]], float]] = [({}, -math.inf)]
    nodes = 0
    status = OPTIMAL
    while stack:
        if nodes and nodes % _RESORT_EVERY == 0:
            stack.sort(key=lambda nd: -nd[1])
        if nodes >= node_limit:
            status = NODE_LIMIT
            break
        if deadline is not None and time.monotonic() > deadline:
            status = TIME_LIMIT
            break
        bounds, parent_bound = stack.pop()
        if parent_bound >= inc_obj - 1e-9:
            continue
        nodes += 1
        lp = solve_lp(_with_bounds(model, bounds))
        if lp.status == INFEASIBLE:
            continue
        if lp.status == UNBOUNDED:
            return BnbResult(UNBOUNDED, inc_x, inc_obj if inc_x else None,
                             -math.inf, nodes)
        if lp.status == ITERATION_LIMIT:
            status = ITERATION_LIMIT
            stack.append((bounds, parent_bound))
            break
        assert lp.x is not None and lp.objective is not None
        if lp.objective >= inc_obj - 1e-9:
            continue
        fractional = [(prio.get(n, 0), -abs(lp.x[n] - round(lp.x[n])), order[n], n)
                      for n in int_names
                      if abs(lp.x[n] - round(lp.x[n])) > 1e-6]
        if not fractional:
            full = _rounded(lp.x, int_names)
            if not model_violations(model, full, tol=1e-5):
                val = objective_value(model, full)
                if val < inc_obj:
                    inc_obj, inc_x = val, full
            continue
        _, _, _, name = min(fractional)
        val = lp.x[name]
        var = next(v for v in model.variables if v.name == name)
        lo, hi = bounds.get(name, (var.lower, var.upper))
        up = dict(bounds)
        up[name] = (float(math.ceil(val)), hi)
        down = dict(bounds)
        down[name] = (lo, float(math.floor(val)))
        stack.append((up, lp.objective))
        stack.append((down, lp.objective))

    open_bounds = [pb for _, pb in stack]
    if status == OPTIMAL:
        if inc_x is None:
            return BnbResult(INFEASIBLE, None, None, math.inf, nodes)
        return BnbResult(OPTIMAL, inc_x, inc_obj, inc_obj, nodes)
    best_bound = min(open_bounds + [inc_obj]) if (open_bounds or inc_x) else -math.inf
    return BnbResult(status, inc_x, inc_obj if inc_x else None, best_bound, nodes)
