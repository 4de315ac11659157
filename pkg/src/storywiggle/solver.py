"""One entry point for all model solves, built-in or external.

`solve_model` inspects the model (quadratic? integral?) and dispatches
to the matching built-in solver.  The `external:<command>` backend
instead round-trips through the LP file format: the command is invoked
as `<command> in.lp out.sol` and must write a solution file of the shape

    status optimal
    objective 12.5
    y_t1_c0 3
    ...

`python3 -m storywiggle.lpsolve` is such a command (it applies the
built-in solvers), so the round trip can be exercised without any third
party installs.
"""

from __future__ import annotations

import math
import os
import shlex
import subprocess
import tempfile
import time
from dataclasses import dataclass, field
from enum import Enum

from .branch_bound import solve_ilp
from .lp_format import write_lp
from .programs import ModelError, OptimizationModel
from .qp import solve_qp
from .simplex import solve_lp


class SolveStatus(str, Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    ITERATION_LIMIT = "iteration_limit"
    TIME_LIMIT = "time_limit"


_STATUS = {s.value: s for s in SolveStatus}
_STATUS["node_limit"] = SolveStatus.ITERATION_LIMIT


def default_backend() -> str:
    return os.environ.get("STORYWIGGLE_BACKEND", "builtin")


@dataclass
class SolverConfig:
    backend: str = field(default_factory=default_backend)
    time_limit: float | None = None
    node_limit: int = 200000
    lp_maxiter: int = 50000
    qp_maxiter: int = 5000


@dataclass
class SolveResult:
    status: SolveStatus
    assignment: dict[str, float] | None
    objective: float | None
    best_bound: float | None
    gap: float | None
    duals: dict[str, float] | None
    kkt: dict[str, float] | None
    stats: dict[str, float] = field(default_factory=dict)


def solve_model(model: OptimizationModel, config: SolverConfig | None = None, *,
                warm: tuple[dict[str, float], ...] = (),
                priority: dict[str, int] | None = None) -> SolveResult:
    """Minimize `model`, honoring integrality and quadratic terms."""
    config = config or SolverConfig()
    start = time.perf_counter()
    if config.backend.startswith("external:"):
        result = _solve_external(model, config)
    elif config.backend == "builtin":
        result = _solve_builtin(model, config, warm, priority)
    else:
        raise ModelError(f"unknown backend {config.backend!r}")
    result.stats["solve_seconds"] = time.perf_counter() - start
    return result


def _solve_builtin(model: OptimizationModel, config: SolverConfig,
                   warm: tuple[dict[str, float], ...],
                   priority: dict[str, int] | None) -> SolveResult:
    if model.quadratic:
        if model.is_integer_program():
            raise ModelError("integral variables with a quadratic objective")
        best_warm = warm[0] if warm else None
        r = solve_qp(model, warm=best_warm, maxiter=config.qp_maxiter)
        return SolveResult(_STATUS[r.status], r.x, r.objective, r.objective,
                           0.0 if r.status == "optimal" else None,
                           r.duals, r.kkt, {"iterations": r.iterations})
    if model.is_integer_program():
        r = solve_ilp(model, warm=warm, node_limit=config.node_limit,
                      time_limit=config.time_limit, priority=priority)
        gap = r.gap if r.objective is not None else None
        return SolveResult(_STATUS[r.status], r.x, r.objective, r.best_bound,
                           gap, None, None, {"nodes": r.nodes})
    r = solve_lp(model, maxiter=config.lp_maxiter)
    return SolveResult(_STATUS[r.status], r.x, r.objective, r.objective,
                       0.0 if r.status == "optimal" else None,
                       r.duals, None, {"iterations": r.iterations})


def _solve_external(model: OptimizationModel, config: SolverConfig) -> SolveResult:
    command = shlex.split(config.backend.split(":", 1)[1])
    with tempfile.TemporaryDirectory(prefix="storywiggle_") as tmp:
        lp_path = os.path.join(tmp, "in.lp")
        sol_path = os.path.join(tmp, "out.sol")
        with open(lp_path, "w", encoding="utf-8") as fh:
            fh.write(write_lp(model))
        timeout = config.time_limit * 10 if config.time_limit else None
        proc = subprocess.run(command + [lp_path, sol_path],
                              capture_output=True, text=True, timeout=timeout)
        if proc.returncode != 0:
            raise ModelError(
                f"external solver failed ({proc.returncode}): {proc.stderr.strip()}")
        with open(sol_path, "r", encoding="utf-8") as fh:
            return _parse_solution(fh.read())


def _parse_solution(text: str) -> SolveResult:
    status: SolveStatus | None = None
    objective: float | None = None
    assignment: dict[str, float] = {}
    for line in text.splitlines():
        parts = line.split()
        if not parts:
            continue
        if parts[0] == "status":
            status = _STATUS[parts[1]]
        elif parts[0] == "objective":
            objective = float(parts[1])
        else:
            assignment[parts[0]] = float(parts[1])
    if status is None:
        raise ModelError("solution file has no status line")
    if status is not SolveStatus.OPTIMAL:
        return SolveResult(status, None, objective, objective, None, None, None)
    return SolveResult(status, assignment, objective, objective, 0.0, None, None)


def write_solution(path: str, result: SolveResult) -> None:
    """Persist a result in the format `_parse_solution` reads."""
    lines = [f"status {result.status.value}"]
    if result.objective is not None:
        lines.append(f"objective {result.objective!r}")
    for name, value in (result.assignment or {}).items():
        lines.append(f"{name} {value!r}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
