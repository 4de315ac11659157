"""Reading and writing models in the LP interchange text format.

The dialect is the common industrial one: an objective section, `Subject
To` rows, `Bounds`, `Generals`/`Binaries` integrality sections, and `End`.
Separable quadratic objectives use the bracketed `[ 2 x ^ 2 ] / 2` form.
The reader accepts the subset the writer produces (plus minor whitespace
freedom) and exists for round-trips with external solvers.
"""

from __future__ import annotations

import math
import re

from .programs import EQ, GE, LE, LinearConstraint, OptimizationModel, Variable


class LpFormatError(ValueError):
    pass


def _num(v: float) -> str:
    if v == int(v) and abs(v) < 1e15:
        return str(int(v))
    return repr(float(v))


def _terms(items: list[tuple[str, float]]) -> str:
    parts: list[str] = []
    for name, coef in items:
        if coef < 0:
            parts.append("-")
            coef = -coef
        elif parts:
            parts.append("+")
        parts.append(f"{_num(coef)} {name}")
    return " ".join(parts) if parts else "0"


def write_lp(model: OptimizationModel) -> str:
    """Serialize a model; variables keep their declaration order."""
    out: list[str] = [f"\\ model: {model.name}", "Minimize"]
    obj = _terms(sorted(model.objective.items(), key=_decl_order(model)))
    if model.quadratic:
        qitems = sorted(model.quadratic.items(), key=_decl_order(model))
        qparts = " + ".join(f"{_num(2 * coef)} {name} ^ 2" for name, coef in qitems)
        obj = (obj + " + " if obj != "0" else "") + f"[ {qparts} ] / 2"
    out.append(f" obj: {obj}")
    out.append("Subject To")
    for row in model.constraints:
        out.append(f" {row.name}: {_terms(list(row.coeffs))} {row.sense} {_num(row.rhs)}")
    bounds: list[str] = []
    for v in model.variables:
        if v.lower == 0.0 and math.isinf(v.upper):
            continue
        if math.isinf(-v.lower) and math.isinf(v.upper):
            bounds.append(f" {v.name} free")
        elif math.isinf(v.upper):
            bounds.append(f" {v.name} >= {_num(v.lower)}")
        else:
            bounds.append(f" {_num(v.lower)} <= {v.name} <= {_num(v.upper)}")
    if bounds:
        out.append("Bounds")
        out.extend(bounds)
    generals = [v.name for v in model.variables
                if v.integral and not (v.lower == 0.0 and v.upper == 1.0)]
    binaries = [v.name for v in model.variables
                if v.integral and v.lower == 0.0 and v.upper == 1.0]
    if generals:
        out.append("Generals")
        out.extend(f" {name}" for name in generals)
    if binaries:
        out.append("Binaries")
        out.extend(f" {name}" for name in binaries)
    out.append("End")
    return "\n".join(out) + "\n"


def _decl_order(model: OptimizationModel):
    order = {v.name: i for i, v in enumerate(model.variables)}
    return lambda item: order[item[0]]


_SECTION = re.compile(
    r"^\s*(minimize|maximize|subject\s+to|st|s\.t\.|bounds|generals?|binar(?:ies|y)|end)\s*$",
    re.IGNORECASE)

_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_.]*")


def _strip_comments(text: str) -> str:
    return "\n".join(line.split("\\")[0] for line in text.splitlines())


def parse_lp(text: str) -> OptimizationModel:
    """Parse the writer's dialect back into a model."""
    sections: dict[str, list[str]] = {}
    current: str | None = None
    for line in _strip_comments(text).splitlines():
        m = _SECTION.match(line)
        if m:
            key = re.sub(r"\s+", " ", m.group(1).lower())
            if key in ("st", "s.t."):
                key = "subject to"
            if key in ("general", "generals"):
                key = "generals"
            if key in ("binary", "binaries"):
                key = "binaries"
            current = key
            sections.setdefault(current, [])
            continue
        if line.strip():
            if current is None:
                raise LpFormatError(f"content before first section: {line.strip()!r}")
            sections[current].append(line)
    if "maximize" in sections:
        raise LpFormatError("Maximize is not supported, restate as Minimize")
    if "minimize" not in sections:
        raise LpFormatError("missing Minimize section")

    model = OptimizationModel("parsed")
    seen: dict[str, dict] = {}

    def touch(name: str) -> dict:
        if name not in seen:
            seen[name] = {"lower": 0.0, "upper": math.inf, "integral": False}
        return seen[name]

    obj_text = " ".join(sections["minimize"])
    obj_text = re.sub(r"^\s*\w+\s*:", "", obj_text, count=1)
    quad_text = None
    quad_match = re.search(r"\[(.*?)\]\s*/\s*2", obj_text)
    if quad_match:
        quad_text = quad_match.group(1)
        obj_text = obj_text[:quad_match.start()] + obj_text[quad_match.end():]
    for name, coef in _parse_linear(obj_text.rstrip(" +")).items():
        touch(name)
        if coef != 0.0:
            model.objective[name] = coef
    if quad_text is not None:
        for term in re.finditer(
                r"([+-]?)\s*([0-9.eE+-]*?)\s*(" + _NAME.pattern + r")\s*\^\s*2",
                quad_text):
            sign = -1.0 if term.group(1) == "-" else 1.0
            coef = float(term.group(2)) if term.group(2) not in ("", "+", "-") else 1.0
            touch(term.group(3))
            model.quadratic[term.group(3)] = sign * coef / 2.0

    rows_text = " ".join(sections.get("subject to", []))
    for row_name, expr, sense, rhs in _split_rows(rows_text):
        coeffs = tuple(_parse_linear(expr).items())
        for name, _ in coeffs:
            touch(name)
        model.constraints.append(LinearConstraint(row_name, coeffs, sense, rhs))

    for line in sections.get("bounds", []):
        _parse_bound(line.strip(), touch)
    for line in sections.get("generals", []):
        for name in line.split():
            touch(name)["integral"] = True
    for line in sections.get("binaries", []):
        for name in line.split():
            info = touch(name)
            info["integral"] = True
            info["lower"] = max(info["lower"], 0.0)
            info["upper"] = min(info["upper"], 1.0)

    for name, info in seen.items():
        model.variables.append(
            Variable(name, info["lower"], info["upper"], info["integral"]))
    model.validate()
    return model


def _parse_linear(expr: str) -> dict[str, float]:
    out: dict[str, float] = {}
    pos = 0
    sign = 1.0
    expr = expr.strip()
    token = re.compile(
        r"\s*(?:(\+|-)|([0-9]+(?:\.[0-9]*)?(?:[eE][+-]?[0-9]+)?)|(" + _NAME.pattern + r"))")
    pending: float | None = None
    while pos < len(expr):
        m = token.match(expr, pos)
        if not m:
            raise LpFormatError(f"cannot parse expression near {expr[pos:pos + 20]!r}")
        pos = m.end()
        if m.group(1):
            if pending is not None:
                raise LpFormatError("sign between coefficient and name")
            sign *= -1.0 if m.group(1) == "-" else 1.0
            continue
        if m.group(2):
            if pending is not None:
                raise LpFormatError("two consecutive numbers")
            pending = float(m.group(2))
            continue
        name = m.group(3)
        coef = sign * (1.0 if pending is None else pending)
        out[name] = out.get(name, 0.0) + coef
        sign, pending = 1.0, None
    if pending is not None and pending != 0.0:
        raise LpFormatError("trailing constant in expression")
    return out


def _split_rows(text: str):
    pos = 0
    row_re = re.compile(r"\s*(" + _NAME.pattern + r")\s*:")
    sense_re = re.compile(r"(<=|>=|=|<|>)")
    while pos < len(text):
        if not text[pos:].strip():
            return
        m = row_re.match(text, pos)
        if not m:
            raise LpFormatError(f"expected row name near {text[pos:pos + 20]!r}")
        name = m.group(1)
        pos = m.end()
        s = sense_re.search(text, pos)
        if not s:
            raise LpFormatError(f"row {name!r} has no relational operator")
        expr = text[pos:s.start()]
        sense = {"<": LE, "<=": LE, ">": GE, ">=": GE, "=": EQ}[s.group(1)]
        pos = s.end()
        num = re.match(r"\s*([+-]?[0-9.eE+]+)", text[pos:])
        if not num:
            raise LpFormatError(f"row {name!r} has no right-hand side")
        rhs = float(num.group(1))
        pos += num.end()
        yield name, expr, sense, rhs


def _parse_bound(line: str, touch) -> None:
    if not line:
        return
    free = re.fullmatch(r"(" + _NAME.pattern + r")\s+free", line, re.IGNORECASE)
    if free:
        info = touch(free.group(1))
        info["lower"], info["upper"] = -math.inf, math.inf
        return
    both = re.fullmatch(
        r"([+-]?[0-9.eE+]+)\s*<=\s*(" + _NAME.pattern + r")\s*<=\s*([+-]?[0-9.eE+]+)", line)
    if both:
        info = touch(both.group(2))
        info["lower"], info["upper"] = float(both.group(1)), float(both.group(3))
        return
    one = re.fullmatch(
        r"(" + _NAME.pattern + r")\s*(<=|>=|=)\s*([+-]?[0-9.eE+]+)", line)
    if one:
        info = touch(one.group(1))
        val = float(one.group(3))
        if one.group(2) == "<=":
            info["upper"] = val
        elif one.group(2) == ">=":
            info["lower"] = val
        else:
            info["lower"] = info["upper"] = val
        return
    raise LpFormatError(f"cannot parse bound line {line!r}")
