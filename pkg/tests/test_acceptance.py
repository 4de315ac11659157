"""Acceptance checklist for the whole package.

One test per item, each printing a single PASS/FAIL line with its
budget.  Item 5b pins an expected strict inequality that measurement
contradicts; it is kept as written and fails, and the README's
known-discrepancies section carries the analysis.
"""

import json
import math
import random
import time
from pathlib import Path

import pytest

from storywiggle.branch_bound import solve_ilp
from storywiggle.generate import generate_instance
from storywiggle.instance import (Coordination, is_nice, load_instance,
                                  minimal_stack_coordination, parse_instance)
from storywiggle.oracle import oracle_optimum
from storywiggle.pipeline import RunConfig, compare_objectives, run_pipeline
from storywiggle.programs import (build_lwh_program, build_qwh_program,
                                  build_wc_program, extract_coordination)
from storywiggle.qp import solve_qp
from storywiggle.routing import (arc_pair, arc_tangent_angle, gap_paths,
                                 is_monotone, radial_distance_profile,
                                 route_all_gaps, route_gap, sample_path)
from storywiggle.simplex import solve_lp
from storywiggle.wigglefree import max_wiggle_free_set, unrestricted_wc_min

ROOT = Path(__file__).parent.parent
INSTANCES = ROOT / "instances"

SUITE_SHAPES = [(2, 2), (3, 3), (4, 4), (3, 4), (4, 3),
                (2, 4), (4, 2), (3, 2), (2, 3), (4, 4)]


def report(label: str, ok: bool, detail: str) -> str:
    line = f"ACCEPTANCE {label}: {'PASS' if ok else 'FAIL'} ({detail})"
    print(line)
    return line


def two_step_scene(levels1: dict[str, float], levels2: dict[str, float]):
    chars = sorted(levels1)
    inst, _ = parse_instance(json.dumps({
        "characters": [{"id": c, "activeFrom": 1, "activeTo": 2}
                       for c in chars],
        "meetings": [],
        "orderings": [sorted(chars, key=lambda c: levels1[c]),
                      sorted(chars, key=lambda c: levels2[c])],
        "params": {"delta": 1.0, "deltaBar": 1.0},
    }))
    values = {(1, c): float(v) for c, v in levels1.items()}
    values.update({(2, c): float(v) for c, v in levels2.items()})
    return inst, Coordination(values)


@pytest.fixture(scope="module")
def small_suite():
    """200 random instances, <= 4 characters, <= 4 steps, <= 2 meetings."""
    suite = []
    for seed in range(200):
        chars, steps = SUITE_SHAPES[seed % len(SUITE_SHAPES)]
        suite.append(generate_instance(chars, steps, seed=seed,
                                       meeting_prob=0.5, max_meetings=2))
    return suite


@pytest.fixture(scope="module")
def suite_wc_values(small_suite):
    """Integer wiggle-count optimum per suite instance, via the ILP."""
    t0 = time.perf_counter()
    values = []
    for inst, params in small_suite:
        model, _ = build_wc_program(inst, params)
        r = solve_ilp(model)
        assert r.status == "optimal"
        values.append(math.floor(r.objective + 1e-9))
    return values, time.perf_counter() - t0


def test_01_wc_oracle_equivalence(small_suite, suite_wc_values):
    values, solve_seconds = suite_wc_values
    t0 = time.perf_counter()
    mismatches = [
        i for i, (inst, params) in enumerate(small_suite)
        if values[i] != int(oracle_optimum(inst, params, "wc").value)]
    elapsed = solve_seconds + time.perf_counter() - t0
    ok = not mismatches and elapsed < 60.0
    report("1 wc-oracle-equivalence", ok,
           f"{len(small_suite)} instances, {elapsed:.1f}s")
    assert mismatches == [], f"floor(ILP) != oracle on {mismatches}"
    assert elapsed < 60.0


def test_02_lwh_oracle_equivalence(small_suite):
    t0 = time.perf_counter()
    value_bad, integral_bad = [], []
    for i, (inst, params) in enumerate(small_suite):
        model, _ = build_lwh_program(inst, params)
        r = solve_lp(model)
        assert r.status == "optimal"
        if r.objective != oracle_optimum(inst, params, "lwh").value:
            value_bad.append(i)
        if any(abs(v - round(v)) > 1e-6 for v in r.x.values()):
            integral_bad.append(i)
    elapsed = time.perf_counter() - t0
    ok = not value_bad and not integral_bad and elapsed < 60.0
    report("2 lwh-oracle-equivalence", ok,
           f"{len(small_suite)} instances, exact equality, {elapsed:.1f}s")
    assert value_bad == [], f"LP objective off on {value_bad}"
    assert integral_bad == [], f"fractional vertex on {integral_bad}"
    assert elapsed < 60.0


def test_03_qwh_soundness(small_suite):
    t0 = time.perf_counter()
    above, rough, sloppy = [], [], []
    worst_kkt = 0.0
    for i, (inst, params) in enumerate(small_suite):
        model, index = build_qwh_program(inst, params)
        r = solve_qp(model)
        assert r.status == "optimal"
        if r.objective > oracle_optimum(inst, params, "qwh").value + 1e-6:
            above.append(i)
        worst_kkt = max(worst_kkt, max(r.kkt.values()))
        if max(r.kkt.values()) >= 1e-6:
            rough.append(i)
        coord = extract_coordination(index, r.x)
        if not is_nice(inst, coord, params, tol=1e-6):
            sloppy.append(i)
    elapsed = time.perf_counter() - t0
    ok = not (above or rough or sloppy) and elapsed < 60.0
    report("3 qwh-soundness", ok,
           f"{len(small_suite)} instances, worst KKT {worst_kkt:.1e}, "
           f"{elapsed:.1f}s")
    assert above == [], f"QP objective above the integral bound on {above}"
    assert rough == [], f"KKT residual >= 1e-6 on {rough}"
    assert sloppy == [], f"QP layout not nice on {sloppy}"
    assert elapsed < 60.0


def test_04_max_flat_set_equals_exhaustive_search():
    from oracles import max_flat_subset_exhaustive
    t0 = time.perf_counter()
    mismatches = []
    for k in range(100):
        inst, params = generate_instance(3 + k % 3, 2 + k % 2, seed=1000 + k,
                                         all_active=True, meeting_prob=0.5)
        got = max_wiggle_free_set(inst, params).size
        want = max_flat_subset_exhaustive(inst, params)
        if got != want:
            mismatches.append((k, got, want))
    elapsed = time.perf_counter() - t0
    ok = not mismatches and elapsed < 60.0
    report("4 flat-set-exhaustive-equivalence", ok,
           f"100 instances, {elapsed:.1f}s")
    assert mismatches == [], mismatches
    assert elapsed < 60.0


def test_05a_unrestricted_lower_bounds_ilp(small_suite, suite_wc_values):
    values, _ = suite_wc_values
    t0 = time.perf_counter()
    broken = [
        i for i, (inst, _) in enumerate(small_suite)
        if unrestricted_wc_min(inst).wiggles > values[i]]
    elapsed = time.perf_counter() - t0
    report("5a unrestricted-bound", not broken,
           f"{len(small_suite)} instances, {elapsed:.1f}s")
    assert broken == [], f"bound violated on {broken}"


def test_05b_unrestricted_strict_on_crossing_pair():
    """Pinned expectation: strictly fewer unrestricted wiggles here.

    Exhaustive search says the nice minimum on the crossing pair is 1,
    the same as the unrestricted minimum (one character can stay flat
    while the other crosses), so this fails.  Kept as written; the
    README's known-discrepancies note has the analysis, and the pinched
    pair (see test_wigglefree) shows a genuine strict gap.
    """
    inst, params = load_instance(str(INSTANCES / "crossing_pair.json"))
    unrestricted = unrestricted_wc_min(inst).wiggles
    model, _ = build_wc_program(inst, params)
    ilp = math.floor(solve_ilp(model).objective + 1e-9)
    ok = unrestricted < ilp
    report("5b unrestricted-strict-on-crossing-pair", ok,
           f"unrestricted={unrestricted}, nice={ilp}, expected strict <")
    assert unrestricted < ilp, (
        f"expected strict inequality, measured {unrestricted} < {ilp} is false")


def test_06_arc_geometry_and_closed_form():
    rng = random.Random(606)
    t0 = time.perf_counter()
    worst_junction = worst_end = 0.0
    for _ in range(500):
        dy = rng.uniform(0.05, 3.0) * rng.choice([1.0, -1.0])
        r1 = rng.uniform(abs(dy) / 2.0, 3.0 * abs(dy))
        r2 = rng.uniform(abs(dy) / 2.0, 3.0 * abs(dy))
        dx = math.sqrt(2.0 * (r1 + r2) * abs(dy) - dy * dy)
        path = arc_pair((0.0, 0.0), (dx, dy), r1, r2)
        first, second = path.arcs
        junction = abs(math.atan2(
            math.sin(arc_tangent_angle(first, first.end_angle)
                     - arc_tangent_angle(second, second.start_angle)),
            math.cos(arc_tangent_angle(first, first.end_angle)
                     - arc_tangent_angle(second, second.start_angle))))
        ends = max(abs(arc_tangent_angle(first, first.start_angle)),
                   abs(arc_tangent_angle(second, second.end_angle)))
        worst_junction = max(worst_junction, junction)
        worst_end = max(worst_end, ends)
        assert junction < 1e-9, (dy, r1, r2)
        assert ends < 1e-9, (dy, r1, r2)
        pts = sample_path(path, n=33)
        assert all(b[0] - a[0] >= -1e-9 for a, b in zip(pts, pts[1:]))
        sign = 1.0 if dy > 0 else -1.0
        assert all(sign * (b[1] - a[1]) >= -1e-9
                   for a, b in zip(pts, pts[1:]))

    worst_gap = 0.0
    for _ in range(120):
        dy = rng.uniform(0.2, 3.0) * rng.choice([1.0, -1.0])
        r_min = rng.uniform(abs(dy) / 2.0, 2.5 * abs(dy))
        inst, coord = two_step_scene({"a": 0.0}, {"a": dy})
        g = route_gap(inst, coord, 1, r_min=r_min)
        closed = 2.0 * (2.0 * r_min) * abs(dy) - dy * dy
        assert closed >= dy * dy - 1e-12
        worst_gap = max(worst_gap, abs(g.dx ** 2 - closed))
        assert abs(g.dx ** 2 - closed) < 1e-9, (dy, r_min)
    elapsed = time.perf_counter() - t0
    report("6 arc-geometry", True,
           f"500 triples + 120 gap LPs, worst junction {worst_junction:.1e} "
           f"rad, worst closed-form gap {worst_gap:.1e}, {elapsed:.1f}s")


def test_07_radial_monotonicity_on_routed_gaps():
    rng = random.Random(707)
    t0 = time.perf_counter()
    scenes = []
    for seed in range(40):
        inst, params = generate_instance(5 + seed % 2, 4, seed=2000 + seed,
                                         meeting_prob=0.5)
        scenes.append((inst, minimal_stack_coordination(inst, params)))
    for seed in range(10):
        inst, params = generate_instance(4, 3, seed=3000 + seed,
                                         meeting_prob=0.5)
        scenes.append((inst, oracle_optimum(inst, params, "lwh").coordination))
    for _ in range(20):
        # same-direction fans: everything rises, boxes overlap a lot
        n = rng.randint(3, 5)
        l1, l2 = {}, {}
        y1 = y2 = 0.0
        for i in range(n):
            y1 += rng.uniform(0.8, 1.6) if i else 0.0
            y2 += rng.uniform(0.1, 2.0) if i else rng.uniform(0.4, 2.5)
            l1[f"c{i}"] = y1
            l2[f"c{i}"] = y2
        scenes.append(two_step_scene(l1, l2))

    gaps = pairs = dropped = 0
    violations = []
    for inst, coord in scenes:
        for g in route_all_gaps(inst, coord, r_min=0.5).gaps:
            gaps += 1
            dropped += len(g.dropped)
            paths = gap_paths(inst, coord, g, 0.0, max(g.dx, 1.0) + 0.2)
            for p in g.pairs:
                pairs += 1
                profile = radial_distance_profile(paths[p.lower],
                                                  paths[p.upper],
                                                  samples=100)
                if not is_monotone(profile, tol=1e-6):
                    violations.append((g.gap, p.lower, p.upper))
    elapsed = time.perf_counter() - t0
    ok = gaps >= 100 and not violations
    report("7 radial-monotonicity", ok,
           f"{gaps} gaps, {pairs} pairs, {dropped} dropped, {elapsed:.1f}s")
    assert gaps >= 100
    assert violations == [], violations


def test_08_cross_metric_dominance_on_fixed_suite():
    t0 = time.perf_counter()
    own = {"wc": "wiggleCount", "lwh": "linearWiggleHeight",
           "qwh": "quadraticWiggleHeight"}
    paths = sorted(INSTANCES.glob("suite_*.json"))
    assert len(paths) == 10
    for path in paths:
        inst, params = load_instance(str(path))
        layouts = compare_objectives(inst, params)["layouts"]
        for name, key in own.items():
            assert layouts[name][f"{key}Ratio"] == pytest.approx(1.0), \
                (path.name, name)
        for name, row in layouts.items():
            for key in ("wiggleCount", "linearWiggleHeight",
                        "quadraticWiggleHeight", "totalHeight"):
                ratio = row[f"{key}Ratio"]
                assert ratio is None or ratio >= 1.0 - 1e-9, \
                    (path.name, name, key, ratio)
        assert layouts["base"]["totalHeightRatio"] == pytest.approx(1.0), \
            path.name
    elapsed = time.perf_counter() - t0
    ok = elapsed < 60.0
    report("8 cross-metric-dominance", ok,
           f"10 instances x 4 layouts, {elapsed:.1f}s")
    assert elapsed < 60.0


def test_09_readme_states_benchmark_limits():
    readme = (ROOT / "README.md").read_text(encoding="utf-8")
    has_note = "not reproducible" in readme and "orderings" in readme
    report("9 benchmark-reproducibility-note", has_note,
           "README documents why published absolute figures are out of reach")
    assert has_note


def test_10_pipeline_determinism(tmp_path):
    t0 = time.perf_counter()
    jobs = (("suite_01.json", "wc"), ("suite_02.json", "qwh"),
            ("suite_03.json", "lwh"))
    for name, objective in jobs:
        outputs = []
        for run in ("a", "b"):
            base = tmp_path / f"{name}.{objective}.{run}"
            result = run_pipeline(RunConfig(
                input_path=str(INSTANCES / name), objective=objective,
                svg_path=str(base) + ".svg",
                metrics_path=str(base) + ".json",
                routing_report_path=str(base) + ".routing.json"))
            assert result.exit_code == 0, (name, objective)
            metrics = json.loads(Path(str(base) + ".json").read_text())
            # wall-clock is the one field allowed to differ between runs
            metrics["solveSeconds"] = 0.0
            outputs.append((
                Path(str(base) + ".svg").read_bytes(),
                json.dumps(metrics, indent=2, sort_keys=True),
                Path(str(base) + ".routing.json").read_bytes()))
        assert outputs[0][0] == outputs[1][0], f"SVG differs for {name}"
        assert outputs[0][1] == outputs[1][1], f"metrics differ for {name}"
        assert outputs[0][2] == outputs[1][2], f"routing differs for {name}"
    elapsed = time.perf_counter() - t0
    report("10 determinism", True,
           f"3 instances x 2 runs, byte-identical artifacts, {elapsed:.1f}s")
