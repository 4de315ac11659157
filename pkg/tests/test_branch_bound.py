"""Branch and bound against exhaustive integer search."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import brute_force_ilp
from storywiggle.branch_bound import solve_ilp
from storywiggle.programs import (EQ, GE, LE, LinearConstraint,
                                  OptimizationModel, Variable,
                                  model_violations)


def ilp(variables, constraints, objective):
    model = OptimizationModel("t", variables, constraints, objective)
    model.validate()
    return model


def random_ilp(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 4)
    m = rng.randint(0, 4)
    variables = [Variable(f"x{i}", 0.0, float(rng.randint(1, 5)), True)
                 for i in range(n)]
    rows = []
    for j in range(m):
        coeffs = tuple((f"x{i}", float(rng.randint(-3, 3))) for i in range(n))
        rows.append(LinearConstraint(
            f"r{j}", coeffs, (LE, GE, EQ)[rng.randrange(3)],
            float(rng.randint(-4, 6))))
    objective = {f"x{i}": float(rng.randint(-4, 4)) for i in range(n)}
    return ilp(variables, rows, objective)


class TestHandCases:
    def test_knapsack(self):
        model = ilp(
            [Variable("a", 0.0, 1.0, True), Variable("b", 0.0, 1.0, True),
             Variable("c", 0.0, 1.0, True)],
            [LinearConstraint("w", (("a", 3.0), ("b", 4.0), ("c", 5.0)),
                              LE, 7.0)],
            {"a": -4.0, "b": -5.0, "c": -6.0})
        r = solve_ilp(model)
        assert r.status == "optimal"
        assert r.objective == pytest.approx(-9.0)       # a + b
        assert r.x == {"a": 1.0, "b": 1.0, "c": 0.0}

    def test_rounding_is_not_enough(self):
        # LP relaxation peaks at x=3.8 but the lattice best is x=3
        model = ilp(
            [Variable("x", 0.0, 10.0, True)],
            [LinearConstraint("r", (("x", 5.0),), LE, 19.0)],
            {"x": -1.0})
        r = solve_ilp(model)
        assert r.objective == pytest.approx(-3.0)

    def test_mixed_integer(self):
        model = ilp(
            [Variable("n", 0.0, 5.0, True), Variable("x", 0.0, 5.0)],
            [LinearConstraint("r", (("n", 1.0), ("x", 1.0)), GE, 2.5)],
            {"n": 1.0, "x": 2.0})
        r = solve_ilp(model)
        assert r.status == "optimal"
        # n=3 alone and n=2 plus half a unit of pricey x both cost 3
        assert r.objective == pytest.approx(3.0)
        assert abs(r.x["n"] - round(r.x["n"])) < 1e-9

    def test_infeasible_lattice(self):
        model = ilp(
            [Variable("x", 0.0, 3.0, True)],
            [LinearConstraint("lo", (("x", 2.0),), GE, 3.0),
             LinearConstraint("hi", (("x", 2.0),), LE, 3.0)],
            {"x": 1.0})
        assert solve_ilp(model).status == "infeasible"

    def test_pure_lp_passthrough(self):
        model = ilp([Variable("x", 0.0, 2.0)], [], {"x": 1.0})
        r = solve_ilp(model)
        assert r.status == "optimal" and r.objective == pytest.approx(0.0)

    def test_node_limit_reports_bound(self):
        model = random_ilp(99)
        r = solve_ilp(model, node_limit=1)
        assert r.status in ("optimal", "node_limit", "infeasible")
        if r.status == "node_limit":
            assert r.best_bound <= (r.objective or float("inf")) + 1e-9

    def test_warm_start_seeds_incumbent(self):
        model = ilp(
            [Variable("x", 0.0, 5.0, True)],
            [LinearConstraint("r", (("x", 1.0),), GE, 2.0)],
            {"x": 1.0})
        r = solve_ilp(model, warm=({"x": 3.0},), node_limit=0)
        assert r.status == "node_limit"
        assert r.objective == pytest.approx(3.0)      # the seed survives

    def test_bad_warm_candidates_skipped(self):
        model = ilp(
            [Variable("x", 0.0, 5.0, True)],
            [LinearConstraint("r", (("x", 1.0),), GE, 2.0)],
            {"x": 1.0})
        r = solve_ilp(model, warm=({"x": 0.0},       # violates the row
                                   {"y": 1.0},       # misses the variable
                                   {"x": 2.5},       # fractional
                                   {"x": 4.0}))      # usable
        assert r.status == "optimal"
        assert r.objective == pytest.approx(2.0)

    def test_priority_classes_change_branch_order_not_result(self):
        model = random_ilp(7)
        base = solve_ilp(model)
        prio = {v.name: i % 2 for i, v in enumerate(model.variables)}
        redo = solve_ilp(model, priority=prio)
        assert base.status == redo.status
        if base.status == "optimal":
            assert redo.objective == pytest.approx(base.objective)


@settings(max_examples=120, deadline=None)
@given(seed=st.integers(0, 100_000))
def test_matches_exhaustive_search(seed):
    model = random_ilp(seed)
    r = solve_ilp(model)
    expected = brute_force_ilp(model)
    if expected is None:
        assert r.status == "infeasible"
        return
    assert r.status == "optimal"
    assert r.objective == pytest.approx(expected[0], abs=1e-7)
    assert model_violations(model, r.x, tol=1e-6) == []
    assert all(abs(v - round(v)) < 1e-6 for v in r.x.values())
