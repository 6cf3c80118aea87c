from fractions import Fraction

import numpy as np
import pytest

import oracles
from wiretapnc import lp as lpm
from wiretapnc.lp import EQ, GE, INF, LE, LinearProgram


def small_lp():
    # max x + 2y, x + y <= 4, x - y >= -2, 3x + y <= 9, y free
    p = LinearProgram("small")
    p.add_variable("x")
    p.add_variable("y", lb=-INF)
    p.add_constraint({"x": 1, "y": 1}, LE, 4)
    p.add_constraint({"x": 1, "y": -1}, GE, -2)
    p.add_constraint({"x": 3, "y": 1}, LE, 9)
    p.set_objective({"x": 1, "y": 2})
    return p


def test_exact_small():
    sol = lpm.solve_exact(small_lp())
    assert sol.optimal and sol.objective == 7
    assert (sol["x"], sol["y"]) == (1, 3)
    assert lpm.check_optimal(small_lp(), sol)


def test_textbook_fraction():
    # max 3x + 2y, x + y <= 4, x + 3y <= 6, x <= 3 -> 11 at (3, 1); tweak for a fraction
    p = LinearProgram()
    p.add_variable("x")
    p.add_variable("y")
    p.add_constraint({"x": 2, "y": 1}, LE, 4)
    p.add_constraint({"x": 1, "y": 3}, LE, 6)
    p.set_objective({"x": 1, "y": 1})
    sol = lpm.solve_exact(p)
    assert sol.objective == Fraction(14, 5)
    assert lpm.check_optimal(p, sol)


def test_equality_and_bounds():
    p = LinearProgram()
    p.add_variable("a", lb=1, ub=Fraction(5, 2))
    p.add_variable("b", ub=3)
    p.add_constraint({"a": 1, "b": 1}, EQ, 4)
    p.set_objective({"a": 2, "b": 1})
    sol = lpm.solve_exact(p)
    assert sol.objective == Fraction(13, 2) and sol["a"] == Fraction(5, 2)
    assert lpm.check_optimal(p, sol)


def test_infeasible_and_unbounded():
    p = LinearProgram()
    p.add_variable("x")
    p.add_constraint({"x": 1}, GE, 3)
    p.add_constraint({"x": 1}, LE, 2)
    p.set_objective({"x": 1})
    assert lpm.solve_exact(p).status == lpm.INFEASIBLE
    assert lpm.solve_float(p).status == lpm.INFEASIBLE
    q = LinearProgram()
    q.add_variable("x")
    q.add_variable("y")
    q.add_constraint({"x": 1, "y": -1}, LE, 1)
    q.set_objective({"x": 1})
    assert lpm.solve_exact(q).status == lpm.UNBOUNDED
    assert lpm.solve_float(q).status == lpm.UNBOUNDED


def test_degenerate_cycling_example():
    # Beale's example cycles under naive Dantzig pricing
    p = LinearProgram("beale")
    for v in ("x1", "x2", "x3", "x4"):
        p.add_variable(v)
    p.add_constraint({"x1": Fraction(1, 4), "x2": -60, "x3": Fraction(-1, 25), "x4": 9}, LE, 0)
    p.add_constraint({"x1": Fraction(1, 2), "x2": -90, "x3": Fraction(-1, 50), "x4": 3}, LE, 0)
    p.add_constraint({"x3": 1}, LE, 1)
    p.set_objective({"x1": Fraction(3, 4), "x2": -150, "x3": Fraction(1, 50), "x4": -6})
    sol = lpm.solve_exact(p)
    assert sol.objective == Fraction(1, 20)
    assert lpm.check_optimal(p, sol)


def random_bounded_lp(rng, n, m):
    c = [int(v) for v in rng.integers(-3, 6, n)]
    A = [[int(v) for v in rng.integers(-2, 5, n)] for _ in range(m)]
    b = [int(v) for v in rng.integers(0, 10, m)]
    A += [[1 if j == i else 0 for j in range(n)] for i in range(n)]  # box keeps it bounded
    b += [int(v) for v in rng.integers(1, 6, n)]
    p = LinearProgram()
    for j in range(n):
        p.add_variable(f"x{j}")
    for row, bi in zip(A, b):
        p.add_constraint({j: a for j, a in enumerate(row)}, LE, bi)
    p.set_objective({j: cj for j, cj in enumerate(c)})
    return p, c, A, b


def test_exact_matches_vertex_oracle_and_float():
    rng = np.random.default_rng(3)
    for _ in range(40):
        n, m = int(rng.integers(1, 4)), int(rng.integers(1, 4))
        p, c, A, b = random_bounded_lp(rng, n, m)
        ex = lpm.solve_exact(p)
        assert ex.objective == oracles.lp_vertex_max(c, A, b)
        assert lpm.check_optimal(p, ex)
        fl = lpm.solve_float(p)
        assert abs(float(ex.objective) - fl.objective) <= 1e-6
        ver = lpm.verify_exact(p, fl)
        assert ver is not None and ver.objective == ex.objective


def test_basis_path_reproduces_exact_optimum():
    rng = np.random.default_rng(5)
    for _ in range(15):
        p, *_ = random_bounded_lp(rng, 3, 3)
        sol, basis = lpm.solve_basic(p)
        ex = lpm.exact_from_basis(p, basis)  # dual from the transposed basis system
        assert ex is not None and ex.objective == lpm.solve_exact(p).objective


def test_certificate_rejects_wrong_duals():
    p = small_lp()
    sol = lpm.solve_exact(p)
    cert = lpm.certificate(p, [sol["x"], sol["y"]], [Fraction(0)] * 3)
    assert cert["dual_infeasibility"] > 0


def test_model_errors():
    p = LinearProgram()
    p.add_variable("x")
    with pytest.raises(lpm.LPError):
        p.add_variable("x")
    with pytest.raises(lpm.LPError):
        p.add_constraint({"y": 1}, LE, 1)
    with pytest.raises(lpm.LPError):
        p.add_constraint({"x": 1}, "<", 1)


def test_lp_format_export():
    text = lpm.to_lp_format(small_lp())
    assert text.splitlines()[1] == "Maximize"
    assert "-inf <= y <= +inf" in text


def test_presolve_status_is_confirmed():
    # HiGHS presolve calls this unbounded LP infeasible
    p = LinearProgram()
    p.add_variable("x0", lb=-INF, ub=6)
    p.add_variable("x1", ub=5)
    for v in ("x2", "x3", "x4"):
        p.add_variable(v)
    p.add_constraint({"x0": -4, "x1": 5, "x2": 1, "x3": 1, "x4": 3}, GE, 3)
    p.add_constraint({"x0": 2, "x1": 3, "x2": 5, "x3": -4}, GE, 0)
    p.add_constraint({"x0": 4, "x4": 2}, EQ, Fraction(3, 2))
    p.add_constraint({"x0": 1, "x1": -3, "x2": 2, "x3": 5, "x4": -1}, LE, Fraction(-1, 2))
    p.set_objective({"x0": 2, "x1": 4, "x2": 5, "x3": 5, "x4": 2})
    assert lpm.solve_exact(p).status == lpm.UNBOUNDED
    assert lpm.solve_float(p).status == lpm.UNBOUNDED
    assert lpm.solve_basic(p)[0].status == lpm.UNBOUNDED
