"""Acceptance criteria, each run at its stated tolerance.

Every criterion prints one PASS/FAIL line in the pytest terminal summary
(section "acceptance criteria"). Run directly with
``python tests/test_acceptance.py`` or as part of the full suite.
The entropy criteria solve a 67,596-row LP twice and take a few minutes.
"""

import sys
from fractions import Fraction

import numpy as np
import pytest

import oracles
from wiretapnc import lp as lpm
from wiretapnc.coding import (LinearNetworkCode, fixture_code, mutual_information_oracle, realize_strategy1,
                              search_secure_code, secrecy_of, verify_code)
from wiretapnc.entropy import build_fig4_system, fixture_system, prove_bound
from wiretapnc.flow import cut_set_bound, max_flow_value
from wiretapnc.hardness import sweep
from wiretapnc.network import Link, Network, fixture, normalize_maximal, subdivide_links
from wiretapnc.strategies import best_achievable, global_key_rate, strategy1_rate, strategy2_rate

FIVE_THIRDS = Fraction(5, 3)


@pytest.fixture(scope="module")
def fig4_bound():
    # shared by criteria 5 and 7
    return prove_bound(fixture_system("fig4"))


@pytest.mark.criterion("C1")
def test_c1_cut_set_bounds(criterion):
    for name, want in (("fig4", 2), ("fig1", 3), ("fig6", 2)):
        net, coll = fixture(name)
        got = cut_set_bound(net, coll).value
        criterion.check(name, isinstance(got, Fraction) and got == want, f"{got}")
    criterion.assert_ok()


@pytest.mark.criterion("C2")
def test_c2_strategy1_fig1(criterion):
    net, coll = fixture("fig1")
    got = strategy1_rate(net, coll).R_s
    criterion.check("fig1 sum_z", got == 3, f"{got}")
    criterion.assert_ok()


@pytest.mark.criterion("C3")
def test_c3_global_key(criterion):
    net, coll = fixture("fig1")
    g1, s1 = global_key_rate(net, coll).R_s, strategy1_rate(net, coll).R_s
    criterion.check("fig1", g1 == Fraction(12, 5), f"{g1}")
    criterion.check("fig1 < strategy1", g1 < s1 == 3, f"{g1} < {s1}")
    net, coll = fixture("fig6")
    g6, s6 = global_key_rate(net, coll).R_s, strategy2_rate(net, coll).R_s
    criterion.check("fig6", g6 == Fraction(8, 5), f"{g6}")
    criterion.check("fig6 < strategy2", g6 < s6 == 2, f"{g6} < {s6}")
    criterion.assert_ok()


@pytest.mark.criterion("C4")
def test_c4_strategy2_fig6(criterion):
    net, coll = fixture("fig6")
    got = strategy2_rate(net, coll).R_s
    criterion.check("fig6", got == 2, f"{got}")
    criterion.assert_ok()


@pytest.mark.criterion("C5")
@pytest.mark.slow
def test_c5_entropy_prover(criterion, fig4_bound):
    res = fig4_bound
    criterion.check("constraints", res.num_constraints == 67596 + 36, f"{res.num_constraints}")
    criterion.check("float", res.optimal and abs(res.optimum - 5 / 3) <= 1e-6, f"{res.optimum:.9f}")
    criterion.check("exact", res.exact_optimum == FIVE_THIRDS, f"{res.exact_optimum}")
    abl = prove_bound(build_fig4_system(secrecy=False))
    criterion.check("ablation", abl.exact_optimum == 3 and abs(abl.optimum - 3) <= 1e-6,
                    f"{abl.exact_optimum}")
    criterion.assert_ok()


@pytest.mark.criterion("C6")
def test_c6_codes(criterion):
    net, coll = fixture("fig1")
    res = realize_strategy1(net, strategy1_rate(net, coll))
    code = res.code
    dims = (code.message_dim, sum(code.key_dims.values()))
    criterion.check("fig1 rates", dims == (3, 2), f"R_s, R_w = {dims}")
    v = verify_code(code, net, coll)
    criterion.check("fig1 rank", v.ok and len(v.sets) == 10, f"{sum(s.secret for s in v.sets)}/10 sets")
    reps = [mutual_information_oracle(code, A) for A in normalize_maximal(coll, net)]
    criterion.check("fig1 oracle I=0", all(r.independent and r.mutual_information_symbols == 0 for r in reps))
    criterion.check("fig1 H(pair|msg)=2", all(r.conditional_entropy_symbols == 2 for r in reps))

    net, coll = fixture("fig4")
    for label, c4 in (("fig4 shipped", fixture_code("fig4")),
                      ("fig4 search", search_secure_code(net, coll, 1, {"s": 2, "a": 1}, 7, seed=0))):
        v = verify_code(c4, net, coll)
        indep = all(mutual_information_oracle(c4, A).independent for A in normalize_maximal(coll, net))
        criterion.check(label, c4.q == 7 and c4.message_dim == 1 and v.ok and len(v.sets) == 10 and indep,
                        f"GF({c4.q}) rate {c4.message_dim}")
    criterion.assert_ok()


@pytest.mark.criterion("C7")
@pytest.mark.slow
def test_c7_gap(criterion, fig4_bound):
    net, coll = fixture("fig4")
    rep = best_achievable(net, coll)
    bound = rep["cut_set_bound"]
    criterion.check("bound", bound == 2, f"{bound}")
    criterion.check("best < bound", rep["best"] < bound, f"{rep['best']} ({rep['best_strategy']})")
    ub = fig4_bound.exact_optimum
    criterion.check("outer bound", ub is not None and rep["best"] <= ub < bound, f"{rep['best']} <= {ub} < {bound}")
    criterion.assert_ok()


@pytest.mark.criterion("C8")
@pytest.mark.slow
def test_c8_hardness_sweep(criterion):
    rows = sweep(max_vertices=5)
    lem = sum(r.clique != r.lemma1 for r in rows)
    ge = sum(r.clique != r.bound_at_least_r for r in rows)
    eq = sum(r.clique != r.bound_equals_r for r in rows)
    deg = sum(not r.degree_ok for r in rows)
    criterion.check("clique<=>lemma1", lem == 0, f"{lem} mismatches of {len(rows)}")
    criterion.check("clique<=>bound>=r", ge == 0, f"{ge} mismatches; bound==r gives {eq}")
    criterion.check("degree fact", deg == 0, f"{deg} failures")
    criterion.assert_ok()


def _random_dag(rng, n):
    nodes = [f"v{i}" for i in range(n)]
    links = []
    for i in range(n):
        for j in range(i + 1, n):
            for _ in range(int(rng.integers(0, 3)) if rng.random() < 0.5 else 0):
                links.append(Link(f"e{len(links)}", nodes[i], nodes[j],
                                  Fraction(int(rng.integers(0, 7)), int(rng.integers(1, 4)))))
    return Network(tuple(nodes), tuple(links), nodes[0], nodes[-1])


def _random_lp(rng):
    n, m = int(rng.integers(2, 6)), int(rng.integers(1, 6))
    p = lpm.LinearProgram()
    for j in range(n):
        free = rng.random() < 0.15
        p.add_variable(f"x{j}", lb=-lpm.INF if free else 0, ub=int(rng.integers(1, 9)) if rng.random() < 0.5 else lpm.INF)
    for _ in range(m):
        coef = {f"x{j}": int(rng.integers(-4, 6)) for j in range(n)}
        rel = rng.choice([lpm.LE, lpm.LE, lpm.GE, lpm.EQ])
        p.add_constraint(coef, rel, Fraction(int(rng.integers(-3, 12)), int(rng.integers(1, 4))))
    p.set_objective({f"x{j}": int(rng.integers(-3, 6)) for j in range(n)})
    return p


@pytest.mark.criterion("C9")
def test_c9_property_suites(criterion):
    rng = np.random.default_rng(2024)
    bad = 0
    for _ in range(1000):
        net = _random_dag(rng, int(rng.integers(2, 9)))
        bad += max_flow_value(net) != oracles.network_min_cut(net)
    criterion.check("maxflow vs brute force", bad == 0, f"{bad}/1000 disagree")

    bad, statuses = 0, {}
    for _ in range(200):
        p = _random_lp(rng)
        ex, fl = lpm.solve_exact(p), lpm.solve_float(p)
        statuses[ex.status] = statuses.get(ex.status, 0) + 1
        if ex.status != fl.status or (ex.optimal and abs(float(ex.objective) - fl.objective) > 1e-6):
            bad += 1
    mix = ",".join(f"{k}:{v}" for k, v in sorted(statuses.items()))
    criterion.check("exact vs float LP", bad == 0, f"{bad}/200 disagree; {mix}")

    bad = 0
    for _ in range(200):
        q = int(rng.choice([2, 3, 5, 7]))
        k = int(rng.integers(1, 3))
        keys = int(rng.integers(0, 4 if q <= 3 else 3))
        dim = k + keys
        vectors = {f"e{i}": rng.integers(0, q, size=(int(rng.integers(1, 3)), dim), dtype=np.int64)
                   for i in range(4)}
        code = LinearNetworkCode(q, k, {"s": keys} if keys else {}, "s", vectors)
        A = sorted(e for e in vectors if rng.random() < 0.5) or ["e0"]
        mi, indep = oracles.mutual_information_bits(q, k, dim, np.vstack([vectors[e] for e in A]).tolist())
        rep = mutual_information_oracle(code, A)
        if secrecy_of(code, A).secret != indep or rep.independent != indep or abs(rep.mutual_information_bits - mi) > 1e-9:
            bad += 1
    criterion.check("rank vs MI oracle", bad == 0, f"{bad}/200 disagree")

    bad = 0
    for _ in range(200):
        net = _random_dag(rng, int(rng.integers(2, 8)))
        if not net.links:
            continue
        pick = [l.id for l in net.links if rng.random() < 0.5]
        parts = int(rng.integers(1, 5))
        bad += max_flow_value(subdivide_links(net, pick, parts)) != max_flow_value(net)
    criterion.check("subdivision keeps max-flow", bad == 0, f"{bad} disagree")
    criterion.assert_ok()


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v", "-p", "no:cacheprovider"]))
