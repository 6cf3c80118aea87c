from fractions import Fraction

import pytest

import oracles
from wiretapnc import lp as lpm
from wiretapnc.flow import cut_set_bound, max_flow_value
from wiretapnc.network import ExplicitWiretap, fixture, normalize_maximal
from wiretapnc.strategies import (STATIC_MINCUT, augment_strategy1, augment_strategy2,
                                  build_strategy2_proof_network, global_key_rate,
                                  static_upper_bounds, strategy1_rate, strategy2_rate)


@pytest.fixture(scope="module")
def fig1():
    return fixture("fig1")


@pytest.fixture(scope="module")
def fig6():
    return fixture("fig6")


def test_fig1_rates(fig1):
    net, coll = fig1
    assert strategy1_rate(net, coll).R_s == 3
    assert strategy1_rate(net, coll, STATIC_MINCUT).R_s == 3
    assert strategy2_rate(net, coll).R_s == Fraction(12, 5)
    assert global_key_rate(net, coll).R_s == Fraction(12, 5)


def test_fig6_rates(fig6):
    net, coll = fig6
    assert strategy1_rate(net, coll).R_s == Fraction(8, 5)
    assert strategy1_rate(net, coll, STATIC_MINCUT).R_s == 1
    assert strategy2_rate(net, coll).R_s == 2
    assert global_key_rate(net, coll).R_s == Fraction(8, 5)


def test_float_path_agrees(fig1, fig6):
    for net, coll in (fig1, fig6):
        exact = strategy2_rate(net, coll).R_s
        approx = strategy2_rate(net, coll, exact=False).R_s
        assert abs(float(exact) - approx) < 1e-7


def test_rates_below_cut_set_bound(fig1, fig6):
    for net, coll in (fig1, fig6):
        bound = cut_set_bound(net, coll).value
        assert bound == oracles.cut_set_bound(net, normalize_maximal(coll, net))
        for f in (strategy1_rate, strategy2_rate, global_key_rate):
            assert f(net, coll).R_s <= bound


def test_strategy1_solution_is_a_feasible_flow(fig1, fig6):
    for net, coll in (fig1, fig6):
        sol = strategy1_rate(net, coll)
        concrete = sol.augmented.concrete(sol.z, R_s=sol.R_s, U=sol.U)
        for a in range(len(sol.sets)):
            got = max_flow_value(concrete, net.source, sol.augmented.set_sink(a))
            assert got == sol.R_s + sol.U[a]
        assert max_flow_value(net.with_capacities(sol.z)) >= sol.R_s
        assert all(0 <= sol.z[l.id] <= l.capacity for l in net.links)


def test_strategy2_sink_and_sets(fig6):
    net, coll = fig6
    sol = strategy2_rate(net, coll)
    # the sink flow carries the message plus every key, within z
    into_d = sum(sol.flow_d[l.id] for l in net.in_links(net.sink))
    assert into_d == sol.R_s + sol.total_key_rate
    assert all(0 <= sol.flow_d[l.id] <= sol.z[l.id] for l in net.links)
    for v in net.nodes:
        if v == net.sink:
            continue
        out = sum(sol.flow_d[l.id] for l in net.out_links(v)) - sum(sol.flow_d[l.id] for l in net.in_links(v))
        assert out == sol.R_w[v] + (sol.R_s if v == net.source else 0)
    for A in sol.sets:
        assert sum(sol.z[e] for e in A) <= sol.total_key_rate


def test_global_key_puts_keys_at_source(fig6):
    net, coll = fig6
    sol = global_key_rate(net, coll)
    assert all(v == 0 for node, v in sol.R_w.items() if node != net.source)


def test_augmented_shapes(fig1):
    net, coll = fig1
    sets = normalize_maximal(coll, net)
    a1 = augment_strategy1(net, sets)
    a2 = augment_strategy2(net, sets)
    # each link is split in two, one d' plus (t_A, d_A) per set
    assert len(a1.nodes) == len(net.nodes) + len(net.links) + 1 + 2 * len(sets)
    assert len(a2.nodes) == len(net.nodes) + len(net.links) + len(sets)
    taps = [l for l in a1.links if l.kind == "tap"]
    assert len(taps) == sum(len(s) for s in sets)


def test_static_bounds(fig6):
    net, coll = fig6
    sets = normalize_maximal(coll, net)
    aug = augment_strategy1(net, sets)
    for a, U in enumerate(static_upper_bounds(net, aug)):
        assert U == sum(net.link(e).capacity for e in sets[a]) or U < sum(net.link(e).capacity for e in sets[a])


def test_proof_network(fig6):
    net, coll = fig6
    sol = strategy2_rate(net, coll)
    aug, concrete = build_strategy2_proof_network(net, sol.sets, sol)
    assert concrete.source == aug.names["message_source"]
    kinds = {l.kind for l in aug.links}
    assert {"message", "key_fill"} <= kinds


def test_empty_collection_gives_plain_capacity(fig1):
    net, _ = fig1
    sol = strategy1_rate(net, ExplicitWiretap(()))
    assert sol.R_s == max_flow_value(net)


def test_bad_umode(fig1):
    net, coll = fig1
    with pytest.raises(ValueError):
        strategy1_rate(net, coll, "nope")
    assert lpm.OPTIMAL == strategy2_rate(net, coll).status
