from fractions import Fraction

import numpy as np
import pytest

import oracles
from wiretapnc.coding import (CodeError, ConstructionFailed, LinearNetworkCode, code_from_json, code_to_json,
                              construct_multicast_code, decodable, fixture_code, mutual_information_oracle,
                              realize_strategy1, realize_strategy2, search_secure_code, secrecy_of,
                              verify_code)
from wiretapnc.gf import PrimeField
from wiretapnc.network import EnumerationTooLarge, ExplicitWiretap, Link, Network, fixture, normalize_maximal
from wiretapnc.strategies import strategy1_rate, strategy2_rate


def two_link_net():
    net = Network(("s", "d"), (Link("e1", "s", "d", Fraction(1)), Link("e2", "s", "d", Fraction(1))), "s", "d")
    return net, ExplicitWiretap((frozenset({"e1"}), frozenset({"e2"})))


def pad_code(q=5, secret=True):
    # coordinates (m, k)
    e1 = [[1, 1]] if secret else [[1, 0]]
    vectors = {"e1": np.array(e1, dtype=np.int64), "e2": np.array([[0, 1]], dtype=np.int64)}
    local = {"e1": np.array(e1, dtype=np.int64), "e2": np.array([[0, 1]], dtype=np.int64)}
    return LinearNetworkCode(q, 1, {"s": 1}, "s", vectors, local)


def test_one_time_pad_is_secret():
    net, coll = two_link_net()
    v = verify_code(pad_code(), net, coll)
    assert v.ok
    for A in ("e1", "e2"):
        rep = mutual_information_oracle(pad_code(), [A])
        assert rep.independent and rep.mutual_information_symbols == 0
    both = mutual_information_oracle(pad_code(), ["e1", "e2"])
    assert not both.independent and both.mutual_information_symbols == 1


def test_plain_routing_leaks():
    net, coll = two_link_net()
    v = verify_code(pad_code(secret=False), net, coll)
    assert v.decodable and not v.secret
    assert [s.secret for s in v.sets] == [False, True]
    rep = mutual_information_oracle(pad_code(secret=False), ["e1"])
    assert abs(rep.mutual_information_bits - np.log2(5)) < 1e-12


def test_structure_errors():
    net, coll = two_link_net()
    bad = pad_code()
    bad.vectors["e1"] = np.array([[1, 2]], dtype=np.int64)  # local rule says (1, 1)
    with pytest.raises(CodeError):
        verify_code(bad, net, coll)
    wide = pad_code()
    wide.vectors["e2"] = np.array([[0, 1], [1, 0]], dtype=np.int64)
    wide.local.pop("e2")
    with pytest.raises(CodeError):
        verify_code(wide, net, coll)
    missing = pad_code()
    missing.vectors.pop("e2")
    with pytest.raises(CodeError):
        verify_code(missing, net, coll)


def test_rank_criterion_matches_enumeration():
    rng = np.random.default_rng(3)
    for _ in range(60):
        q = int(rng.choice([2, 3, 5]))
        k = int(rng.integers(1, 3))
        keys = int(rng.integers(0, 3))
        dim = k + keys
        links = {f"e{i}": rng.integers(0, q, size=(int(rng.integers(1, 3)), dim), dtype=np.int64)
                 for i in range(3)}
        code = LinearNetworkCode(q, k, {"s": keys} if keys else {}, "s", links)
        A = [e for e in links if rng.random() < 0.6] or ["e0"]
        verdict = secrecy_of(code, A)
        rep = mutual_information_oracle(code, A)
        obs = np.vstack([links[e] for e in sorted(A)]).tolist()
        mi, indep = oracles.mutual_information_bits(q, k, dim, obs)
        assert verdict.secret == rep.independent == indep
        assert abs(rep.mutual_information_bits - mi) < 1e-9
        # symbols of leakage equal the rank gain from the message selectors
        F = PrimeField(q)
        N = np.array(obs)
        gain = F.rank(N) + k - F.rank(np.vstack([N, np.eye(dim, dtype=np.int64)[:k]]))
        assert rep.mutual_information_symbols == gain


def test_oracle_cap():
    code = pad_code(q=101)
    with pytest.raises(EnumerationTooLarge):
        mutual_information_oracle(code, ["e1"], cap=100)


def test_multicast_construction_meets_demands():
    net, _ = fixture("fig1")
    built = construct_multicast_code(net, 4, {"d": None}, q=7, seed=1)
    F = PrimeField(7)
    got = np.vstack([built.vectors[l.id] for l in net.in_links("d")])
    assert F.rank(got) == 4  # min(dim, maxflow)


def test_construction_failure_reported():
    net, _ = fixture("fig1")
    with pytest.raises(ConstructionFailed):
        construct_multicast_code(net, 4, {"d": 5}, q=2, retries=3)


def test_fig1_strategy1_code():
    net, coll = fixture("fig1")
    sol = strategy1_rate(net, coll)
    res = realize_strategy1(net, sol)
    code = res.code
    assert code.message_dim == 3
    assert verify_code(code, net, coll).ok
    F = code.field
    assert F.rank(code.precoding) == code.dim
    # precoding is a change of basis: ranks of every tap are unchanged
    for A in normalize_maximal(coll, net):
        raw = np.vstack([res.augmented_vectors[f"{e}:in"] for e in sorted(A)])
        assert F.rank(raw) == F.rank(code.stack(sorted(A)))
    rep = mutual_information_oracle(code, ["x1", "x2"])
    assert rep.independent and rep.conditional_entropy_symbols == 2


def test_fig6_strategy2_code():
    net, coll = fixture("fig6")
    sol = strategy2_rate(net, coll)
    code = realize_strategy2(net, sol)
    assert code.message_dim == 2
    assert verify_code(code, net, coll).ok


def test_fig4_fixture_code():
    net, coll = fixture("fig4")
    code = fixture_code("fig4")
    assert code.q == 7 and code.message_dim == 1
    assert verify_code(code, net, coll).ok
    for A in normalize_maximal(coll, net):
        assert mutual_information_oracle(code, A).independent


def test_search_small_pad():
    net, coll = two_link_net()
    code = search_secure_code(net, coll, 1, {"s": 1}, q=3, seed=0)
    assert verify_code(code, net, coll).ok
    with pytest.raises(ConstructionFailed):
        # no keys: the single message symbol must be visible on some link
        search_secure_code(net, coll, 1, {}, q=3, tries=50)


def test_json_roundtrip():
    code = fixture_code("fig4")
    again = code_from_json(code_to_json(code))
    assert code_to_json(again) == code_to_json(code)
    net, coll = fixture("fig1")
    c1 = realize_strategy1(net, strategy1_rate(net, coll)).code
    c2 = code_from_json(code_to_json(c1))
    assert np.array_equal(c1.precoding, c2.precoding)
    assert all(np.array_equal(c1.vectors[k] % c1.q, c2.vectors[k]) for k in c1.vectors)
    assert decodable(c2, net)
