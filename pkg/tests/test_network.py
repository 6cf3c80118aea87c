from fractions import Fraction

import pytest

from wiretapnc.flow import max_flow
from wiretapnc.network import (EnumerationTooLarge, ExplicitWiretap, Link, Network, NetworkError,
                               NetworkFormatError, UniformWiretap, fixture, format_rational,
                               normalize_maximal, parse_network, serialize_network, sort_ids,
                               subdivide_links, subdivided_ids, topological_order)

DIAMOND = """
node s; node a; node b; node t
link e1 s a 2
link e2 s b 1/2   # rational capacity
link e3 a t 1
link e4 b t 3
link e5 a b 1
source s
sink t
wiretap set e1
wiretap set e1 e3
wiretap set e2
"""


def test_parse_diamond():
    net, coll = parse_network(DIAMOND)
    assert net.nodes == ("a", "b", "s", "t")
    assert net.link("e2").capacity == Fraction(1, 2)
    assert isinstance(coll, ExplicitWiretap)
    # e1 is dominated by {e1, e3}
    assert normalize_maximal(coll, net) == (frozenset({"e1", "e3"}), frozenset({"e2"}))


def test_roundtrip():
    net, coll = parse_network(DIAMOND)
    again, coll2 = parse_network(serialize_network(net, coll))
    assert again == net
    assert normalize_maximal(coll2, again) == normalize_maximal(coll, net)


def test_natural_order():
    assert sort_ids(["e10", "e2", "e1", "a"]) == ["a", "e1", "e2", "e10"]


@pytest.mark.parametrize("text, line", [
    ("node s\nnode t\nlink e s t -1\nsource s\nsink t\n", 3),
    ("node s\nnode s\n", 2),
    ("node s\nnode t\nlink e s x 1\nsource s\nsink t\n", 3),
    ("node s\nnode t\nlink e s t 1\nsource s\nsink t\nwiretap uniform k=1 e\nwiretap set e\n", 6),
    ("node s\nnode t\nfoo\n", 3),
])
def test_format_errors_carry_line(text, line):
    with pytest.raises(NetworkFormatError) as exc:
        parse_network(text)
    assert exc.value.line == line


def test_cycle_and_self_loop_rejected():
    with pytest.raises(NetworkError, match="cycle"):
        Network(("s", "a", "t"), (Link("1", "s", "a", 1), Link("2", "a", "s", 1)), "s", "t")
    with pytest.raises(NetworkError, match="self-loop"):
        Network(("s", "t"), (Link("1", "s", "s", 1),), "s", "t")
    with pytest.raises(NetworkError, match="duplicate link"):
        Network(("s", "t"), (Link("1", "s", "t", 1), Link("1", "s", "t", 2)), "s", "t")


def test_topological_order_ties_by_id():
    net, _ = fixture("fig4")
    order = topological_order(net)
    assert order[0] == "s" and order[-1] == "d"
    assert order.index("c") < order.index("a") < order.index("b")


def test_uniform_enumeration_and_cap():
    net, coll = fixture("fig1")
    sets = normalize_maximal(coll, net)
    assert len(sets) == 10 and sets[0] == frozenset({"x1", "x2"})
    with pytest.raises(EnumerationTooLarge):
        normalize_maximal(coll, net, cap=9)
    with pytest.raises(NetworkError):
        UniformWiretap(0)


def test_fixture_shapes():
    f1, c1 = fixture("fig1")
    assert (len(f1.nodes), len(f1.links)) == (3, 9)
    f6, c6 = fixture("fig6")
    assert c6.k == 3 and c6.eligible == frozenset(f"x{i}" for i in range(1, 6))
    f4, c4 = fixture("fig4")
    assert c4.k == 3 and c4.eligible == frozenset("12345")
    assert all(l.capacity == 1 for l in f4.links)


def test_subdivide_ids_and_capacity():
    net, _ = parse_network(DIAMOND)
    sub = subdivide_links(net, ["e1", "e4"], 3)
    assert [l.id for l in sub.links if l.id.startswith("e1")] == subdivided_ids("e1", 3)
    assert sub.link("e4_2").capacity == 1
    assert max_flow(sub).value == max_flow(net).value
    with pytest.raises(NetworkError):
        subdivide_links(net, ["nope"], 2)


def test_format_rational():
    assert format_rational(Fraction(12, 5)) == "12/5"
    assert format_rational(3) == "3"
