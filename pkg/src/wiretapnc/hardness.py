"""Clique to interdiction to secrecy reductions, checked by brute force.

An undirected graph ``H`` becomes a three-layer network ``G^H``: one
capacity-2 link from the source to a node per edge (layer A1), two unit
links from each edge node to its endpoint nodes (A2), and a unit link
from each vertex node to the sink (A3). Deleting ``k = |E| - C(r, 2)``
first-layer links leaves max-flow equal to the number of vertices still
touched by an edge, so the worst deletion reaches ``r`` exactly when
``H`` has an ``r``-clique.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Iterable

from .flow import cut_set_bound, max_flow
from .network import (DEFAULT_SET_CAP, EnumerationTooLarge, ExplicitWiretap, Link, Network,
                      NetworkFormatError, UniformWiretap, natural_key, subdivide_links,
                      subdivided_ids)
from .strategies import augment_strategy1

MAX_GRAPH_VERTICES = 12


class GraphError(ValueError):
    pass


@dataclass(frozen=True)
class UndirectedGraph:
    vertices: tuple
    edges: tuple  # (u, v) pairs with u before v in vertex order

    def __post_init__(self):
        verts = tuple(sorted(dict.fromkeys(str(v) for v in self.vertices), key=natural_key))
        if len(verts) != len(self.vertices):
            raise GraphError("duplicate vertex")
        known = set(verts)
        order = {v: i for i, v in enumerate(verts)}
        seen, edges = set(), []
        for u, v in self.edges:
            u, v = str(u), str(v)
            if u not in known or v not in known:
                raise GraphError(f"edge ({u}, {v}) uses an unknown vertex")
            if u == v:
                raise GraphError(f"self-loop at {u}")
            e = (u, v) if order[u] < order[v] else (v, u)
            if e in seen:
                raise GraphError(f"parallel edge {e}")
            seen.add(e)
            edges.append(e)
        edges.sort(key=lambda e: (order[e[0]], order[e[1]]))
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "edges", tuple(edges))

    def degree_positive(self, removed: Iterable[tuple] = ()) -> int:
        """Vertices touched by at least one edge not in ``removed``."""
        removed = set(removed)
        return len({v for e in self.edges if e not in removed for v in e})


def edge_label(e: tuple) -> str:
    return f"{e[0]}-{e[1]}"


def parse_graph(text: str) -> UndirectedGraph:
    """Read ``vertex <id>`` / ``edge <u> <v>`` lines ('#' comments)."""
    verts, edges = [], []
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "vertex" and len(parts) == 2:
            verts.append(parts[1])
        elif parts[0] == "edge" and len(parts) == 3:
            edges.append((parts[1], parts[2]))
        else:
            raise NetworkFormatError(f"cannot parse {line!r}", n)
    try:
        return UndirectedGraph(tuple(verts), tuple(edges))
    except GraphError as e:
        raise NetworkFormatError(str(e)) from None


def serialize_graph(g: UndirectedGraph) -> str:
    return "".join([f"vertex {v}\n" for v in g.vertices] + [f"edge {u} {v}\n" for u, v in g.edges])


@dataclass
class ReductionInstance:
    graph: UndirectedGraph
    r: int
    network: Network
    A1: tuple
    A2: tuple
    A3: tuple
    k: int
    edge_of: dict = field(default_factory=dict)  # A1 link -> graph edge
    subdivided: bool = False

    def wiretap(self) -> UniformWiretap | ExplicitWiretap:
        """Any ``k`` links of the first layer (nothing is tapped when ``k = 0``)."""
        if self.k == 0:
            return ExplicitWiretap(())
        return UniformWiretap(self.k, frozenset(self.A1))


def _check_r(g: UndirectedGraph, r: int) -> int:
    if not 2 <= r <= len(g.vertices):
        raise GraphError(f"r={r} must lie in [2, {len(g.vertices)}]")
    if comb(r, 2) > len(g.edges):
        raise GraphError(f"r={r} needs at least {comb(r, 2)} edges, graph has {len(g.edges)}")
    return len(g.edges) - comb(r, 2)


def clique_to_network(g: UndirectedGraph, r: int) -> ReductionInstance:
    k = _check_r(g, r)
    nodes = ["s", "d"] + [f"i_{edge_label(e)}" for e in g.edges] + [f"j_{v}" for v in g.vertices]
    links, A1, A2, A3, edge_of = [], [], [], [], {}
    for e in g.edges:
        lid = f"a1_{edge_label(e)}"
        links.append(Link(lid, "s", f"i_{edge_label(e)}", Fraction(2)))
        A1.append(lid)
        edge_of[lid] = e
        for v in e:
            lid = f"a2_{edge_label(e)}_{v}"
            links.append(Link(lid, f"i_{edge_label(e)}", f"j_{v}", Fraction(1)))
            A2.append(lid)
    for v in g.vertices:
        lid = f"a3_{v}"
        links.append(Link(lid, f"j_{v}", "d", Fraction(1)))
        A3.append(lid)
    net = Network(tuple(nodes), tuple(links), "s", "d")
    return ReductionInstance(g, r, net, tuple(A1), tuple(A2), tuple(A3), k, edge_of)


def subdivide_instance(inst: ReductionInstance) -> ReductionInstance:
    """Split every A2/A3 link into ``|E|`` parallel links of capacity ``1/|E|``."""
    if inst.subdivided:
        raise GraphError("instance is already subdivided")
    parts = len(inst.graph.edges)
    net = subdivide_links(inst.network, inst.A2 + inst.A3, parts)
    A2 = tuple(i for lid in inst.A2 for i in subdivided_ids(lid, parts))
    A3 = tuple(i for lid in inst.A3 for i in subdivided_ids(lid, parts))
    return ReductionInstance(inst.graph, inst.r, net, inst.A1, A2, A3, inst.k, dict(inst.edge_of), True)


def _guard(g: UndirectedGraph) -> None:
    if len(g.vertices) > MAX_GRAPH_VERTICES:
        raise EnumerationTooLarge(f"{len(g.vertices)} vertices exceeds the guard of {MAX_GRAPH_VERTICES}")


def clique_exists(g: UndirectedGraph, r: int) -> bool:
    _guard(g)
    adj = set(g.edges)
    for sub in itertools.combinations(g.vertices, r):
        if all((u, v) in adj for u, v in itertools.combinations(sub, 2)):
            return True
    return False


@dataclass
class Lemma1Report:
    clique: bool
    reaches_r: bool  # some k-deletion in A1 leaves max-flow exactly r
    min_flow: Fraction
    witness: frozenset | None
    degree_mismatches: int  # flows disagreeing with the positive-degree count
    full_flow: Fraction

    @property
    def agrees(self) -> bool:
        return self.clique == self.reaches_r and self.degree_mismatches == 0


def lemma1_check(g: UndirectedGraph, r: int, cap: int = DEFAULT_SET_CAP) -> Lemma1Report:
    """Enumerate every k-subset of A1 and compare against the clique oracle.

    Each max-flow is also compared with the number of vertices of positive
    degree in ``H`` minus the deleted edges.
    """
    _guard(g)
    inst = clique_to_network(g, r)
    if comb(len(inst.A1), inst.k) > cap:
        raise EnumerationTooLarge(f"C({len(inst.A1)}, {inst.k}) deletions exceeds the cap of {cap}")
    full = max_flow(inst.network).value
    mismatches = int(full != g.degree_positive())
    best, witness, reaches = None, None, False
    for dele in itertools.combinations(inst.A1, inst.k):
        value = max_flow(inst.network, removed=dele).value
        if value != g.degree_positive(inst.edge_of[l] for l in dele):
            mismatches += 1
        if best is None or value < best:
            best, witness = value, frozenset(dele)
        reaches = reaches or value == r
    return Lemma1Report(clique_exists(g, r), reaches, best, witness, mismatches, full)


@dataclass
class SecrecyReport:
    clique: bool
    bound: Fraction  # cut-set bound over k-subsets of A1
    bound_at_least_r: bool
    bound_equals_r: bool
    strategy1_certifies: bool  # min-cut(s, dA) >= 2k + r for every A
    min_virtual_cut: Fraction | None
    subdivided_bound: Fraction | None = None


def strategy1_cut_check(inst: ReductionInstance, rate, cap: int = DEFAULT_SET_CAP) -> tuple[bool, Fraction | None]:
    """Whether every virtual sink of the key-cancelation augmentation has min-cut >= U_A + rate.

    Wiretap sets are the k-subsets of A1, ``U_A`` is the static max-flow
    from the source into the tapped links (``2k`` here) and each tap
    carries its full link capacity.
    """
    net = inst.network
    sets = [frozenset(s) for s in itertools.combinations(inst.A1, inst.k)]
    if len(sets) > cap:
        raise EnumerationTooLarge(f"{len(sets)} wiretap sets exceeds the cap of {cap}")
    aug = augment_strategy1(net, sets)
    z = {l.id: l.capacity for l in net.links}
    U = []
    for a in range(len(sets)):
        probe = aug.concrete(z, R_s=Fraction(rate), U=[Fraction(10**9)] * len(sets))
        U.append(max_flow(probe, net.source, aug.collector(a)).value)
    concrete = aug.concrete(z, R_s=Fraction(rate), U=U)
    ok, worst = True, None
    for a in range(len(sets)):
        cut = max_flow(concrete, net.source, aug.set_sink(a)).value - U[a]
        worst = cut if worst is None else min(worst, cut)
        ok = ok and cut >= rate
    return ok, worst


def secrecy_equivalence_check(g: UndirectedGraph, r: int, subdivided: bool = False,
                              cap: int = DEFAULT_SET_CAP) -> SecrecyReport:
    _guard(g)
    inst = clique_to_network(g, r)
    bound = cut_set_bound(inst.network, inst.wiretap(), cap).value
    ok, worst = strategy1_cut_check(inst, r, cap)
    sub_bound = None
    if subdivided:
        sub = subdivide_instance(inst)
        sub_bound = cut_set_bound(sub.network, sub.wiretap(), cap).value
    return SecrecyReport(clique_exists(g, r), bound, bound >= r, bound == r, ok, worst, sub_bound)


def subdivided_tap_check(g: UndirectedGraph, r: int, samples: int | None = None, seed: int = 0,
                         cap: int = DEFAULT_SET_CAP) -> list[tuple[frozenset, bool]]:
    """Min-cut condition on the subdivided network for wiretap sets that touch the last layer.

    Each checked set mixes at most ``k - 1`` first-layer links with at
    least one subdivided sink link. For each, the key-cancelation
    augmentation must have ``min-cut(s, dA) >= r + R_{s->A}``.
    """
    import numpy as np

    inst = subdivide_instance(clique_to_network(g, r))
    if inst.k < 1:
        return []
    pool = []
    for j in range(1, inst.k + 1):
        for a1 in itertools.combinations(inst.A1, inst.k - j):
            for a3 in itertools.combinations(inst.A3, j):
                pool.append(frozenset(a1 + a3))
                if len(pool) > cap:
                    raise EnumerationTooLarge("too many mixed wiretap sets; pass samples")
    if samples is not None and samples < len(pool):
        rng = np.random.default_rng(seed)
        pool = [pool[i] for i in sorted(rng.choice(len(pool), samples, replace=False))]
    net = inst.network
    out = []
    aug = augment_strategy1(net, pool)
    z = {l.id: l.capacity for l in net.links}
    big = [Fraction(10**9)] * len(pool)
    probe = aug.concrete(z, R_s=Fraction(r), U=big)
    U = [max_flow(probe, net.source, aug.collector(a)).value for a in range(len(pool))]
    concrete = aug.concrete(z, R_s=Fraction(r), U=U)
    for a, A in enumerate(pool):
        out.append((A, max_flow(concrete, net.source, aug.set_sink(a)).value >= r + U[a]))
    return out


# -- sweep -------------------------------------------------------------------


def all_graphs(n: int, labeled: bool = False):
    """Every simple graph on vertices ``1..n``, optionally one per isomorphism class."""
    verts = tuple(str(i) for i in range(1, n + 1))
    pairs = list(itertools.combinations(verts, 2))
    seen = set()
    perms = list(itertools.permutations(range(n))) if not labeled else []
    idx = {v: i for i, v in enumerate(verts)}
    for mask in range(1 << len(pairs)):
        edges = tuple(p for b, p in enumerate(pairs) if mask >> b & 1)
        if not labeled:
            canon = min(tuple(sorted(tuple(sorted((p[idx[u]], p[idx[v]]))) for u, v in edges)) for p in perms)
            if canon in seen:
                continue
            seen.add(canon)
        yield UndirectedGraph(verts, edges)


@dataclass
class SweepRow:
    graph: UndirectedGraph
    r: int
    clique: bool
    lemma1: bool
    bound: Fraction
    bound_at_least_r: bool
    bound_equals_r: bool
    degree_ok: bool
    strategy1_ok: bool


def sweep(max_vertices: int = 5, labeled: bool = False, strategy1: bool = True) -> list[SweepRow]:
    rows = []
    for n in range(2, max_vertices + 1):
        for g in all_graphs(n, labeled):
            for r in range(2, n + 1):
                if comb(r, 2) > len(g.edges):
                    continue
                lem = lemma1_check(g, r)
                inst = clique_to_network(g, r)
                bound = lem.min_flow
                s1 = strategy1_cut_check(inst, r)[0] if strategy1 else True
                rows.append(SweepRow(g, r, lem.clique, lem.reaches_r, bound, bound >= r, bound == r,
                                     lem.degree_mismatches == 0, s1))
    return rows
