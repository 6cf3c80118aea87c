"""Achievable secure rates: key cancelation, local key injection, global key.

Both strategies work on an augmented copy of the network in which every
link ``e = (i, j)`` is split by a node ``v[e]`` so that a wiretap set can
be wired to a virtual node through *tap* links. Tap links carry the same
rate ``z_e`` as the link they observe.

Key cancelation (source keys, possibly canceled inside the network) adds,
per wiretap set ``A``: a collector ``t[A]`` fed by the taps, a sink
``dA[A]`` fed by ``t[A]`` (capacity ``U_A``) and by ``d'`` (capacity
``R_s``), where ``d'`` hangs off the real sink with capacity ``R_s``.
Local key injection wires the taps of ``A`` straight into ``dA[A]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from . import lp as lpmod
from .flow import cut_set_bound, max_flow
from .network import (DEFAULT_SET_CAP, Link, Network, NetworkError, WiretapCollection,
                      normalize_maximal, sort_ids)

SUM_Z, STATIC_MINCUT = "sum_z", "static_mincut"
U_MODES = (SUM_Z, STATIC_MINCUT)


def set_label(s: Iterable[str]) -> str:
    return ",".join(sort_ids(s))


@dataclass(frozen=True)
class AugLink:
    id: str
    tail: str
    head: str
    kind: str  # split_in | split_out | tap | collect | rate | message | key_in | key_fill
    link: str | None = None  # original link for split/tap links
    set_index: int | None = None
    node: str | None = None  # key-injecting node for key_in links


@dataclass
class AugmentedNetwork:
    """Augmented graph with symbolic capacities.

    Capacities are resolved by :meth:`concrete` from rate values
    ``z`` (per original link), ``R_s``, ``U`` (per set) and ``R_w``
    (per node).
    """

    base: Network
    kind: str  # "strategy1" | "strategy2" | "strategy2_proof"
    sets: tuple[frozenset, ...]
    nodes: list[str]
    links: list[AugLink]
    names: dict = field(default_factory=dict)

    def split_node(self, link_id: str) -> str:
        return f"v[{link_id}]"

    def collector(self, a: int) -> str:
        return f"t[{set_label(self.sets[a])}]"

    def set_sink(self, a: int) -> str:
        return f"dA[{set_label(self.sets[a])}]"

    @property
    def sink_copy(self) -> str:
        return self.names["sink_copy"]

    def links_for_set(self, a: int) -> list[AugLink]:
        """Links that a flow towards ``dA`` of set ``a`` may use."""
        out = []
        for l in self.links:
            if l.kind in ("split_in", "split_out"):
                out.append(l)
            elif l.set_index == a and l.kind in ("tap", "collect", "key_fill"):
                out.append(l)
            elif l.kind == "rate" and (l.set_index is None or l.set_index == a):
                out.append(l)
            elif l.kind == "message" and (l.set_index is None or l.set_index == a):
                out.append(l)
        return out

    def capacity(self, l: AugLink, z: dict, R_s=None, U=None, R_w=None) -> Fraction:
        if l.kind in ("split_in", "split_out", "tap"):
            return Fraction(z[l.link])
        if l.kind == "collect":
            return Fraction(U[l.set_index])
        if l.kind in ("rate", "message"):
            return Fraction(R_s)
        if l.kind == "key_in":
            return Fraction(R_w.get(l.node, 0))
        if l.kind == "key_fill":
            total = sum((Fraction(v) for v in R_w.values()), Fraction(0))
            value = total - sum((Fraction(z[e]) for e in self.sets[l.set_index]), Fraction(0))
            if value < 0:
                raise NetworkError(f"negative key-fill capacity {value} for set {set_label(self.sets[l.set_index])}")
            return value
        raise ValueError(l.kind)

    def concrete(self, z: dict, R_s=None, U=None, R_w=None) -> Network:
        links = tuple(Link(l.id, l.tail, l.head, self.capacity(l, z, R_s, U, R_w)) for l in self.links)
        src = self.names.get("message_source", self.base.source)
        return Network(tuple(self.nodes), links, src, self.base.sink)


def _fresh(name: str, taken: set) -> str:
    while name in taken:
        name += "~"
    taken.add(name)
    return name


def _split(network: Network, aug_nodes: list, aug_links: list) -> None:
    for l in network.links:
        v = f"v[{l.id}]"
        aug_nodes.append(v)
        aug_links.append(AugLink(f"{l.id}:in", l.tail, v, "split_in", link=l.id))
        aug_links.append(AugLink(f"{l.id}:out", v, l.head, "split_out", link=l.id))


def augment_strategy1(network: Network, sets: Iterable[frozenset]) -> AugmentedNetwork:
    sets = tuple(frozenset(s) for s in sets)
    taken = set(network.nodes)
    nodes = list(network.nodes)
    links: list[AugLink] = []
    _split(network, nodes, links)
    taken.update(nodes)
    dprime = _fresh(network.sink + "'", taken)
    nodes.append(dprime)
    links.append(AugLink(f"({network.sink},{dprime})", network.sink, dprime, "rate"))
    aug = AugmentedNetwork(network, "strategy1", sets, nodes, links, {"sink_copy": dprime})
    for a, s in enumerate(sets):
        t, dA = aug.collector(a), aug.set_sink(a)
        nodes += [t, dA]
        for e in sort_ids(s):
            links.append(AugLink(f"tap{a}[{e}]", f"v[{e}]", t, "tap", link=e, set_index=a))
        links.append(AugLink(f"({t},{dA})", t, dA, "collect", set_index=a))
        links.append(AugLink(f"({dprime},{dA})", dprime, dA, "rate", set_index=a))
    return aug


def augment_strategy2(network: Network, sets: Iterable[frozenset]) -> AugmentedNetwork:
    sets = tuple(frozenset(s) for s in sets)
    nodes = list(network.nodes)
    links: list[AugLink] = []
    _split(network, nodes, links)
    aug = AugmentedNetwork(network, "strategy2", sets, nodes, links, {})
    for a, s in enumerate(sets):
        dA = aug.set_sink(a)
        nodes.append(dA)
        for e in sort_ids(s):
            links.append(AugLink(f"tap{a}[{e}]", f"v[{e}]", dA, "tap", link=e, set_index=a))
    return aug


# -- solutions ---------------------------------------------------------------


@dataclass
class Strategy1Solution:
    R_s: Fraction
    R_w: Fraction
    z: dict
    U: list
    flows: list  # per set: {aug link id: flow}
    u_mode: str
    sets: tuple
    augmented: AugmentedNetwork
    status: str = lpmod.OPTIMAL


@dataclass
class Strategy2Solution:
    R_s: Fraction
    R_w: dict  # node -> key rate
    z: dict
    flows: list  # per set
    flow_d: dict
    sets: tuple
    augmented: AugmentedNetwork
    global_key: bool = False
    status: str = lpmod.OPTIMAL

    @property
    def total_key_rate(self) -> Fraction:
        return sum(self.R_w.values(), Fraction(0))


def _solve(lp: lpmod.LinearProgram, exact: bool):
    sol = lpmod.solve_exact(lp) if exact else lpmod.solve_float(lp)
    return sol


def static_upper_bounds(network: Network, aug: AugmentedNetwork) -> list[Fraction]:
    """Max-flow from the source to each collector under the original capacities."""
    caps = {l.id: l.capacity for l in network.links}
    full = aug.concrete(caps, R_s=0, U=[0] * len(aug.sets))
    return [max_flow(full, network.source, aug.collector(a)).value for a in range(len(aug.sets))]


def strategy1_lp(network: Network, sets: tuple, u_mode: str = SUM_Z):
    if u_mode not in U_MODES:
        raise ValueError(f"u_mode must be one of {U_MODES}")
    aug = augment_strategy1(network, sets)
    prog = lpmod.LinearProgram("strategy1")
    prog.add_variable("R_s")
    for l in network.links:
        prog.add_variable(f"z[{l.id}]", 0, l.capacity)
    static = static_upper_bounds(network, aug) if u_mode == STATIC_MINCUT else None
    s = network.source
    for a, A in enumerate(aug.sets):
        sub = aug.links_for_set(a)
        fname = {l.id: f"f{a}[{l.id}]" for l in sub}
        for l in sub:
            prog.add_variable(fname[l.id])
        # U_A as a linear form
        U_terms = {f"z[{e}]": 1 for e in A} if u_mode == SUM_Z else {}
        U_const = 0 if u_mode == SUM_Z else static[a]
        for l in sub:
            f = fname[l.id]
            if l.kind in ("split_in", "split_out", "tap"):
                prog.add_constraint({f: 1, f"z[{l.link}]": -1}, lpmod.LE, 0)
            elif l.kind == "collect":
                prog.add_constraint({f: 1, **{k: -v for k, v in U_terms.items()}}, lpmod.LE, U_const)
            elif l.kind == "rate":
                prog.add_constraint({f: 1, "R_s": -1}, lpmod.LE, 0)
        sink_a = aug.set_sink(a)
        sub_nodes = {x for l in sub for x in (l.tail, l.head)}
        for v in sorted(sub_nodes):
            if v == sink_a:
                continue
            terms: dict = {}
            for l in sub:
                if l.tail == v:
                    terms[fname[l.id]] = terms.get(fname[l.id], 0) + 1
                if l.head == v:
                    terms[fname[l.id]] = terms.get(fname[l.id], 0) - 1
            if v == s:
                terms["R_s"] = -1
                for k, c in U_terms.items():
                    terms[k] = terms.get(k, 0) - c
                prog.add_constraint(terms, lpmod.EQ, U_const, name=f"cons{a}[{v}]")
            else:
                prog.add_constraint(terms, lpmod.EQ, 0, name=f"cons{a}[{v}]")
    prog.set_objective({"R_s": 1})
    return prog, aug, static


def strategy1_rate(network: Network, collection: WiretapCollection, u_mode: str = SUM_Z,
                   exact: bool = True, cap: int = DEFAULT_SET_CAP) -> Strategy1Solution:
    """Optimal rate of the key-cancelation LP.

    ``u_mode`` picks the stand-in for the source-to-wiretap max-flow:
    ``sum_z`` (the sum of rates on the set, a variable) or
    ``static_mincut`` (max-flow to the collector under the original
    capacities, a constant).
    """
    # no wiretapper still needs one set so the rate is tied to a flow
    sets = normalize_maximal(collection, network, cap) or (frozenset(),)
    prog, aug, static = strategy1_lp(network, sets, u_mode)
    sol = _solve(prog, exact)
    if sol.status == lpmod.INFEASIBLE:
        zero = {l.id: Fraction(0) for l in network.links}
        return Strategy1Solution(Fraction(0), Fraction(0), zero, [Fraction(0)] * len(sets), [], u_mode, sets, aug,
                                 status=lpmod.INFEASIBLE)
    if not sol.optimal:
        raise lpmod.LPError(f"strategy-1 LP ended with status {sol.status}")
    z = {l.id: sol[f"z[{l.id}]"] for l in network.links}
    if u_mode == SUM_Z:
        U = [sum((z[e] for e in A), Fraction(0) if exact else 0.0) for A in sets]
    else:
        U = list(static)
    flows = [{l.id: sol[f"f{a}[{l.id}]"] for l in aug.links_for_set(a)} for a in range(len(sets))]
    R_w = max(U) if U else (Fraction(0) if exact else 0.0)
    return Strategy1Solution(sol["R_s"], R_w, z, U, flows, u_mode, sets, aug)


def strategy2_lp(network: Network, sets: tuple, global_key: bool = False):
    aug = augment_strategy2(network, sets)
    prog = lpmod.LinearProgram("global_key" if global_key else "strategy2")
    s, d = network.source, network.sink
    prog.add_variable("R_s")
    key_nodes = [v for v in network.nodes if v != d]
    for v in key_nodes:
        prog.add_variable(f"R_w[{v}]", 0, 0 if (global_key and v != s) else lpmod.INF)
    for l in network.links:
        prog.add_variable(f"z[{l.id}]", 0, l.capacity)
    for a, A in enumerate(aug.sets):
        sub = [l for l in aug.links if l.kind in ("split_in", "split_out") or l.set_index == a]
        fname = {l.id: f"f{a}[{l.id}]" for l in sub}
        for l in sub:
            prog.add_variable(fname[l.id])
            prog.add_constraint({fname[l.id]: 1, f"z[{l.link}]": -1}, lpmod.LE, 0)
        sink_a = aug.set_sink(a)
        sub_nodes = {x for l in sub for x in (l.tail, l.head)}
        for v in sorted(sub_nodes):
            terms: dict = {}
            for l in sub:
                if l.tail == v:
                    terms[fname[l.id]] = terms.get(fname[l.id], 0) + 1
                if l.head == v:
                    terms[fname[l.id]] = terms.get(fname[l.id], 0) - 1
            if v == sink_a:
                for e in A:
                    terms[f"z[{e}]"] = terms.get(f"z[{e}]", 0) + 1
                prog.add_constraint(terms, lpmod.EQ, 0, name=f"keys{a}[{v}]")
            else:
                if v in key_nodes:
                    terms[f"R_w[{v}]"] = -1
                prog.add_constraint(terms, lpmod.LE, 0, name=f"keys{a}[{v}]")
    for l in network.links:
        prog.add_variable(f"fd[{l.id}]")
        prog.add_constraint({f"fd[{l.id}]": 1, f"z[{l.id}]": -1}, lpmod.LE, 0)
    for v in network.nodes:
        if v == d:
            continue
        terms = {}
        for l in network.links:
            if l.tail == v:
                terms[f"fd[{l.id}]"] = terms.get(f"fd[{l.id}]", 0) + 1
            if l.head == v:
                terms[f"fd[{l.id}]"] = terms.get(f"fd[{l.id}]", 0) - 1
        terms[f"R_w[{v}]"] = -1
        if v == s:
            terms["R_s"] = -1
        prog.add_constraint(terms, lpmod.EQ, 0, name=f"sink_flow[{v}]")
    prog.set_objective({"R_s": 1})
    return prog, aug


def strategy2_rate(network: Network, collection: WiretapCollection, exact: bool = True,
                   cap: int = DEFAULT_SET_CAP, global_key: bool = False) -> Strategy2Solution:
    """Optimal rate of the local-key-injection LP (keys decoded at the sink)."""
    sets = normalize_maximal(collection, network, cap) or (frozenset(),)
    prog, aug = strategy2_lp(network, sets, global_key)
    sol = _solve(prog, exact)
    if not sol.optimal:
        raise lpmod.LPError(f"strategy-2 LP ended with status {sol.status}")
    d = network.sink
    R_w = {v: sol[f"R_w[{v}]"] for v in network.nodes if v != d}
    z = {l.id: sol[f"z[{l.id}]"] for l in network.links}
    flows = []
    for a in range(len(sets)):
        flows.append({l.id: sol[f"f{a}[{l.id}]"] for l in aug.links
                      if l.kind in ("split_in", "split_out") or l.set_index == a})
    flow_d = {l.id: sol[f"fd[{l.id}]"] for l in network.links}
    return Strategy2Solution(sol["R_s"], R_w, z, flows, flow_d, sets, aug, global_key)


def global_key_rate(network: Network, collection: WiretapCollection, exact: bool = True,
                    cap: int = DEFAULT_SET_CAP) -> Strategy2Solution:
    """Local-key LP restricted to keys injected at the source only."""
    return strategy2_rate(network, collection, exact, cap, global_key=True)


def best_achievable(network: Network, collection: WiretapCollection, exact: bool = True,
                    cap: int = DEFAULT_SET_CAP) -> dict:
    """All strategy rates next to the cut-set bound.

    The best value is the max of the individual strategies; no combined
    optimisation is attempted.
    """
    bound = cut_set_bound(network, collection, cap)
    rates = {
        "strategy1_sum_z": strategy1_rate(network, collection, SUM_Z, exact, cap).R_s,
        "strategy1_static_mincut": strategy1_rate(network, collection, STATIC_MINCUT, exact, cap).R_s,
        "strategy2": strategy2_rate(network, collection, exact, cap).R_s,
        "global_key": global_key_rate(network, collection, exact, cap).R_s,
    }
    best_name = max(rates, key=lambda k: rates[k])
    best = rates[best_name]
    if best > bound.value:
        raise AssertionError(f"achievable rate {best} exceeds the cut-set bound {bound.value}")
    return {
        "rates": rates,
        "best": best,
        "best_strategy": best_name,
        "cut_set_bound": bound.value,
        "bound_witness": sort_ids(bound.wiretap_set),
        "tight": best == bound.value,
    }


def build_strategy2_proof_network(network: Network, sets: Iterable[frozenset],
                                  solution: Strategy2Solution) -> tuple[AugmentedNetwork, Network]:
    """Multicast instance whose solvability certifies a local-key solution.

    A virtual message source ``u_s`` feeds the source and every set sink
    with ``R_s``; a virtual key hub ``u_k`` collects ``R_w[v]`` from each
    node and tops every set sink up by ``sum(R_w) - sum_{e in A} z_e``.

    Returns the symbolic augmentation and its concrete capacities.

    Raises:
        NetworkError: if some top-up capacity is negative.
    """
    sets = tuple(frozenset(s) for s in sets)
    base = augment_strategy2(network, sets)
    nodes = list(base.nodes)
    links = list(base.links)
    taken = set(nodes)
    u_s = _fresh("u_s", taken)
    u_k = _fresh("u_k", taken)
    nodes += [u_s, u_k]
    aug = AugmentedNetwork(network, "strategy2_proof", sets, nodes, links,
                           {"message_source": u_s, "key_hub": u_k})
    links.append(AugLink(f"({u_s},{network.source})", u_s, network.source, "message"))
    for v in sort_ids(solution.R_w):
        if solution.R_w[v] > 0:
            links.append(AugLink(f"({v},{u_k})", v, u_k, "key_in", node=v))
    for a in range(len(sets)):
        dA = aug.set_sink(a)
        links.append(AugLink(f"({u_s},{dA})", u_s, dA, "message", set_index=a))
        links.append(AugLink(f"({u_k},{dA})", u_k, dA, "key_fill", set_index=a))
    concrete = aug.concrete(solution.z, R_s=solution.R_s, R_w=solution.R_w)
    return aug, concrete
