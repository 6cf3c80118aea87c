"""Capacitated DAG model, wiretap collections, fixtures and the ``.net`` format.

A network file is line oriented (``;`` also separates statements, ``#``
starts a comment)::

    node s
    node d
    link e1 s d 3/2
    source s
    sink d
    wiretap uniform k=1 all        # or: wiretap uniform k=1 e1 e2 ...
    wiretap set e1                 # repeatable, explicit collection

Capacities are exact rationals: integers, ``a/b`` fractions or decimals.
"""

from __future__ import annotations

import heapq
import itertools
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from typing import Iterable, Union

DEFAULT_SET_CAP = 10**6


class NetworkError(ValueError):
    """Structural problem with a network or wiretap collection."""


class NetworkFormatError(NetworkError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


class EnumerationTooLarge(RuntimeError):
    """A combinatorial enumeration would exceed its configured cap."""


_NAT = re.compile(r"(\d+)")


def natural_key(name: str) -> tuple:
    """Sort key that orders ``e2`` before ``e10``."""
    return tuple((0, int(p), "") if p.isdigit() else (1, 0, p) for p in _NAT.split(name) if p)


def sort_ids(ids: Iterable[str]) -> list[str]:
    return sorted(ids, key=natural_key)


def parse_rational(text: str) -> Fraction:
    try:
        value = Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a rational number: {text!r}") from exc
    return value


def format_rational(value: Fraction | int) -> str:
    value = Fraction(value)
    return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"


@dataclass(frozen=True)
class Link:
    id: str
    tail: str
    head: str
    capacity: Fraction


@dataclass(frozen=True)
class Network:
    """Directed acyclic network with a single source and sink.

    Links are stored in natural id order; parallel links are allowed.
    """

    nodes: tuple[str, ...]
    links: tuple[Link, ...]
    source: str
    sink: str
    _index: dict = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        nodes = tuple(sort_ids(set(self.nodes)))
        if len(nodes) != len(self.nodes):
            raise NetworkError("duplicate node id")
        links = tuple(
            Link(l.id, l.tail, l.head, Fraction(l.capacity))
            for l in sorted(self.links, key=lambda l: natural_key(l.id))
        )
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "links", links)
        node_set = set(nodes)
        if self.source not in node_set:
            raise NetworkError(f"unknown source node {self.source!r}")
        if self.sink not in node_set:
            raise NetworkError(f"unknown sink node {self.sink!r}")
        if self.source == self.sink:
            raise NetworkError("source and sink must differ")
        index = {}
        for l in links:
            if l.id in index:
                raise NetworkError(f"duplicate link id {l.id!r}")
            if l.tail not in node_set or l.head not in node_set:
                raise NetworkError(f"link {l.id!r} references an undeclared node")
            if l.tail == l.head:
                raise NetworkError(f"link {l.id!r} is a self-loop")
            if l.capacity < 0:
                raise NetworkError(f"link {l.id!r} has negative capacity")
            index[l.id] = l
        object.__setattr__(self, "_index", index)
        _kahn(nodes, links)  # raises on cycles

    def link(self, link_id: str) -> Link:
        try:
            return self._index[link_id]
        except KeyError:
            raise NetworkError(f"unknown link id {link_id!r}") from None

    @property
    def link_ids(self) -> tuple[str, ...]:
        return tuple(l.id for l in self.links)

    def has_link(self, link_id: str) -> bool:
        return link_id in self._index

    def in_links(self, node: str) -> list[Link]:
        return [l for l in self.links if l.head == node]

    def out_links(self, node: str) -> list[Link]:
        return [l for l in self.links if l.tail == node]

    def with_capacities(self, capacities: dict[str, Fraction]) -> "Network":
        """Copy with some link capacities replaced."""
        links = [Link(l.id, l.tail, l.head, Fraction(capacities.get(l.id, l.capacity))) for l in self.links]
        return Network(self.nodes, tuple(links), self.source, self.sink)

    def scaled(self, factor: Fraction) -> "Network":
        factor = Fraction(factor)
        return self.with_capacities({l.id: l.capacity * factor for l in self.links})


def _kahn(nodes: tuple[str, ...], links: tuple[Link, ...]) -> list[str]:
    indeg = {v: 0 for v in nodes}
    succ: dict[str, list[str]] = {v: [] for v in nodes}
    for l in links:
        indeg[l.head] += 1
        succ[l.tail].append(l.head)
    heap = [(natural_key(v), v) for v, d in indeg.items() if d == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        _, v = heapq.heappop(heap)
        order.append(v)
        for w in succ[v]:
            indeg[w] -= 1
            if indeg[w] == 0:
                heapq.heappush(heap, (natural_key(w), w))
    if len(order) != len(nodes):
        stuck = sort_ids(v for v, d in indeg.items() if d > 0)
        raise NetworkError(f"cycle detected among nodes {stuck}")
    return order


def topological_order(network: Network) -> list[str]:
    """Topological node order; among ready nodes the smallest id goes first."""
    return _kahn(network.nodes, network.links)


# -- wiretap collections -----------------------------------------------------


@dataclass(frozen=True)
class ExplicitWiretap:
    sets: tuple[frozenset, ...]

    def __init__(self, sets: Iterable[Iterable[str]] = ()):
        object.__setattr__(self, "sets", tuple(frozenset(s) for s in sets))


@dataclass(frozen=True)
class UniformWiretap:
    """Any ``k`` links out of ``eligible`` (``None`` means every link)."""

    k: int
    eligible: frozenset | None = None

    def __post_init__(self):
        if self.eligible is not None:
            object.__setattr__(self, "eligible", frozenset(self.eligible))
        if self.k < 1:
            raise NetworkError("uniform wiretap k must be positive")


WiretapCollection = Union[ExplicitWiretap, UniformWiretap]


def validate_collection(collection: WiretapCollection, network: Network) -> None:
    if isinstance(collection, UniformWiretap):
        eligible = network.link_ids if collection.eligible is None else collection.eligible
        for lid in eligible:
            network.link(lid)
        if collection.k > len(eligible):
            raise NetworkError(f"k={collection.k} exceeds the {len(eligible)} eligible links")
    else:
        for s in collection.sets:
            for lid in s:
                network.link(lid)


def set_key(s: Iterable[str]) -> tuple:
    return tuple(natural_key(x) for x in sort_ids(s))


def normalize_maximal(collection: WiretapCollection, network: Network,
                      cap: int = DEFAULT_SET_CAP) -> tuple[frozenset, ...]:
    """Expand to explicit maximal sets, sorted lexicographically by link id.

    Raises:
        EnumerationTooLarge: if more than ``cap`` sets would be produced.
    """
    validate_collection(collection, network)
    if isinstance(collection, UniformWiretap):
        eligible = sort_ids(network.link_ids if collection.eligible is None else collection.eligible)
        count = math.comb(len(eligible), collection.k)
        if count > cap:
            raise EnumerationTooLarge(f"{count} wiretap sets exceeds the cap of {cap}")
        # combinations of a sorted list come out in lexicographic order
        return tuple(frozenset(c) for c in itertools.combinations(eligible, collection.k))
    if len(collection.sets) > cap:
        raise EnumerationTooLarge(f"{len(collection.sets)} wiretap sets exceeds the cap of {cap}")
    unique = sorted(set(collection.sets), key=lambda s: (-len(s), set_key(s)))
    kept: list[frozenset] = []
    for s in unique:
        if not any(s <= t for t in kept):
            kept.append(s)
    return tuple(sorted(kept, key=set_key))


def as_explicit(sets: Iterable[Iterable[str]]) -> ExplicitWiretap:
    return ExplicitWiretap(sets)


# -- transformations ---------------------------------------------------------


def subdivide_links(network: Network, targets: Iterable[str], parts: int) -> Network:
    """Replace each target link by ``parts`` parallel links of capacity ``c/parts``.

    New links are named ``<id>_<i>`` for ``i = 1..parts``.
    """
    if parts < 1:
        raise NetworkError("parts must be at least 1")
    targets = set(targets)
    for lid in targets:
        network.link(lid)
    links = []
    for l in network.links:
        if l.id not in targets:
            links.append(l)
            continue
        for i in range(1, parts + 1):
            links.append(Link(f"{l.id}_{i}", l.tail, l.head, l.capacity / parts))
    return Network(network.nodes, tuple(links), network.source, network.sink)


def subdivided_ids(link_id: str, parts: int) -> list[str]:
    return [f"{link_id}_{i}" for i in range(1, parts + 1)]


# -- file format -------------------------------------------------------------


def _statements(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        for stmt in line.split(";"):
            toks = stmt.split()
            if toks:
                yield lineno, toks


def parse_network(text: str) -> tuple[Network, WiretapCollection]:
    """Parse the ``.net`` format into a network and its wiretap collection."""
    nodes: list[str] = []
    node_lines: dict[str, int] = {}
    links: list[Link] = []
    link_lines: dict[str, int] = {}
    source = sink = None
    uniform: UniformWiretap | None = None
    explicit: list[frozenset] = []
    set_lines: list[int] = []
    uniform_line = None
    for lineno, toks in _statements(text):
        kw = toks[0]
        if kw == "node":
            if len(toks) != 2:
                raise NetworkFormatError("expected 'node <id>'", lineno)
            if toks[1] in node_lines:
                raise NetworkFormatError(f"duplicate node id {toks[1]!r}", lineno)
            node_lines[toks[1]] = lineno
            nodes.append(toks[1])
        elif kw == "link":
            if len(toks) != 5:
                raise NetworkFormatError("expected 'link <id> <tail> <head> <capacity>'", lineno)
            lid, tail, head, cap = toks[1:]
            if lid in link_lines:
                raise NetworkFormatError(f"duplicate link id {lid!r}", lineno)
            try:
                capacity = parse_rational(cap)
            except ValueError as exc:
                raise NetworkFormatError(str(exc), lineno) from None
            if capacity < 0:
                raise NetworkFormatError(f"negative capacity on link {lid!r}", lineno)
            link_lines[lid] = lineno
            links.append(Link(lid, tail, head, capacity))
        elif kw in ("source", "sink"):
            if len(toks) != 2:
                raise NetworkFormatError(f"expected '{kw} <id>'", lineno)
            if kw == "source":
                source = toks[1]
            else:
                sink = toks[1]
        elif kw == "wiretap":
            if len(toks) >= 3 and toks[1] == "uniform":
                m = re.fullmatch(r"k=(\d+)", toks[2])
                if not m or len(toks) < 4:
                    raise NetworkFormatError("expected 'wiretap uniform k=<int> (all | <id>...)'", lineno)
                k = int(m.group(1))
                if k < 1:
                    raise NetworkFormatError("wiretap k must be positive", lineno)
                eligible = None if toks[3:] == ["all"] else frozenset(toks[3:])
                if uniform is not None:
                    raise NetworkFormatError("more than one uniform wiretap statement", lineno)
                uniform, uniform_line = UniformWiretap(k, eligible), lineno
            elif len(toks) >= 2 and toks[1] == "set":
                explicit.append(frozenset(toks[2:]))
                set_lines.append(lineno)
            else:
                raise NetworkFormatError("expected 'wiretap uniform ...' or 'wiretap set ...'", lineno)
        else:
            raise NetworkFormatError(f"unknown statement {kw!r}", lineno)

    if uniform is not None and explicit:
        raise NetworkFormatError("cannot mix uniform and explicit wiretap statements", uniform_line)
    for l in links:
        for end in (l.tail, l.head):
            if end not in node_lines:
                raise NetworkFormatError(f"link {l.id!r} references unknown node {end!r}", link_lines[l.id])
    if source is None or sink is None:
        raise NetworkFormatError("missing source or sink statement")
    for end in (source, sink):
        if end not in node_lines:
            raise NetworkFormatError(f"unknown node {end!r}")
    try:
        network = Network(tuple(nodes), tuple(links), source, sink)
    except NetworkError as exc:
        raise NetworkFormatError(str(exc)) from None
    collection: WiretapCollection = uniform if uniform is not None else ExplicitWiretap(explicit)
    if uniform is not None:
        ids = network.link_ids if uniform.eligible is None else uniform.eligible
        for lid in ids:
            if not network.has_link(lid):
                raise NetworkFormatError(f"wiretap references unknown link {lid!r}", uniform_line)
        if uniform.k > len(ids):
            raise NetworkFormatError(f"k={uniform.k} exceeds the number of eligible links", uniform_line)
    for s, lineno in zip(explicit, set_lines):
        for lid in s:
            if not network.has_link(lid):
                raise NetworkFormatError(f"wiretap references unknown link {lid!r}", lineno)
    return network, collection


def serialize_network(network: Network, collection: WiretapCollection | None = None) -> str:
    out = [f"node {v}" for v in network.nodes]
    out += [f"link {l.id} {l.tail} {l.head} {format_rational(l.capacity)}" for l in network.links]
    out += [f"source {network.source}", f"sink {network.sink}"]
    if isinstance(collection, UniformWiretap):
        targets = "all" if collection.eligible is None else " ".join(sort_ids(collection.eligible))
        out.append(f"wiretap uniform k={collection.k} {targets}")
    elif collection is not None:
        for s in sorted(collection.sets, key=set_key):
            out.append("wiretap set " + " ".join(sort_ids(s)))
    return "\n".join(out) + "\n"


def read_network(path) -> tuple[Network, WiretapCollection]:
    with open(path, encoding="utf-8") as fh:
        return parse_network(fh.read())


# -- fixtures ----------------------------------------------------------------

FIXTURES = ("fig1", "fig4", "fig6")


def fixture_text(name: str) -> str:
    if name not in FIXTURES:
        raise NetworkError(f"unknown fixture {name!r}; choose from {', '.join(FIXTURES)}")
    return resources.files("wiretapnc.data").joinpath(f"{name}.net").read_text(encoding="utf-8")


def fixture(name: str) -> tuple[Network, WiretapCollection]:
    """Example networks: ``fig1`` (key cancelation), ``fig4`` (gap), ``fig6`` (local keys)."""
    return parse_network(fixture_text(name))
