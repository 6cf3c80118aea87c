"""Exact max-flow / min-cut, the cut-set bound and worst-case interdiction.

Rational capacities are scaled by their common denominator so the integer
kernels in :mod:`wiretapnc._accel` do the work; results are mapped back
to :class:`fractions.Fraction` without loss.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np

from . import _accel
from .network import (DEFAULT_SET_CAP, Network, NetworkError, WiretapCollection,
                      normalize_maximal, sort_ids)

_INT64_SAFE = 2**62


@dataclass(frozen=True)
class Cut:
    source_side: frozenset
    links: tuple[str, ...]
    capacity: Fraction


@dataclass(frozen=True)
class FlowResult:
    value: Fraction
    flow: dict  # link id -> Fraction
    cut: Cut


@dataclass(frozen=True)
class CutSetBound:
    value: Fraction
    wiretap_set: frozenset
    cut: Cut


@dataclass(frozen=True)
class InterdictionResult:
    worst_set: frozenset
    residual: Fraction


def _lcd(values: Iterable[Fraction]) -> int:
    d = 1
    for v in values:
        d = d * v.denominator // math.gcd(d, v.denominator)
    return d


def max_flow(network: Network, frm: str | None = None, to: str | None = None,
             removed: Iterable[str] = (), use_jit: bool | None = None) -> FlowResult:
    """Exact maximum flow from ``frm`` to ``to`` (defaults: source, sink).

    Links in ``removed`` get capacity zero but keep their ids. The returned
    cut is the residual-reachable side, so its capacity equals the flow.
    """
    frm = network.source if frm is None else frm
    to = network.sink if to is None else to
    if frm == to:
        raise NetworkError("max_flow endpoints must differ")
    pos = {v: i for i, v in enumerate(network.nodes)}
    if frm not in pos or to not in pos:
        raise NetworkError("unknown max_flow endpoint")
    removed = set(removed)
    for lid in removed:
        network.link(lid)
    caps = [Fraction(0) if l.id in removed else l.capacity for l in network.links]
    scale = _lcd(caps)
    icaps = [int(c * scale) for c in caps]
    tails = np.array([pos[l.tail] for l in network.links], dtype=np.int64)
    heads = np.array([pos[l.head] for l in network.links], dtype=np.int64)
    if sum(icaps) >= _INT64_SAFE:
        raise OverflowError("scaled capacities exceed the int64 kernel range")
    flow, seen = _accel.maxflow_int(len(network.nodes), tails, heads,
                                    np.array(icaps, dtype=np.int64), pos[frm], pos[to], use_jit)
    flows = {l.id: Fraction(int(f), scale) for l, f in zip(network.links, flow)}
    side = frozenset(v for v, s in zip(network.nodes, seen) if s)
    cut_links = tuple(l.id for l in network.links if l.tail in side and l.head not in side)
    cut_cap = sum((caps[i] for i, l in enumerate(network.links) if l.id in set(cut_links)), Fraction(0))
    value = sum((flows[l.id] for l in network.links if l.tail == frm), Fraction(0)) - \
        sum((flows[l.id] for l in network.links if l.head == frm), Fraction(0))
    return FlowResult(value, flows, Cut(side, cut_links, cut_cap))


def max_flow_value(network: Network, frm: str | None = None, to: str | None = None,
                   removed: Iterable[str] = ()) -> Fraction:
    return max_flow(network, frm, to, removed).value


def _flow_for_set(args):
    network, wset = args
    return max_flow(network, removed=wset)


def _per_set_flows(network: Network, sets: tuple[frozenset, ...], parallel: int | None):
    if parallel and parallel > 1 and len(sets) > 1:
        with ProcessPoolExecutor(max_workers=parallel) as pool:
            return list(pool.map(_flow_for_set, [(network, s) for s in sets],
                                 chunksize=max(1, len(sets) // (4 * parallel))))
    return [max_flow(network, removed=s) for s in sets]


def cut_set_bound(network: Network, collection: WiretapCollection,
                  cap: int = DEFAULT_SET_CAP, parallel: int | None = None) -> CutSetBound:
    """Minimum over wiretap sets of the max-flow with that set deleted.

    This is the cut-set upper bound on secrecy capacity, and also the
    capacity when the wiretap set is known to the legitimate nodes. Ties
    go to the lexicographically smallest set.
    """
    sets = normalize_maximal(collection, network, cap)
    if not sets:
        res = max_flow(network)
        return CutSetBound(res.value, frozenset(), res.cut)
    results = _per_set_flows(network, sets, parallel)
    best = min(range(len(sets)), key=lambda i: results[i].value)  # first minimum wins
    return CutSetBound(results[best].value, sets[best], results[best].cut)


def interdiction_worst_set(network: Network, collection: WiretapCollection,
                           cap: int = DEFAULT_SET_CAP, parallel: int | None = None) -> InterdictionResult:
    bound = cut_set_bound(network, collection, cap, parallel)
    return InterdictionResult(bound.wiretap_set, bound.value)


def brute_force_min_cut(network: Network, frm: str | None = None, to: str | None = None) -> Fraction:
    """Minimum cut by enumerating every vertex bipartition (test oracle)."""
    frm = network.source if frm is None else frm
    to = network.sink if to is None else to
    others = [v for v in network.nodes if v not in (frm, to)]
    best = None
    for mask in range(1 << len(others)):
        side = {frm} | {v for i, v in enumerate(others) if mask >> i & 1}
        cap = sum((l.capacity for l in network.links if l.tail in side and l.head not in side), Fraction(0))
        if best is None or cap < best:
            best = cap
    return best


def flow_is_valid(network: Network, result: FlowResult, frm: str | None = None, to: str | None = None) -> bool:
    frm = network.source if frm is None else frm
    to = network.sink if to is None else to
    for l in network.links:
        f = result.flow[l.id]
        if f < 0 or f > l.capacity:
            return False
    for v in network.nodes:
        if v in (frm, to):
            continue
        net = sum((result.flow[l.id] for l in network.links if l.tail == v), Fraction(0)) - \
            sum((result.flow[l.id] for l in network.links if l.head == v), Fraction(0))
        if net != 0:
            return False
    return True


__all__ = ["Cut", "FlowResult", "CutSetBound", "InterdictionResult", "max_flow", "max_flow_value",
           "cut_set_bound", "interdiction_worst_set", "brute_force_min_cut", "flow_is_valid", "sort_ids"]
