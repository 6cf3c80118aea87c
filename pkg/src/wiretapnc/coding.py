"""Linear network codes over GF(q): construction, precoding and secrecy checks.

Coordinates of a code are ordered message first, then key blocks grouped
by injecting node (natural id order). A link carrying ``r`` symbols has an
``r x dim`` matrix of global coding vectors.

Secrecy of a linear code against a wiretap set ``A`` is decided by ranks:
the observation matrix ``N_A`` leaks nothing about the message exactly
when stacking the message selectors on top raises the rank by ``R_s``.
:func:`mutual_information_oracle` checks the same thing the slow way by
enumerating every message/key assignment.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable

import numpy as np

from .flow import max_flow
from .gf import PrimeField, next_prime_above
from .network import (DEFAULT_SET_CAP, EnumerationTooLarge, Network, WiretapCollection,
                      format_rational, normalize_maximal, sort_ids, topological_order)
from .strategies import (AugmentedNetwork, Strategy1Solution, Strategy2Solution,
                         build_strategy2_proof_network)

DEFAULT_ORACLE_CAP = 10**7
DEFAULT_RETRIES = 64


class CodeError(ValueError):
    """A code does not fit the network it is checked against."""


class ConstructionFailed(RuntimeError):
    """Random construction ran out of retries (the field is probably too small)."""


@dataclass
class LinearNetworkCode:
    q: int
    message_dim: int
    key_dims: dict  # node -> number of key symbols injected there
    source: str
    vectors: dict  # link id -> (rows, dim) int64 array
    local: dict = field(default_factory=dict)  # link id -> (rows, inputs at tail)
    precoding: np.ndarray | None = None
    scale: Fraction = Fraction(1)

    @property
    def dim(self) -> int:
        return self.message_dim + sum(self.key_dims.values())

    @property
    def field(self) -> PrimeField:
        return PrimeField(self.q)

    def key_coords(self, node: str) -> list[int]:
        start = self.message_dim
        for v in sort_ids(self.key_dims):
            if v == node:
                return list(range(start, start + self.key_dims[v]))
            start += self.key_dims[v]
        return []

    def injected_coords(self, node: str) -> list[int]:
        coords = list(range(self.message_dim)) if node == self.source else []
        return coords + self.key_coords(node)

    def injected_rows(self, node: str) -> np.ndarray:
        coords = self.injected_coords(node)
        basis = self.precoding if (self.precoding is not None and node == self.source) else np.eye(self.dim, dtype=np.int64)
        return basis[coords].astype(np.int64) if coords else np.zeros((0, self.dim), dtype=np.int64)

    def rows(self, link_id: str) -> np.ndarray:
        try:
            return self.vectors[link_id]
        except KeyError:
            raise CodeError(f"code has no vectors for link {link_id!r}") from None

    def stack(self, link_ids: Iterable[str]) -> np.ndarray:
        mats = [self.rows(l) for l in link_ids]
        mats = [m for m in mats if m.shape[0]]
        return np.vstack(mats) if mats else np.zeros((0, self.dim), dtype=np.int64)

    def inputs(self, network: Network, node: str) -> np.ndarray:
        mats = [self.rows(l.id) for l in network.in_links(node)] + [self.injected_rows(node)]
        mats = [m for m in mats if m.shape[0]]
        return np.vstack(mats) if mats else np.zeros((0, self.dim), dtype=np.int64)

    def message_selectors(self) -> np.ndarray:
        return np.eye(self.dim, dtype=np.int64)[: self.message_dim]


# -- verification ------------------------------------------------------------


@dataclass
class SetVerdict:
    wiretap_set: frozenset
    rank: int
    key_rank: int
    secret: bool


@dataclass
class SecrecyVerdict:
    decodable: bool
    sets: list

    @property
    def secret(self) -> bool:
        return all(s.secret for s in self.sets)

    @property
    def ok(self) -> bool:
        return self.decodable and self.secret


def check_structure(code: LinearNetworkCode, network: Network) -> None:
    """Raise :class:`CodeError` unless every link's vectors match capacity and local rules."""
    F = code.field
    for l in network.links:
        G = code.rows(l.id)
        if G.ndim != 2 or G.shape[1] != code.dim:
            raise CodeError(f"link {l.id!r}: vectors have width {G.shape[-1]}, expected {code.dim}")
        if G.shape[0] > l.capacity * code.scale:
            raise CodeError(f"link {l.id!r} carries {G.shape[0]} symbols over capacity {l.capacity}")
    if code.precoding is not None:
        if F.rank(code.precoding) != code.dim:
            raise CodeError("precoding matrix is singular")
    for lid, L in code.local.items():
        l = network.link(lid)
        inp = code.inputs(network, l.tail)
        if L.shape != (code.rows(lid).shape[0], inp.shape[0]):
            raise CodeError(f"link {lid!r}: local matrix shape {L.shape} does not match inputs")
        if not np.array_equal(F.matmul(L, inp), code.rows(lid) % code.q):
            raise CodeError(f"link {lid!r}: global vectors are not the local combination of its inputs")


def secrecy_of(code: LinearNetworkCode, links: Iterable[str]) -> SetVerdict:
    F = code.field
    links = frozenset(links)
    N = code.stack(sort_ids(links))
    r = F.rank(N)
    key_rank = F.rank(N[:, code.message_dim:]) if N.shape[0] else 0
    with_msg = F.rank(np.vstack([N, code.message_selectors()])) if code.message_dim else r
    return SetVerdict(links, r, key_rank, with_msg == r + code.message_dim)


def decodable(code: LinearNetworkCode, network: Network) -> bool:
    received = code.stack(l.id for l in network.in_links(network.sink))
    return code.field.in_rowspace(code.message_selectors(), received)


def verify_code(code: LinearNetworkCode, network: Network, collection: WiretapCollection,
                cap: int = DEFAULT_SET_CAP) -> SecrecyVerdict:
    """Decodability at the sink and rank-based secrecy for every wiretap set."""
    check_structure(code, network)
    sets = normalize_maximal(collection, network, cap)
    return SecrecyVerdict(decodable(code, network), [secrecy_of(code, A) for A in sets])


# -- exhaustive oracle -------------------------------------------------------


@dataclass
class InformationReport:
    """Exact information quantities from full enumeration.

    ``independent`` is decided on integer counts. Entropies in ``*_symbols``
    are in units of ``log2 q`` bits and are exact Fractions whenever every
    distribution is uniform on a power-of-q support (always the case for
    linear codes); otherwise they are ``None``.
    """

    independent: bool
    mutual_information_bits: float
    mutual_information_symbols: Fraction | None
    conditional_entropy_symbols: Fraction | None  # H(observations | message)
    observation_entropy_symbols: Fraction | None
    assignments: int


def _entropy_bits(counts: np.ndarray, total: int) -> float:
    c = counts[counts > 0].astype(np.float64)
    return float(math.log2(total) - np.sum(c * np.log2(c)) / total)


def _exact_symbols(counts: np.ndarray, q: int) -> Fraction | None:
    c = counts[counts > 0]
    if c.size == 0 or np.any(c != c[0]):
        return None
    support, k = int(c.size), 0
    while support % q == 0:
        support //= q
        k += 1
    return Fraction(k) if support == 1 else None


def mutual_information_oracle(code: LinearNetworkCode, links: Iterable[str], message_dim: int | None = None,
                              cap: int = DEFAULT_ORACLE_CAP, chunk: int = 1 << 18) -> InformationReport:
    """I(message; observations on ``links``) by enumerating all inputs.

    Message and keys are uniform and independent over GF(q).

    Raises:
        EnumerationTooLarge: when ``q**dim`` exceeds ``cap``.
    """
    q, D = code.q, code.dim
    k = code.message_dim if message_dim is None else message_dim
    total = q**D
    if total > cap:
        raise EnumerationTooLarge(f"{q}^{D} = {total} assignments exceeds the oracle cap of {cap}")
    N = code.stack(sort_ids(set(links))) % q
    r = N.shape[0]
    if q ** (k + r) >= 2**62:
        raise EnumerationTooLarge("observation alphabet too large to encode")
    pw_in = q ** np.arange(D, dtype=np.int64)
    pw_obs = q ** np.arange(r, dtype=np.int64)
    pw_msg = q ** np.arange(k, dtype=np.int64)
    counts: dict[int, int] = {}
    for start in range(0, total, chunk):
        idx = np.arange(start, min(total, start + chunk), dtype=np.int64)
        X = (idx[:, None] // pw_in[None, :]) % q
        obs = (X @ N.T) % q if r else np.zeros((len(idx), 0), dtype=np.int64)
        ocode = obs @ pw_obs if r else np.zeros(len(idx), dtype=np.int64)
        mcode = X[:, :k] @ pw_msg if k else np.zeros(len(idx), dtype=np.int64)
        joint = mcode * (q**r) + ocode
        vals, cnt = np.unique(joint, return_counts=True)
        for v, c in zip(vals.tolist(), cnt.tolist()):
            counts[v] = counts.get(v, 0) + c
    keys = np.fromiter(counts.keys(), dtype=np.int64, count=len(counts))
    joint_c = np.fromiter(counts.values(), dtype=np.int64, count=len(counts))
    m_keys, o_keys = keys // (q**r), keys % (q**r)
    mu, m_inv = np.unique(m_keys, return_inverse=True)
    ou, o_inv = np.unique(o_keys, return_inverse=True)
    m_c = np.bincount(m_inv, weights=joint_c).astype(np.int64)
    o_c = np.bincount(o_inv, weights=joint_c).astype(np.int64)
    # exact independence: full product support and p(m,o) = p(m) p(o)
    independent = len(keys) == len(mu) * len(ou) and bool(
        np.all(joint_c.astype(object) * total == m_c[m_inv].astype(object) * o_c[o_inv].astype(object)))
    h_m, h_o, h_j = (_entropy_bits(m_c, total), _entropy_bits(o_c, total), _entropy_bits(joint_c, total))
    mi_bits = 0.0 if independent else h_m + h_o - h_j
    sm, so, sj = _exact_symbols(m_c, q), _exact_symbols(o_c, q), _exact_symbols(joint_c, q)
    exact = None not in (sm, so, sj)
    return InformationReport(
        independent,
        mi_bits,
        (sm + so - sj) if exact else None,
        (sj - sm) if exact else None,
        so,
        total,
    )


# -- random construction -----------------------------------------------------


@dataclass
class _Built:
    vectors: dict
    local: dict
    specs: dict  # node -> list of input descriptors


def _int_caps(network: Network) -> dict:
    caps = {}
    for l in network.links:
        if l.capacity.denominator != 1:
            raise CodeError(f"link {l.id!r} has non-integer capacity {l.capacity}; scale first")
        caps[l.id] = int(l.capacity)
    return caps


def _build(network: Network, injections: dict, dim: int, F: PrimeField, rng: np.random.Generator,
           fixed: dict, basis: np.ndarray | None = None) -> _Built:
    caps = _int_caps(network)
    eye = np.eye(dim, dtype=np.int64) if basis is None else basis
    vectors, local, specs = {}, {}, {}
    for v in topological_order(network):
        spec, mats = [], []
        for l in network.in_links(v):
            G = vectors[l.id]
            spec += [("link", l.id, r) for r in range(G.shape[0])]
            mats.append(G)
        coords = injections.get(v, [])
        spec += [("inject", c) for c in coords]
        if coords:
            mats.append(eye[coords])
        inp = np.vstack(mats) if mats else np.zeros((0, dim), dtype=np.int64)
        specs[v] = spec
        for l in network.out_links(v):
            rows = caps[l.id]
            if l.id in fixed:
                L = fixed[l.id](spec, rows) if callable(fixed[l.id]) else fixed[l.id]
            else:
                L = F.random(rng, (rows, len(spec)))
            L = np.asarray(L, dtype=np.int64).reshape(rows, len(spec))
            local[l.id] = L
            vectors[l.id] = F.matmul(L, inp) if len(spec) else np.zeros((rows, dim), dtype=np.int64)
    return _Built(vectors, local, specs)


def copy_rule(spec: list, rows: int) -> np.ndarray:
    """Forward the first ``rows`` inputs unchanged (relay node)."""
    L = np.zeros((rows, len(spec)), dtype=np.int64)
    for i in range(min(rows, len(spec))):
        L[i, i] = 1
    return L


def construct_multicast_code(network: Network, dim: int, demands: dict, injections: dict | None = None,
                             q: int | None = None, seed: int = 0, retries: int = DEFAULT_RETRIES,
                             fixed: dict | None = None) -> _Built:
    """Random linear code meeting a rank demand at each listed sink.

    With the default ``injections`` the network source injects all ``dim``
    coordinates, and ``demands`` may map a sink to ``None`` meaning
    ``min(dim, maxflow(source, sink))``.

    Raises:
        ConstructionFailed: if no draw within ``retries`` meets every demand.
    """
    if injections is None:
        injections = {network.source: list(range(dim))}
    demands = dict(demands)
    for t, need in demands.items():
        if need is None:
            demands[t] = min(dim, int(max_flow(network, network.source, t).value))
    if q is None:
        q = next_prime_above(max(len(demands), 2))
    F = PrimeField(q)
    rng = np.random.default_rng(seed)
    for _ in range(retries):
        built = _build(network, injections, dim, F, rng, fixed or {})
        if all(_received_rank(built, network, t, F, dim) >= need for t, need in demands.items()):
            built.q = q
            return built
    raise ConstructionFailed(f"no code met the demands in {retries} draws over GF({q}); try a larger field")


def _received_rank(built: _Built, network: Network, node: str, F: PrimeField, dim: int) -> int:
    mats = [built.vectors[l.id] for l in network.in_links(node)]
    mats = [m for m in mats if m.shape[0]]
    return F.rank(np.vstack(mats)) if mats else 0


def _scale(values: Iterable[Fraction]) -> int:
    d = 1
    for v in values:
        d = d * Fraction(v).denominator // math.gcd(d, Fraction(v).denominator)
    return d


def _project(network: Network, built: _Built, code: LinearNetworkCode, link_map: dict, inject_map) -> None:
    """Copy vectors/local rules of augmented links back onto the original links."""
    for l in network.links:
        aug_id = link_map[l.id]
        code.vectors[l.id] = built.vectors[aug_id]
    for l in network.links:
        aug_id = link_map[l.id]
        L = built.local[aug_id]
        spec = built.specs[l.tail]
        canon = []
        for f in network.in_links(l.tail):
            canon += [("link", f.id, r) for r in range(code.vectors[f.id].shape[0])]
        canon += [("inject", c) for c in code.injected_coords(l.tail)]
        pos = {item: i for i, item in enumerate(canon)}
        out = np.zeros((L.shape[0], len(canon)), dtype=np.int64)
        for j, item in enumerate(spec):
            mapped = inject_map(item)
            if mapped is None:
                if np.any(L[:, j]):
                    raise CodeError(f"link {l.id!r} depends on a virtual input {item}")
                continue
            out[:, pos[mapped]] = (out[:, pos[mapped]] + L[:, j]) % code.q
        code.local[l.id] = out


# -- key cancelation codes ---------------------------------------------------


@dataclass
class Strategy1Code:
    code: LinearNetworkCode  # on the original network, precoded
    augmented_vectors: dict  # precoded vectors on the augmented graph
    chosen_set: frozenset
    received: np.ndarray  # M_B (before precoding)
    extended: np.ndarray  # M~_B
    scale: int


def precode_strategy1(built: _Built, aug: AugmentedNetwork, concrete: Network, b: int,
                      message_dim: int, F: PrimeField) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Precoding matrix that makes ``(d', dA[B])`` carry the message.

    Returns ``(M_B, M~_B, P)`` with ``P = M~_B^{-1}``; the rows from
    ``(d', dA[B])`` come first in ``M_B`` so they become the message
    coordinates after precoding.
    """
    sink_b = aug.set_sink(b)
    rate_links = [l.id for l in concrete.in_links(sink_b) if l.tail == aug.sink_copy]
    key_links = [l.id for l in concrete.in_links(sink_b) if l.tail != aug.sink_copy]
    M = np.vstack([built.vectors[i] for i in rate_links + key_links if built.vectors[i].shape[0]])
    if M.shape[0] and F.rank(M) != M.shape[0]:
        raise ValueError("received matrix at the chosen sink is not full row rank")
    if F.rank(M[: sum(built.vectors[i].shape[0] for i in rate_links)]) != message_dim:
        raise ValueError("message rows at the chosen sink are not independent")
    M_ext = F.extend_to_basis(M)
    return M, M_ext, F.inverse(M_ext)


def realize_strategy1(network: Network, solution: Strategy1Solution, q: int | None = None, seed: int = 0,
                      retries: int = DEFAULT_RETRIES) -> Strategy1Code:
    """Explicit key-cancelation code for an optimal strategy-1 solution.

    Rates are scaled by their common denominator so every capacity is an
    integer number of symbols. The sink set ``B`` used for precoding is the
    first set (in order) with the largest ``U_A``.
    """
    aug = solution.augmented
    values = [solution.R_s, *solution.U, *solution.z.values()]
    lam = _scale(values)
    z = {e: Fraction(v) * lam for e, v in solution.z.items()}
    U = [Fraction(u) * lam for u in solution.U]
    R_s = int(Fraction(solution.R_s) * lam)
    R_w = int(max(U)) if U else 0
    concrete = aug.concrete(z, R_s=R_s, U=U)
    dim = R_s + R_w
    fixed = {}
    for l in aug.links:
        if l.kind in ("split_out", "tap") or (l.kind == "rate" and l.set_index is not None):
            fixed[l.id] = copy_rule
    demands = {aug.set_sink(a): R_s + int(U[a]) for a in range(len(aug.sets))}
    if q is None:
        q = next_prime_above(max(len(aug.sets), len(demands), 2))
    F = PrimeField(q)
    built = construct_multicast_code(concrete, dim, demands, {network.source: list(range(dim))},
                                     q, seed, retries, fixed)
    b = max(range(len(U)), key=lambda a: (U[a], -a)) if U else None
    if b is None:
        raise ValueError("strategy-1 code needs at least one wiretap set")
    M, M_ext, P = precode_strategy1(built, aug, concrete, b, R_s, F)
    pre = {k: F.matmul(v, P) for k, v in built.vectors.items()}
    code = LinearNetworkCode(q, R_s, {network.source: R_w} if R_w else {}, network.source, {}, {},
                             precoding=P, scale=Fraction(lam))
    built_pre = _Built(pre, built.local, built.specs)
    _project(network, built_pre, code, {l.id: f"{l.id}:in" for l in network.links},
             lambda item: ("link", item[1][:-4], item[2]) if item[0] == "link" else item)
    return Strategy1Code(code, pre, aug.sets[b], M, M_ext, lam)


# -- local key codes ---------------------------------------------------------


def realize_strategy2(network: Network, solution: Strategy2Solution, q: int | None = None, seed: int = 0,
                      retries: int = DEFAULT_RETRIES) -> LinearNetworkCode:
    """Explicit code for a local-key solution via its multicast proof network."""
    lam = _scale([solution.R_s, *solution.R_w.values(), *solution.z.values()])
    scaled = replace(solution,
                     R_s=Fraction(solution.R_s) * lam,
                     R_w={v: Fraction(r) * lam for v, r in solution.R_w.items()},
                     z={e: Fraction(v) * lam for e, v in solution.z.items()})
    aug, concrete = build_strategy2_proof_network(network, solution.sets, scaled)
    R_s = int(scaled.R_s)
    key_dims = {v: int(r) for v, r in scaled.R_w.items() if r > 0}
    code = LinearNetworkCode(1, R_s, key_dims, network.source, {}, {}, scale=Fraction(lam))
    dim = code.dim
    u_s = aug.names["message_source"]
    injections = {u_s: list(range(R_s))}
    for v in key_dims:
        injections[v] = code.key_coords(v)

    def key_select(node):
        def rule(spec, rows):
            L = np.zeros((rows, len(spec)), dtype=np.int64)
            picks = [j for j, it in enumerate(spec) if it[0] == "inject"]
            for i, j in enumerate(picks[:rows]):
                L[i, j] = 1
            return L
        return rule

    fixed = {}
    for l in aug.links:
        if l.kind in ("split_out", "tap", "message"):
            fixed[l.id] = copy_rule
        elif l.kind == "key_in":
            fixed[l.id] = key_select(l.node)
    demands = {aug.set_sink(a): dim for a in range(len(aug.sets))}
    demands[network.sink] = dim
    if q is None:
        q = next_prime_above(max(len(demands), 2))
    built = construct_multicast_code(concrete, dim, demands, injections, q, seed, retries, fixed)
    code.q = q
    msg_link = f"({u_s},{network.source})"

    def inject_map(item):
        if item[0] == "inject":
            return item
        if item[1] == msg_link:
            return ("inject", item[2])
        if item[1].endswith(":out"):
            return ("link", item[1][:-4], item[2])
        return None

    _project(network, built, code, {l.id: f"{l.id}:in" for l in network.links}, inject_map)
    return code


# -- search over local coefficients -------------------------------------------


def search_secure_code(network: Network, collection: WiretapCollection, message_dim: int, key_dims: dict,
                       q: int, seed: int = 0, tries: int = 20000, cap: int = DEFAULT_SET_CAP) -> LinearNetworkCode:
    """Draw random local coefficients until a decodable, secret code appears.

    Keys may be injected at any node (``key_dims``); every link carries
    as many symbols as its (integer) capacity.

    Raises:
        ConstructionFailed: after ``tries`` unsuccessful draws.
    """
    F = PrimeField(q)
    template = LinearNetworkCode(q, message_dim, dict(key_dims), network.source, {}, {})
    dim = template.dim
    injections = {v: template.injected_coords(v) for v in network.nodes if template.injected_coords(v)}
    sets = normalize_maximal(collection, network, cap)
    rng = np.random.default_rng(seed)
    for _ in range(tries):
        built = _build(network, injections, dim, F, rng, {})
        code = replace(template, vectors=built.vectors, local=built.local)
        if not decodable(code, network):
            continue
        if all(secrecy_of(code, A).secret for A in sets):
            return code
    raise ConstructionFailed(f"no secure code found in {tries} draws over GF({q})")


# -- serialisation -------------------------------------------------------------


def code_to_json(code: LinearNetworkCode) -> str:
    doc = {
        "field": code.q,
        "message_dim": code.message_dim,
        "key_dims": {v: code.key_dims[v] for v in sort_ids(code.key_dims)},
        "source": code.source,
        "scale": format_rational(code.scale),
        "vectors": {k: (code.vectors[k] % code.q).tolist() for k in sort_ids(code.vectors)},
        # idle links need no rule, and [] would lose the input count anyway
        "local": {k: (code.local[k] % code.q).tolist() for k in sort_ids(code.local) if code.local[k].shape[0]},
        "precoding": None if code.precoding is None else (code.precoding % code.q).tolist(),
    }
    # one matrix per line keeps files diffable without exploding every residue
    lines = ["{"]
    items = list(doc.items())
    for i, (k, v) in enumerate(items):
        end = "," if i < len(items) - 1 else ""
        if isinstance(v, dict) and k in ("vectors", "local"):
            inner = [f"  {json.dumps(kk)}: {json.dumps(vv)}" for kk, vv in v.items()]
            lines.append(f" {json.dumps(k)}: {{\n" + ",\n".join(inner) + f"\n }}{end}")
        else:
            lines.append(f" {json.dumps(k)}: {json.dumps(v)}{end}")
    lines.append("}")
    return "\n".join(lines)


def code_from_json(text: str) -> LinearNetworkCode:
    doc = json.loads(text)
    dim = doc["message_dim"] + sum(doc["key_dims"].values())

    def mat(rows):
        return np.array(rows, dtype=np.int64).reshape(-1, dim) if rows else np.zeros((0, dim), dtype=np.int64)

    local = {}
    for k, rows in doc.get("local", {}).items():
        arr = np.array(rows, dtype=np.int64)
        local[k] = arr if arr.ndim == 2 else arr.reshape(len(rows), -1)
    pre = doc.get("precoding")
    return LinearNetworkCode(
        int(doc["field"]), int(doc["message_dim"]), {k: int(v) for k, v in doc["key_dims"].items()},
        doc["source"], {k: mat(v) for k, v in doc["vectors"].items()}, local,
        None if pre is None else np.array(pre, dtype=np.int64), Fraction(doc.get("scale", "1")))


def fixture_code(name: str) -> LinearNetworkCode:
    """Load a shipped, pre-verified code (currently ``fig4``)."""
    from importlib import resources
    return code_from_json(resources.files("wiretapnc.data").joinpath(f"{name}.code.json").read_text())
