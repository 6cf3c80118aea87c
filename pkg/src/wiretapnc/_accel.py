"""Hot integer kernels: augmenting-path max-flow and modular row reduction.

Each kernel has a numba ``@njit`` implementation and a pure numpy/Python
fallback with the same visiting order, so both paths return identical
results. Set ``WIRETAPNC_JIT=0`` to force the fallback (numba is also
skipped automatically when it is not importable).
"""

from __future__ import annotations

import os
from collections import deque

import numpy as np

try:  # pragma: no cover - exercised implicitly
    import numba
except ImportError:  # pragma: no cover
    numba = None

JIT_ENV = "WIRETAPNC_JIT"


def jit_enabled() -> bool:
    return numba is not None and os.environ.get(JIT_ENV, "1").strip().lower() not in ("0", "false", "no", "off")


# -- max-flow ----------------------------------------------------------------


def build_adjacency(n_nodes: int, tails: np.ndarray, heads: np.ndarray):
    """CSR residual adjacency; arc ``2e`` is link e forward, ``2e+1`` backward.

    Arcs of a node appear in increasing link index, which fixes the BFS
    tie-break to link order.
    """
    m = len(tails)
    deg = np.zeros(n_nodes + 1, dtype=np.int64)
    np.add.at(deg, tails + 1, 1)
    np.add.at(deg, heads + 1, 1)
    ptr = np.cumsum(deg)
    arcs = np.empty(2 * m, dtype=np.int64)
    fill = ptr[:-1].copy()
    for e in range(m):
        t, h = tails[e], heads[e]
        arcs[fill[t]] = 2 * e
        fill[t] += 1
        arcs[fill[h]] = 2 * e + 1
        fill[h] += 1
    return ptr, arcs


def _maxflow_python(n_nodes, tails, heads, caps, src, dst, ptr, arcs):
    tails = tails.tolist()
    heads = heads.tolist()
    caps = caps.tolist()
    ptr = ptr.tolist()
    arcs = arcs.tolist()
    flow = [0] * len(caps)
    while True:
        pred = [-1] * n_nodes
        seen = [False] * n_nodes
        seen[src] = True
        queue = deque([src])
        while queue and not seen[dst]:
            u = queue.popleft()
            for k in range(ptr[u], ptr[u + 1]):
                a = arcs[k]
                e = a >> 1
                if a & 1:
                    v, res = tails[e], flow[e]
                else:
                    v, res = heads[e], caps[e] - flow[e]
                if res > 0 and not seen[v]:
                    seen[v] = True
                    pred[v] = a
                    queue.append(v)
        if not seen[dst]:
            break
        # bottleneck
        bott = -1
        v = dst
        while v != src:
            a = pred[v]
            e = a >> 1
            if a & 1:
                res, v = flow[e], heads[e]
            else:
                res, v = caps[e] - flow[e], tails[e]
            if bott < 0 or res < bott:
                bott = res
        v = dst
        while v != src:
            a = pred[v]
            e = a >> 1
            if a & 1:
                flow[e] -= bott
                v = heads[e]
            else:
                flow[e] += bott
                v = tails[e]
    return np.array(flow, dtype=np.int64), np.array(seen, dtype=np.bool_)


def _maxflow_kernel(n_nodes, tails, heads, caps, src, dst, ptr, arcs):
    m = caps.shape[0]
    flow = np.zeros(m, dtype=np.int64)
    pred = np.empty(n_nodes, dtype=np.int64)
    seen = np.zeros(n_nodes, dtype=np.bool_)
    queue = np.empty(n_nodes, dtype=np.int64)
    while True:
        for i in range(n_nodes):
            pred[i] = -1
            seen[i] = False
        seen[src] = True
        qh = 0
        qt = 1
        queue[0] = src
        while qh < qt and not seen[dst]:
            u = queue[qh]
            qh += 1
            for k in range(ptr[u], ptr[u + 1]):
                a = arcs[k]
                e = a >> 1
                if a & 1:
                    v = tails[e]
                    res = flow[e]
                else:
                    v = heads[e]
                    res = caps[e] - flow[e]
                if res > 0 and not seen[v]:
                    seen[v] = True
                    pred[v] = a
                    queue[qt] = v
                    qt += 1
        if not seen[dst]:
            break
        bott = -1
        v = dst
        while v != src:
            a = pred[v]
            e = a >> 1
            if a & 1:
                res = flow[e]
                v = heads[e]
            else:
                res = caps[e] - flow[e]
                v = tails[e]
            if bott < 0 or res < bott:
                bott = res
        v = dst
        while v != src:
            a = pred[v]
            e = a >> 1
            if a & 1:
                flow[e] -= bott
                v = heads[e]
            else:
                flow[e] += bott
                v = tails[e]
    return flow, seen


if numba is not None:
    _maxflow_jit = numba.njit(cache=True)(_maxflow_kernel)
else:  # pragma: no cover
    _maxflow_jit = None


def maxflow_int(n_nodes: int, tails: np.ndarray, heads: np.ndarray, caps: np.ndarray,
                src: int, dst: int, use_jit: bool | None = None):
    """Integer max-flow by shortest augmenting paths (Edmonds-Karp).

    Returns ``(flow_per_link, source_side_mask)`` where the mask marks the
    nodes reachable from ``src`` in the final residual graph.
    """
    tails = np.ascontiguousarray(tails, dtype=np.int64)
    heads = np.ascontiguousarray(heads, dtype=np.int64)
    caps = np.ascontiguousarray(caps, dtype=np.int64)
    ptr, arcs = build_adjacency(n_nodes, tails, heads)
    if use_jit is None:
        use_jit = jit_enabled()
    fn = _maxflow_jit if (use_jit and _maxflow_jit is not None) else _maxflow_python
    return fn(n_nodes, tails, heads, caps, int(src), int(dst), ptr, arcs)


# -- modular row reduction ---------------------------------------------------


def _rref_kernel(M, q):
    R = M.copy()
    rows, cols = R.shape
    pivots = np.empty(min(rows, cols), dtype=np.int64)
    r = 0
    for c in range(cols):
        if r == rows:
            break
        p = -1
        for i in range(r, rows):
            if R[i, c] != 0:
                p = i
                break
        if p < 0:
            continue
        if p != r:
            for j in range(cols):
                tmp = R[r, j]
                R[r, j] = R[p, j]
                R[p, j] = tmp
        # modular inverse by Fermat
        base = R[r, c]
        inv = 1
        ex = q - 2
        while ex > 0:
            if ex & 1:
                inv = (inv * base) % q
            base = (base * base) % q
            ex >>= 1
        for j in range(cols):
            R[r, j] = (R[r, j] * inv) % q
        for i in range(rows):
            if i != r and R[i, c] != 0:
                f = R[i, c]
                for j in range(cols):
                    R[i, j] = (R[i, j] - f * R[r, j]) % q
        pivots[r] = c
        r += 1
    return R, pivots[:r]


def _rref_numpy(M, q):
    R = M.copy()
    rows, cols = R.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(R[r:, c])[0]
        if nz.size == 0:
            continue
        p = r + int(nz[0])
        if p != r:
            R[[r, p]] = R[[p, r]]
        R[r] = (R[r] * pow(int(R[r, c]), q - 2, q)) % q
        f = R[:, c].copy()
        f[r] = 0
        R = (R - np.outer(f, R[r])) % q
        pivots.append(c)
        r += 1
    return R, np.array(pivots, dtype=np.int64)


if numba is not None:
    _rref_jit = numba.njit(cache=True)(_rref_kernel)
else:  # pragma: no cover
    _rref_jit = None


def rref_mod(M: np.ndarray, q: int, use_jit: bool | None = None):
    """Reduced row echelon form of ``M`` over GF(q); returns ``(R, pivot_cols)``."""
    M = np.ascontiguousarray(np.asarray(M, dtype=np.int64) % q)
    if M.ndim != 2:
        raise ValueError("expected a 2-D matrix")
    if M.shape[0] == 0 or M.shape[1] == 0:
        return M.copy(), np.zeros(0, dtype=np.int64)
    if use_jit is None:
        use_jit = jit_enabled()
    if use_jit and _rref_jit is not None:
        return _rref_jit(M, np.int64(q))
    return _rref_numpy(M, q)
