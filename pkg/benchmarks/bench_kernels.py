"""Time the numba kernels against the pure-numpy/python fallbacks.

Usage: python benchmarks/bench_kernels.py [--repeat N] [--nodes N] [--rank N]

Both paths run in one process; the environment flag only sets the
default, so ``use_jit`` is passed explicitly here. The first jitted call
(compilation) is excluded from the timings.
"""

import argparse
import time

import numpy as np

from wiretapnc import _accel


def random_dag(n, p, rng):
    tails, heads = [], []
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < p:
                tails.append(i)
                heads.append(j)
    caps = rng.integers(1, 20, size=len(tails))
    return np.array(tails, dtype=np.int64), np.array(heads, dtype=np.int64), caps.astype(np.int64)


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t)
    return min(times), out


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--nodes", type=int, default=200, help="nodes in the random max-flow DAG")
    parser.add_argument("--rank", type=int, default=300, help="side of the GF(q) matrix")
    parser.add_argument("--q", type=int, default=10007)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    rng = np.random.default_rng(args.seed)

    if not _accel.jit_enabled():
        print("numba unavailable or disabled; only the fallback is timed")

    tails, heads, caps = random_dag(args.nodes, 0.1, rng)
    flow_case = (args.nodes, tails, heads, caps, 0, args.nodes - 1)
    M = rng.integers(0, args.q, size=(args.rank, args.rank + 20), dtype=np.int64)

    rows = []
    for name, fn in (
        ("maxflow", lambda jit: _accel.maxflow_int(*flow_case, use_jit=jit)),
        ("rref_mod", lambda jit: _accel.rref_mod(M, args.q, use_jit=jit)),
    ):
        t_np, ref = best_of(lambda: fn(False), args.repeat)
        if _accel.jit_enabled():
            fn(True)  # compile
            t_jit, out = best_of(lambda: fn(True), args.repeat)
            same = all(np.array_equal(a, b) for a, b in zip(ref, out))
        else:
            t_jit, same = float("nan"), True
        rows.append((name, t_np, t_jit, same))

    print(f"{'kernel':<10}{'fallback s':>12}{'numba s':>12}{'speedup':>10}  agree")
    for name, t_np, t_jit, same in rows:
        print(f"{name:<10}{t_np:>12.4f}{t_jit:>12.4f}{t_np / t_jit:>10.1f}  {same}")


if __name__ == "__main__":
    main()
