"""Compiled vs pure-Python kernels on desk-scale inputs.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Prints the best-of-N wall time per kernel and backend, the speedup, and
checks both backends return identical results on the benchmark inputs.
"""
import argparse
import time

import numpy as np

from relph import kernels
from relph.filtrations import vietoris_rips
from relph.persistence import boundary_matrix


def cases(rng):
    P = rng.uniform(0, 100, (150, 2))
    d = np.linalg.norm(P[:, None] - P[None], axis=2)
    adj = np.triu(d <= 12.0, 1)
    cross = rng.uniform(0, 100, (60, 80))
    bm = boundary_matrix(vietoris_rips(d, 12.0))
    cost = rng.uniform(0, 10, (120, 120))
    match = rng.random((200, 200)) < 0.02
    return {
        "rips_triangles": lambda k: k.rips_triangles(d, adj),
        "dowker_simplex_values": lambda k: k.dowker_simplex_values(cross),
        "reduce_boundary": lambda k: k.reduce_boundary(bm.columns, bm.dims, 2),
        "linear_assignment": lambda k: k.linear_assignment(cost),
        "max_matching": lambda k: k.max_matching(match),
    }


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def same(a, b):
    if isinstance(a, tuple):
        return all(same(x, y) for x, y in zip(a, b))
    return np.array_equal(np.asarray(a), np.asarray(b))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    impls = kernels.backends()
    if "cython" not in impls:
        print("compiled extension not built; only the python backend is available")
    print(f"{'kernel':24s}" + "".join(f"{n:>12s}" for n in impls) + f"{'speedup':>10s}  agree")
    for name, run in cases(np.random.default_rng(0)).items():
        secs = {n: best_of(lambda: run(k), args.repeat) for n, k in impls.items()}
        outs = [run(k) for k in impls.values()]
        agree = all(same(outs[0], o) for o in outs[1:])
        speed = secs["python"] / secs["cython"] if "cython" in secs else float("nan")
        print(f"{name:24s}" + "".join(f"{s * 1e3:10.2f}ms" for s in secs.values())
              + f"{speed:9.1f}x  {'yes' if agree else 'NO'}")


if __name__ == "__main__":
    main()
