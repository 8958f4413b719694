"""Time kernel-matrix assembly and angular sums for each available backend.

    python benchmarks/bench_kernels.py [--cells 256 512 1024] [--repeat 3]
"""
import argparse
import time

import numpy as np

from flockball import RadialGrid, _backend
from flockball.quadrature import gauss_legendre, theta_rule


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--cells", type=int, nargs="+", default=[256, 512, 1024])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    names = _backend.available()
    gx, gw = gauss_legendre(6)
    print(f"{'task':<28}" + "".join(f"{n:>12}" for n in names) + f"{'speedup':>10}")
    for cells in args.cells:
        edges = np.asarray(RadialGrid.uniform(2.5, cells, 3).edges)
        for mu in (2.0, -1.0):
            t = [best_of(lambda b=b: _backend.get_backend(b).assemble_n3(edges, mu, gx, gw), args.repeat) for b in names]
            speed = f"{t[0] / t[-1]:>9.1f}x" if len(t) > 1 else ""
            print(f"{f'assemble_n3 M={cells} mu={mu:g}':<28}" + "".join(f"{x:>11.3f}s" for x in t) + speed)

    rng = np.random.default_rng(0)
    r = rng.uniform(0.1, 2.0, 20000)
    s = rng.uniform(0.1, 2.0, 20000)
    th, wt = theta_rule(16, 8)
    for N in (2, 4):
        t = [
            best_of(lambda b=b: _backend.get_backend(b).theta_sum(-1.3, r, s, r - s, N, th, wt), args.repeat)
            for b in names
        ]
        speed = f"{t[0] / t[-1]:>9.1f}x" if len(t) > 1 else ""
        print(f"{f'theta_sum N={N} 20000 pts':<28}" + "".join(f"{x:>11.3f}s" for x in t) + speed)


if __name__ == "__main__":
    main()
