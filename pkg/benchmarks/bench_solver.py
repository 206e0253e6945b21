"""Time the branch-and-bound kernels against each other.

    python3 benchmarks/bench_solver.py [--repeat 3]

Each instance is solved with every available backend; the table shows
the best wall time of ``--repeat`` runs and checks that all backends
return the same optimum and witness.
"""
import argparse
import time

from coarsegroups import _kernels
from coarsegroups.groups import FreeAbelian
from coarsegroups.metric import MetricContext, WeightFunction
from coarsegroups.solver import MetricTable, solve_min_diameter

Z, Z2 = FreeAbelian(1), FreeAbelian(2)


def instances():
    unit = MetricContext.default(Z)
    z13 = MetricContext(WeightFunction(Z, [((1,), 1), ((3,), 1)]))
    plane = MetricContext.default(Z2)
    yield "Z  N=20 k=2 d=2", MetricTable.from_ball(unit, 20), 2, 2
    yield "Z{1,3} N=6 k=3 d=1", MetricTable.from_ball(z13, 6), 3, 1
    yield "Z2 N=2 k=2 d=2", MetricTable.from_ball(plane, 2), 2, 2
    yield "Z2 N=3 k=2 d=2", MetricTable.from_ball(plane, 3), 2, 2
    yield "Z2 N=3 k=3 d=2", MetricTable.from_ball(plane, 3), 3, 2


def best_time(fn, repeat):
    best, out = None, None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        dt = time.perf_counter() - t0
        best = dt if best is None else min(best, dt)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    backends = sorted(_kernels.BACKENDS)
    print(f"{'instance':<22}{'points':>7}{'R*':>6}" + "".join(f"{b + ' (s)':>14}" for b in backends) + f"{'speedup':>10}")
    for label, table, k, d in instances():
        times, results = {}, set()
        for b in backends:
            dt, res = best_time(lambda: solve_min_diameter(table, k, d, backend=b), args.repeat)
            times[b] = dt
            results.add((res.r_star, res.coloring, res.exact))
        if len(results) != 1:
            raise SystemExit(f"backends disagree on {label}")
        r_star = next(iter(results))[0]
        speed = f"{times['python'] / times['cython']:.1f}x" if "cython" in times else "-"
        print(f"{label:<22}{table.n:>7}{str(r_star):>6}" + "".join(f"{times[b]:>14.4f}" for b in backends) + f"{speed:>10}")


if __name__ == "__main__":
    main()
