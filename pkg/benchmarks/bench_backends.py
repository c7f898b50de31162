#!/usr/bin/env python3
"""Compare the numba and pure-numpy kernel backends.

The backend is frozen when the package is imported, so each one runs in a
fresh subprocess.  Every subprocess executes the same seeded workload once
to warm up (covering jit compilation) and then ``--repeats`` timed runs;
the parent reports best wall times and the largest difference between the
two result vectors.

    python3 benchmarks/bench_backends.py [--repeats 3]
"""

import argparse
import json
import os
import subprocess
import sys
import time


def workload():
    """A clearing-solve / sweep / implementation mix; returns its numbers."""
    import numpy as np

    import ordeal_lab as ol

    uniform = ol.DensityModel.uniform()
    rng = np.random.default_rng(42)
    grid = ol.DensityModel.grid(rng.uniform(0.4, 1.6, (200, 200)))
    band = ol.DensityModel.example1(0.05, 0.3)

    out = []
    for model, mu in ((uniform, 0.25), (grid, 0.25), (band, 0.3)):
        res = ol.market_clearing_ordeals(model, mu, mu)
        out += [res.c_a, res.c_b]
    sweep = ol.slope_sweep(uniform, 0.25, 0.25, [0.5 + 0.1 * i for i in range(16)])
    out += [row.welfare for row in sweep.rows]
    for slope in np.linspace(0.5, 2.0, 12):
        z = ol.supply_preserving_linear(grid, 0.25, 0.25, float(slope))
        out.append(ol.wstar_welfare(z, ol.optimal_UA(z), grid))
    search = ol.local_boundary_search(
        uniform, 0.25, 0.25, 3, seed=0, restarts=2, max_candidates=400
    )
    out.append(search.best_welfare)
    return out


def worker(repeats):
    from ordeal_lab._backend import BACKEND

    results = workload()  # warm-up run; includes jit compile time
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        workload()
        best = min(best, time.perf_counter() - t0)
    print(json.dumps({"backend": BACKEND, "best": best, "results": results}))


def run_child(backend, repeats):
    env = dict(os.environ, ORDEAL_LAB_BACKEND=backend)
    proc = subprocess.run(
        [sys.executable, os.path.abspath(__file__), "--worker", str(repeats)],
        env=env,
        capture_output=True,
        text=True,
        check=True,
    )
    return json.loads(proc.stdout.strip().splitlines()[-1])


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=3)
    parser.add_argument("--worker", type=int, metavar="REPEATS", default=None)
    args = parser.parse_args()
    if args.worker is not None:
        worker(args.worker)
        return

    reports = {name: run_child(name, args.repeats) for name in ("numba", "numpy")}
    if reports["numba"]["backend"] != "numba":
        print("note: numba is not importable here; both runs used the numpy path")
    delta = max(
        abs(x - y)
        for x, y in zip(reports["numba"]["results"], reports["numpy"]["results"])
    )
    t_nb = reports["numba"]["best"]
    t_np = reports["numpy"]["best"]
    print("workload: 3 clearing solves, 16-slope sweep, 12 implementations, local search")
    print("numba backend: %8.3f s" % t_nb)
    print("numpy backend: %8.3f s" % t_np)
    print("speedup:       %8.2fx" % (t_np / t_nb))
    print("max |delta| between backends: %.3e" % delta)


if __name__ == "__main__":
    main()
