"""Compiled versus pure-Python search kernel on zoo classes.

Each measurement uses a fresh solver, so memo tables start empty and the
time covers the whole search.  Run with ``python3 benchmarks/bench_kernel.py``.
"""

import argparse
import statistics
import time

from sdlab import kernel, zoo

CASES = [
    ("k_intervals:2:8", lambda: zoo.k_intervals(2, 8)),
    ("grid_rectangles:2:3", lambda: zoo.grid_rectangles(2, 3)),
    ("grid_rectangles:2:4", lambda: zoo.grid_rectangles(2, 4)),
    ("bendavid:3:1", lambda: zoo.bendavid(3, 1)),
    ("random:300:12:2:1", lambda: zoo.random_class(300, 12, 2, 1)),
    ("random:200:6:3:2", lambda: zoo.random_class(200, 6, 3, 2)),
]
METHODS = ("sd_value", "online_value", "fixed_value")


def timed(backend, method, table, repeats):
    runs, value, states = [], None, None
    for _ in range(repeats):
        solver = backend.Solver()
        t0 = time.perf_counter()
        value = getattr(solver, method)(table)
        runs.append(time.perf_counter() - t0)
        states = solver.states
    return statistics.median(runs), value, states


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args()
    backends = kernel.backends()
    if len(backends) < 2:
        print("compiled extension not built; only the pure-Python kernel is available")
    names = [b.BACKEND for b in backends]
    print(f"{'class':<22}{'method':<14}{'states':>9}" + "".join(f"{n + ' ms':>14}" for n in names)
          + ("   speedup" if len(backends) > 1 else ""))
    for label, make in CASES:
        table = make().table
        for method in METHODS:
            res = [timed(b, method, table, args.repeats) for b in backends]
            assert len({r[1] for r in res}) == 1, f"backends disagree on {label} {method}"
            line = f"{label:<22}{method:<14}{res[0][2]:>9}" + "".join(f"{r[0] * 1e3:>14.2f}" for r in res)
            if len(res) > 1:
                line += f"{res[0][0] / res[-1][0]:>9.1f}x"
            print(line, flush=True)


if __name__ == "__main__":
    main()
