"""Compare the object engine with the Python and compiled array kernels.

Usage: python benchmarks/bench_kernel.py [--n 91] [--rounds 1000] [--repeats 3]

Every backend runs the same seeded demand-only system; the script checks
that all of them produce byte-identical per-round CSV before timing them.
"""

import argparse
import json
import time

from amoebot_energy import kernel
from amoebot_energy.behaviors import DemandOnly
from amoebot_energy.fastpath import run_kernel
from amoebot_energy.lattice import spiral
from amoebot_energy.metrics import rounds_csv
from amoebot_energy.scheduler import Schedule, StopCondition, run
from amoebot_energy.system import build_system


def one(backend, n, rounds, seed):
    s = build_system(spiral((0, 0), n), [(0, 0)], 10.0, 1.0, 5.0, seed=seed, random_orientation=True)
    sch = Schedule.permutation(seed)
    stop = StopCondition("max_rounds", rounds)
    t0 = time.perf_counter()
    if backend == "object":
        report = run(s, sch, DemandOnly(), stop, use_kernel=False)
    else:
        beh = DemandOnly()
        s.behavior = beh
        beh.bind(s)
        report = run_kernel(s, sch, beh, stop, backend=backend)
    return time.perf_counter() - t0, rounds_csv(report.rounds) + json.dumps(report.summary, sort_keys=True)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=91)
    ap.add_argument("--rounds", type=int, default=1000)
    ap.add_argument("--repeats", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    backends = ["object", "python"] + (["compiled"] if kernel.compiled_available() else [])
    ref = None
    print(f"n={args.n} rounds={args.rounds} repeats={args.repeats}")
    for b in backends:
        times = []
        for _ in range(args.repeats):
            dt, out = one(b, args.n, args.rounds, args.seed)
            times.append(dt)
            if ref is None:
                ref = out
            elif out != ref:
                raise SystemExit(f"backend {b} diverged from the object engine")
        best = min(times)
        speed = "" if b == "object" else f"  x{base / best:.1f} vs object"
        if b == "object":
            base = best
        print(f"{b:<9} best {best:.3f} s{speed}")
    if not kernel.compiled_available():
        print("compiled kernel not built; run `pip install -e . --no-build-isolation` to build it")


if __name__ == "__main__":
    main()
