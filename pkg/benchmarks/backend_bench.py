"""Compare the jit-compiled and pure-numpy kernel backends on the hover-recovery scenario.

Each backend runs in a fresh subprocess so the kernel selection (via the
GEOMQUAD_NUMBA environment variable) is made at import time, exactly as a
user would experience it.  The timed section excludes compilation: each
subprocess does a short warmup run first.

Usage:
    python3 benchmarks/backend_bench.py [--duration 10.0] [--repeats 3]
"""

import argparse
import os
import subprocess
import sys

WORKER = """
import sys, time
from geomquad import SimConfig, build_case1
from geomquad.sim import run

duration, repeats = float(sys.argv[1]), int(sys.argv[2])
run(build_case1(), SimConfig(duration=0.2), with_report=False)  # warmup / jit
best = float("inf")
for _ in range(repeats):
    t0 = time.perf_counter()
    run(build_case1(), SimConfig(duration=duration), with_report=False)
    best = min(best, time.perf_counter() - t0)
print(best)
"""


def time_backend(flag: str, duration: float, repeats: int) -> float:
    env = dict(os.environ, GEOMQUAD_NUMBA=flag)
    proc = subprocess.run(
        [sys.executable, "-c", WORKER, str(duration), str(repeats)],
        env=env,
        capture_output=True,
        text=True,
        check=True,
    )
    return float(proc.stdout.strip().splitlines()[-1])


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--duration", type=float, default=10.0)
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args()

    steps = int(round(args.duration / 1e-3))
    t_jit = time_backend("1", args.duration, args.repeats)
    t_np = time_backend("0", args.duration, args.repeats)
    print(f"scenario: case1, {args.duration} s flight, {steps} RK4 steps, "
          f"best of {args.repeats}")
    print(f"  numba backend : {t_jit:8.3f} s  ({steps / t_jit:10.0f} steps/s)")
    print(f"  numpy backend : {t_np:8.3f} s  ({steps / t_np:10.0f} steps/s)")
    print(f"  speedup       : {t_np / t_jit:8.2f}x")


if __name__ == "__main__":
    main()
