#!/usr/bin/env python3
"""Benchmark the simulation kernels with and without JIT compilation.

The package runs its event loops through numba by default and falls back
to interpreted Python/numpy when MVADDER_DISABLE_NUMBA=1. Both paths are
bit-identical; this script measures what the compilation buys.

Usage:
    python benchmarks/bench_modes.py          # run both modes (subprocess)
    python benchmarks/bench_modes.py --worker # run the current mode only
"""

import argparse
import json
import os
import subprocess
import sys
import time


def workload() -> dict:
    import mvadder as mv
    from mvadder import _kernel
    from mvadder.verify import verify_adder_cell, verify_cpa

    _kernel.warm_up()
    results = {"mode": "numba" if _kernel.USE_NUMBA else "python"}

    t0 = time.perf_counter()
    for _ in range(20):
        assert verify_adder_cell(mv.build_qfa("qfa2", 0.9)) == []
    results["qfa2_exhaustive_x20_s"] = time.perf_counter() - t0

    cpa = mv.build_cpa(mv.build_qfa("qfa2", 0.9), 8, cl=2e-15)
    t0 = time.perf_counter()
    assert verify_cpa(cpa, 8, vectors=1500, seed=1) == []
    results["cpa8_1500_vectors_s"] = time.perf_counter() - t0

    cell = mv.build_qfa("qfa1", 0.9, cl=2e-15)
    stim = mv.worst_case_stimulus("input_to_carry", "qfa1", 0.9)
    t0 = time.perf_counter()
    for _ in range(200):
        mv.simulate(cell, stim)
    results["qfa1_sim_x200_s"] = time.perf_counter() - t0
    return results


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--worker", action="store_true",
                    help="run the workload in the current mode and print JSON")
    args = ap.parse_args()

    if args.worker:
        print(json.dumps(workload()))
        return 0

    rows = []
    for disable in ("0", "1"):
        env = dict(os.environ, MVADDER_DISABLE_NUMBA=disable)
        proc = subprocess.run(
            [sys.executable, __file__, "--worker"],
            env=env, capture_output=True, text=True, check=True,
        )
        rows.append(json.loads(proc.stdout.strip().splitlines()[-1]))

    keys = [k for k in rows[0] if k != "mode"]
    width = max(len(k) for k in keys) + 2
    print(f"{'workload':<{width}}{rows[0]['mode']:>12}{rows[1]['mode']:>12}{'speedup':>10}")
    for k in keys:
        a, b = rows[0][k], rows[1][k]
        print(f"{k:<{width}}{a:>12.3f}{b:>12.3f}{b / a:>9.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
