#!/usr/bin/env python3
"""Coarse bandwidth sweep for a global-bandwidth method.

For each h on a grid, draws a few replications of a synthetic design, runs the
chosen method through the full pipeline and prints the mean classification
error and the exact-recovery share. Used to pick the `h` values in configs/.

Example:
    PYTHONPATH=build/python_pkg python3 tools/sweep_bandwidth.py \
        --dgp dgp1 --noise-sd 0.1 -n 300 --t-exponent 2 \
        --h 0.2 0.25 0.29 0.35 0.45 --replications 3
"""

import argparse
import json
import sys
import time

import numpy as np

import dkmeans


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--dgp", default="dgp1")
    parser.add_argument("--noise-sd", type=float, default=0.1)
    parser.add_argument("-n", type=int, default=300)
    parser.add_argument("--t-exponent", type=float, default=2.0)
    parser.add_argument("--method", default="DKM")
    parser.add_argument("--h", type=float, nargs="+", required=True)
    parser.add_argument("--replications", type=int, default=3)
    parser.add_argument("--seed", type=int, default=1)
    args = parser.parse_args()

    print("h,replications,mean_classification_error,exact_recovery,seconds")
    for h in args.h:
        config = json.dumps({"h": h, "t_exponent": args.t_exponent})
        errors = []
        start = time.perf_counter()
        for r in range(args.replications):
            seed = args.seed * 1000003 + r
            points, labels = dkmeans.generate(args.dgp, args.n, seed, args.noise_sd)
            try:
                out = dkmeans.run_cluster(config, args.method, points, list(labels), seed)
            except (RuntimeError, ValueError, ArithmeticError) as e:
                print(f"# h={h} replication {r}: {e}", file=sys.stderr)
                continue
            errors.append(out["classification_error"])
        seconds = time.perf_counter() - start
        mean = np.mean(errors) if errors else float("nan")
        exact = np.mean([e == 0.0 for e in errors]) if errors else float("nan")
        print(f"{h},{len(errors)},{mean:.4f},{exact:.2f},{seconds:.1f}")


if __name__ == "__main__":
    main()
