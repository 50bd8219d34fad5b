#!/usr/bin/env python3
"""Score the propagation-distilled pipeline against the plain
distant-supervision baselines on freshly generated benchmarks, one per RNG
seed, and print per-seed and mean micro-F1. This is the reference run used
to freeze the expected F1 gap asserted by the acceptance tests.

Usage: python3 scripts/run_benchmark.py [--seeds 0 1 2 3 4]
                                        [--variant Rs Rt] [--n 20]
"""

import argparse
import dataclasses
import statistics
import tempfile
import time

from reldistill import benchmark
from reldistill.synthetic import generate_benchmark
from reldistill.training import TrainConfig


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seeds", type=int, nargs="+", default=[0, 1, 2, 3, 4])
    parser.add_argument("--variant", nargs="+", default=["Rs", "Rt"])
    parser.add_argument("--n", type=int, default=20)
    args = parser.parse_args()

    config = dataclasses.replace(TrainConfig(), n=args.n, strategy="Both")
    distilled_f1s, baseline_f1s = [], []
    start = time.perf_counter()
    for seed in args.seeds:
        with tempfile.TemporaryDirectory() as tmp:
            paths = generate_benchmark(tmp, seed=seed)
            art = benchmark.prepare(paths)
            d = benchmark.distilled_report(art, args.variant, config).micro.f1
            b = benchmark.baseline_report(art, "DS_Target", config).micro.f1
        distilled_f1s.append(d)
        baseline_f1s.append(b)
        print(f"seed {seed}: distilled_Both F1={d:.4f}  DS_Target F1={b:.4f}")

    mean_d = statistics.mean(distilled_f1s)
    mean_b = statistics.mean(baseline_f1s)
    elapsed = time.perf_counter() - start
    print(f"mean distilled_Both F1 = {mean_d:.4f}")
    print(f"mean DS_Target F1      = {mean_b:.4f}")
    print(f"gap                    = {mean_d - mean_b:.4f}")
    print(f"elapsed                = {elapsed:.1f}s")


if __name__ == "__main__":
    main()
