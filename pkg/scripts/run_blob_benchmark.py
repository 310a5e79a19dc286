#!/usr/bin/env python3
"""Benchmark all five classifiers on a synthetic 3-cluster dataset.

Uses the standard 22/28/30 class balance, a 15% stratified holdout, and
pooled 10-fold cross-validation on the remaining samples, then prints one
table row per algorithm.

Usage:
    python3 scripts/run_blob_benchmark.py [--seed 0] [--separation 5.0]
"""

import argparse

from voicepd.classifiers import ALGORITHMS
from voicepd.evaluation import run_experiment
from voicepd.synth import gen_blobs


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--separation", type=float, default=5.0)
    parser.add_argument("--sigma", type=float, default=1.0)
    args = parser.parse_args()

    dataset = gen_blobs((22, 28, 30), separation=args.separation,
                        sigma=args.sigma, seed=args.seed)
    print(f"{'algorithm':<10} {'cv accuracy':>12} {'holdout':>8} "
          f"{'f1 (class 0)':>13}")
    for algorithm in ALGORITHMS:
        report = run_experiment(dataset, algorithm, seed=args.seed)
        cv_acc = report["cv"]["pooled"]["accuracy"]
        hold = report["holdout"]["accuracy"]
        f1 = report["holdout"]["per_class"]["0 (Med Off)"]["f1"]
        print(f"{algorithm:<10} {cv_acc:>12.3f} {hold:>8.3f} {f1:>13.3f}")


if __name__ == "__main__":
    main()
