"""Trainer command line: fit on synthetic blobs or a CSV and export
prover-schema fixtures."""

from __future__ import annotations

import argparse
import sys

from ezdps_trainer.train import TrainerError, TrainingConfig, train_export


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="trainer",
        description="fit PCA + one-vs-rest RBF-SVM and export Q31.32 fixtures")
    src = ap.add_mutually_exclusive_group(required=True)
    src.add_argument("--blobs", nargs=3, type=int, metavar=("M", "K", "S"),
                     help="synthetic Gaussian blobs: dimension, components, classes")
    src.add_argument("--csv", help="CSV rows of label,feat1,...,featm")
    ap.add_argument("--m", type=int, help="feature dimension for --csv")
    ap.add_argument("--k", type=int, default=4, help="PCA components for --csv")
    ap.add_argument("--gamma", type=float, default=0.05)
    ap.add_argument("--eta", type=float, default=0.2)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out-dir", default="fixtures")
    args = ap.parse_args(argv)

    if args.blobs:
        m, k, s = args.blobs
        cfg = TrainingConfig(m=m, k=k, s=s, gamma=args.gamma, eta=args.eta,
                             seed=args.seed, out_dir=args.out_dir)
    else:
        if not args.m:
            print("error: --csv requires --m", file=sys.stderr)
            return 2
        cfg = TrainingConfig(m=args.m, k=args.k, gamma=args.gamma,
                             eta=args.eta, seed=args.seed,
                             csv_path=args.csv, out_dir=args.out_dir)
    try:
        summary = train_export(cfg)
    except TrainerError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    print(f"held-out accuracy: {summary['held_out_accuracy']:.3f}")
    print(f"variance retained: {summary['variance_retained']:.3f}")
    print(f"support vectors:   {summary['support_vectors']} "
          f"across {summary['classes']} classes")
    print(f"fixtures written to {summary['out_dir']}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
