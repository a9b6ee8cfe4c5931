"""Operator-facing command line: commit, prove, verify, prove-accuracy,
verify-accuracy, and constraint-count inspection.

Exit codes: 0 success/accept, 1 reject, 2 usage or format error.
"""

from __future__ import annotations

import argparse
import json
import secrets
import sys
from fractions import Fraction

from ezdps import pipeline, zkpoa
from ezdps.pipeline import (AccountingDims, ModelFormatError, PipelineError,
                            ProofFormatError, accounting_formulas,
                            build_accounting_system, commit_model, load_model,
                            load_proof, load_sample, save_proof, setup)

EXIT_OK = 0
EXIT_REJECT = 1
EXIT_ERROR = 2


def _pp(args):
    return setup(args.security, 1_000_000)


def _load_secret(path: str) -> bytes:
    with open(path) as fh:
        data = json.load(fh)
    r = bytes.fromhex(data["r"])
    if len(r) != 32:
        raise ModelFormatError("secret blinding must be 32 bytes of hex")
    return r


def _emit(args, human: str, machine: dict) -> None:
    if args.json:
        print(json.dumps(machine, sort_keys=True))
    else:
        print(human)


def cmd_commit(args) -> int:
    model = load_model(args.model)
    try:
        r = _load_secret(args.secret)
    except FileNotFoundError:
        r = secrets.token_bytes(32)
        with open(args.secret, "w") as fh:
            json.dump({"r": r.hex()}, fh)
            fh.write("\n")
    cm = commit_model(model, r, _pp(args))
    with open(args.commitment, "w") as fh:
        json.dump({"digest": cm.digest.hex()}, fh)
        fh.write("\n")
    _emit(args, cm.digest.hex(), {"digest": cm.digest.hex()})
    return EXIT_OK


def _load_commitment(path: str) -> bytes:
    with open(path) as fh:
        data = json.load(fh)
    digest = bytes.fromhex(data["digest"])
    if len(digest) != 32:
        raise ModelFormatError("commitment digest must be 32 bytes of hex")
    return digest


def cmd_prove(args) -> int:
    model = load_model(args.model)
    x = load_sample(args.input)
    r = _load_secret(args.secret)
    y, bundle = pipeline.prove(model, x, _pp(args), r)
    save_proof(bundle, args.proof)
    _emit(args, f"label {y}", {"label": y, "proof": args.proof})
    return EXIT_OK


def cmd_verify(args) -> int:
    x = load_sample(args.input)
    cm = _load_commitment(args.commitment)
    bundle = load_proof(args.proof)
    ok = pipeline.verify(cm, x, bundle.y, bundle, _pp(args))
    _emit(args, f"label {bundle.y}: {'ACCEPT' if ok else 'REJECT'}",
          {"label": bundle.y, "accept": ok})
    return EXIT_OK if ok else EXIT_REJECT


def cmd_prove_accuracy(args) -> int:
    model = load_model(args.model)
    samples, labels = zkpoa.load_dataset(args.dataset)
    r = _load_secret(args.secret)
    psi = _psi_fraction(args.psi, len(samples))
    stmt = zkpoa.PoaStatement(samples=samples, labels=labels, psi=psi)
    bundle = zkpoa.poa_prove(model, stmt, _pp(args), r)
    save_proof(bundle, args.proof)
    _emit(args, f"accuracy >= {float(psi):.4f} proven over {len(samples)} samples",
          {"psi": float(psi), "M": len(samples), "proof": args.proof})
    return EXIT_OK


def cmd_verify_accuracy(args) -> int:
    samples, labels = zkpoa.load_dataset(args.dataset)
    cm = _load_commitment(args.commitment)
    bundle = load_proof(args.proof)
    psi = _psi_fraction(args.psi, len(samples))
    stmt = zkpoa.PoaStatement(samples=samples, labels=labels, psi=psi)
    ok = zkpoa.poa_verify(cm, stmt, bundle, _pp(args))
    _emit(args, f"accuracy >= {float(psi):.4f}: {'ACCEPT' if ok else 'REJECT'}",
          {"psi": float(psi), "accept": ok})
    return EXIT_OK if ok else EXIT_REJECT


def _psi_fraction(psi: float, M: int) -> Fraction:
    """Round the claimed accuracy down to an integral count of samples."""
    hits = int(Fraction(str(psi)) * M)
    return Fraction(hits, M)


def cmd_inspect(args) -> int:
    model = load_model(args.model)
    pp = _pp(args)
    dims = AccountingDims(m=model.pca.m * (1 << (model.dwt.levels - 1)),
                          c=model.dwt.c, k=model.pca.k, s=model.svm.s,
                          t=model.svm.t, n=pp.n_bits)
    formulas = accounting_formulas(dims)
    cs = build_accounting_system(dims)
    built = {
        "dwt_decompose_per_level": cs.count_prefix("dwt.decompose"),
        "dwt_threshold": cs.count_prefix("dwt.threshold"),
        "dwt_reconstruct_per_level": cs.count_prefix("dwt.reconstruct"),
        "pca": cs.count_prefix("pca"),
        "svm_kernel": cs.count_prefix("svm.kernel"),
        "svm_class": cs.count_prefix("svm.class"),
    }
    mismatch = [k for k in built if built[k] != formulas[k]]
    if mismatch:
        print(f"error: built counts diverge from formulas: {mismatch}",
              file=sys.stderr)
        return EXIT_ERROR
    if args.json:
        print(json.dumps({"dims": vars(dims), "counts": built,
                          "baseline": {k: v for k, v in formulas.items()
                                       if k.startswith("baseline_")}},
                         sort_keys=True))
        return EXIT_OK
    print(f"dimensions: m={dims.m} k={dims.k} c={dims.c} n={dims.n} "
          f"s={dims.s} t={dims.t}")
    print(f"{'stage':<28}{'this scheme':>14}{'generic baseline':>18}")
    rows = [
        ("dwt decomposition / level", "dwt_decompose_per_level",
         "baseline_dwt_decompose"),
        ("dwt thresholding", "dwt_threshold", "baseline_dwt_threshold"),
        ("dwt reconstruction / level", "dwt_reconstruct_per_level",
         "baseline_dwt_reconstruct"),
        ("pca projection", "pca", "baseline_pca"),
        ("svm kernel", "svm_kernel", "baseline_svm_kernel"),
        ("svm classification", "svm_class", "baseline_svm_class"),
    ]
    for name, ours, base in rows:
        print(f"{name:<28}{formulas[ours]:>14}{formulas[base]:>18}")
    return EXIT_OK


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="ezdps",
        description="commit-prove-verify for a DWT/PCA/SVM inference pipeline")
    ap.add_argument("--security", type=int, default=128)
    ap.add_argument("--json", action="store_true",
                    help="machine-readable output")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("commit", help="commit to a model file")
    p.add_argument("--model", required=True)
    p.add_argument("--secret", required=True,
                   help="blinding file (created when missing)")
    p.add_argument("--commitment", required=True)
    p.set_defaults(func=cmd_commit)

    p = sub.add_parser("prove", help="classify a sample and prove it")
    p.add_argument("--model", required=True)
    p.add_argument("--secret", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--proof", required=True)
    p.set_defaults(func=cmd_prove)

    p = sub.add_parser("verify", help="verify an inference proof")
    p.add_argument("--input", required=True)
    p.add_argument("--commitment", required=True)
    p.add_argument("--proof", required=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("prove-accuracy", help="prove accuracy on a dataset")
    p.add_argument("--model", required=True)
    p.add_argument("--secret", required=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--psi", type=float, required=True)
    p.add_argument("--proof", required=True)
    p.set_defaults(func=cmd_prove_accuracy)

    p = sub.add_parser("verify-accuracy", help="verify an accuracy proof")
    p.add_argument("--dataset", required=True)
    p.add_argument("--psi", type=float, required=True)
    p.add_argument("--commitment", required=True)
    p.add_argument("--proof", required=True)
    p.set_defaults(func=cmd_verify_accuracy)

    p = sub.add_parser("inspect", help="per-stage constraint counts")
    p.add_argument("--model", required=True)
    p.set_defaults(func=cmd_inspect)

    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except (ModelFormatError, ProofFormatError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR
    except PipelineError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR
    except (OSError, json.JSONDecodeError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
