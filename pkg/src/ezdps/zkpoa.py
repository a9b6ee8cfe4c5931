"""Zero-knowledge proof-of-accuracy: prove the committed model classifies
at least psi*M of M public labeled samples correctly, without revealing
which predictions are right.

One combined constraint system covers every sample's full inference (with
the predicted label as a committed witness rather than a public input)
plus the accuracy block: the predicted and ground-truth label lists are
expanded to (value, index) pairs, shuffled by one shared permutation that
moves the correctly-classified indices to the front, and bound by two
permutation checks under the challenge xi. Equality rows over the first
psi*M permuted slots then certify the accuracy bound while the
misclassification pattern stays inside the witness.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence

from ezdps.fixedpoint import FixedPoint
from ezdps.gadgets import lc_add, lc_of, lc_scale, perm_gadget
from ezdps.pipeline import (AUX_DOMAIN_TAG, MODEL_DOMAIN_TAG, POA_CHALLENGES,
                            BACKEND, Builder, ConstraintSystem,
                            ModelFormatError, ModelParams, PipelineError,
                            PipelineTrace, ProofBundle, PublicParams,
                            R1CSError, SampleVars, Transcript, _alloc_model,
                            _alloc_sample, _commit, _emit_sample,
                            _pack_payload, _unpack_payload, commit_aux,
                            commit_model, derive_aux_randomness, dps_infer,
                            model_canonical_bytes, model_from_dict,
                            model_value_list, values_to_bytes)


class PoaError(PipelineError):
    pass


@dataclass
class PoaStatement:
    """Public labeled dataset plus the claimed accuracy lower bound."""

    samples: List[List[FixedPoint]]
    labels: List[int]
    psi: Fraction

    def __post_init__(self):
        if not self.samples or len(self.samples) != len(self.labels):
            raise PoaError("dataset needs one label per sample, M >= 1")
        if not 0 <= self.psi <= 1:
            raise PoaError("claimed accuracy must lie in [0, 1]")
        if (self.psi * self.M).denominator != 1:
            raise PoaError("psi*M must be an integer (round psi down)")

    @property
    def M(self) -> int:
        return len(self.samples)

    @property
    def threshold(self) -> int:
        return int(self.psi * self.M)

    def canonical_bytes(self) -> bytes:
        d = {"M": self.M,
             "samples": [{"x": [str(v.raw) for v in x], "t": t}
                         for x, t in zip(self.samples, self.labels)]}
        return json.dumps(d, sort_keys=True, separators=(",", ":")).encode()


def load_dataset(path: str) -> tuple:
    """Returns (samples, labels) from the dataset JSON file."""
    try:
        with open(path) as fh:
            d = json.load(fh)
        samples = [[FixedPoint(int(s)) for s in rec["x"]] for rec in d["samples"]]
        labels = [int(rec["t"]) for rec in d["samples"]]
        if len(samples) != int(d["M"]):
            raise ModelFormatError("dataset length != declared M")
    except ModelFormatError:
        raise
    except (KeyError, TypeError, ValueError, json.JSONDecodeError) as e:
        raise ModelFormatError(f"malformed dataset: {e}") from None
    return samples, labels


def save_dataset(samples, labels, path: str) -> None:
    with open(path, "w") as fh:
        json.dump({"M": len(samples),
                   "samples": [{"x": [str(v.raw) for v in x], "t": t}
                               for x, t in zip(samples, labels)]}, fh)
        fh.write("\n")


def accuracy(predicted: Sequence[int], truth: Sequence[int]) -> Fraction:
    if len(predicted) != len(truth):
        raise PoaError("label list length mismatch")
    hits = sum(1 for y, t in zip(predicted, truth) if y == t)
    return Fraction(hits, len(truth))


def _canonical_sigma(predicted, truth) -> List[int]:
    """Correct indices first, misclassified suffix after, each ascending
    (any valid shuffle satisfies the constraints; this one is canonical)."""
    right = [i for i, (y, t) in enumerate(zip(predicted, truth)) if y == t]
    wrong = [i for i, (y, t) in enumerate(zip(predicted, truth)) if y != t]
    return right + wrong


def poa_transcript(pp: PublicParams, stmt: PoaStatement, model_digest: bytes,
                   aux_digest: bytes) -> dict:
    t = Transcript(pp.modulus)
    t.absorb("pp", pp.canonical_bytes())
    t.absorb("dataset", stmt.canonical_bytes())
    t.absorb_int("psi-threshold", stmt.threshold)
    t.absorb("model-commitment", model_digest)
    t.absorb("aux-commitment", aux_digest)
    return {name: t.challenge(name) for name in POA_CHALLENGES}


@dataclass
class PoaVars:
    samples: List[SampleVars]
    y_perm: List[int]       # permuted predicted labels
    t_perm: List[int]       # permuted ground-truth labels
    sigma1: List[int]
    sigma2: List[int]
    trace_ids: List[int]


def _alloc_poa(b: Builder, model: ModelParams, stmt: PoaStatement,
               traces: Optional[List[PipelineTrace]],
               sigma: Optional[List[int]]) -> PoaVars:
    p = b.cs.modulus

    def aw(v: Optional[int]) -> int:
        return b.wit(v % p if (b.proving and v is not None) else None)

    sample_vars = []
    for i, x in enumerate(stmt.samples):
        tr = traces[i] if traces else None
        sample_vars.append(_alloc_sample(b, model, x, tr, public_label=False))
    trace_ids: List[int] = []
    for svr in sample_vars:
        trace_ids += svr.trace_ids
    M = stmt.M
    if b.proving:
        predicted = [traces[i].svm.label for i in range(M)]
        y_perm = [aw(predicted[sigma[i]]) for i in range(M)]
        t_perm = [aw(stmt.labels[sigma[i]]) for i in range(M)]
        sigma1 = [aw(sigma[i] + 1) for i in range(M)]
        sigma2 = [aw(sigma[i] + 1) for i in range(M)]
    else:
        y_perm = [aw(None) for _ in range(M)]
        t_perm = [aw(None) for _ in range(M)]
        sigma1 = [aw(None) for _ in range(M)]
        sigma2 = [aw(None) for _ in range(M)]
    trace_ids += y_perm + t_perm + sigma1 + sigma2
    return PoaVars(samples=sample_vars, y_perm=y_perm, t_perm=t_perm,
                   sigma1=sigma1, sigma2=sigma2, trace_ids=trace_ids)


def _emit_poa(b: Builder, model: ModelParams, mv, pv: PoaVars,
              stmt: PoaStatement, ch: dict, pp: PublicParams) -> None:
    cs = b.cs
    p = cs.modulus
    for i, svr in enumerate(pv.samples):
        _emit_sample(b, model, mv, svr, None, ch, pp, prefix=f"poa.s{i}.")
    xi = ch["xi"]
    M = stmt.M
    # first psi*M permuted predictions match the permuted ground truth
    for i in range(stmt.threshold):
        cs.enforce_linear(lc_of(pv.y_perm[i]), lc_of(pv.t_perm[i]),
                          f"poa.correct[{i}]")
    # one shared shuffle
    for i in range(M):
        cs.enforce_linear(lc_of(pv.sigma1[i]), lc_of(pv.sigma2[i]),
                          f"poa.sigma[{i}]")
    # value-index binding under xi, then the two permutation checks
    y_bound = [lc_add(lc_of(pv.samples[i].svm.label_var),
                      b.const_lc(xi * (i + 1) % p)) for i in range(M)]
    y_perm_bound = [lc_add(lc_of(pv.y_perm[i]),
                           lc_scale(lc_of(pv.sigma1[i]), xi, p))
                    for i in range(M)]
    t_bound = [b.const_lc((stmt.labels[i] + xi * (i + 1)) % p) for i in range(M)]
    t_perm_bound = [lc_add(lc_of(pv.t_perm[i]),
                           lc_scale(lc_of(pv.sigma2[i]), xi, p))
                    for i in range(M)]
    perm_gadget(b, y_bound, y_perm_bound, ch["alpha_poa"], "poa.permY")
    perm_gadget(b, t_bound, t_perm_bound, ch["alpha_poa"], "poa.permT")


def build_poa_system(pp: PublicParams, model: ModelParams, stmt: PoaStatement,
                     ch: dict, traces=None, sigma=None, feed=None) -> tuple:
    cs = ConstraintSystem(pp.modulus)
    b = Builder(cs, proving=traces is not None,
                feed=iter(feed) if feed is not None else None)
    mv = _alloc_model(b, model)
    pv = _alloc_poa(b, model, stmt, traces, sigma)
    _emit_poa(b, model, mv, pv, stmt, ch, pp)
    cs.freeze()
    return cs, b, mv, pv


def poa_prove(model: ModelParams, stmt: PoaStatement, pp: PublicParams,
              r_model: bytes, r_aux: Optional[bytes] = None) -> ProofBundle:
    """Refuses when the true accuracy is below the claimed psi."""
    model.validate()
    results = [dps_infer(model, x, pp) for x in stmt.samples]
    predicted = [y for y, _ in results]
    traces = [tr for _, tr in results]
    true_acc = accuracy(predicted, stmt.labels)
    if true_acc < stmt.psi:
        raise PoaError(
            f"true accuracy {true_acc} is below the claimed {stmt.psi}")
    sigma = _canonical_sigma(predicted, stmt.labels)
    model_cm = commit_model(model, r_model, pp)
    if r_aux is None:
        r_aux = derive_aux_randomness(r_model, stmt.canonical_bytes())

    cs = ConstraintSystem(pp.modulus)
    b = Builder(cs, proving=True)
    mv = _alloc_model(b, model)
    pv = _alloc_poa(b, model, stmt, traces, sigma)
    trace_values = [b.value(v) for v in pv.trace_ids]
    aux_cm = commit_aux(trace_values, r_aux)

    ch = poa_transcript(pp, stmt, model_cm.digest, aux_cm.digest)
    _emit_poa(b, model, mv, pv, stmt, ch, pp)
    cs.freeze()

    witness = BACKEND.prove(cs, b.assignment())
    payload = _pack_payload(model_canonical_bytes(model), r_model, r_aux,
                            witness)
    return ProofBundle(kind=1, y=0, model_digest=model_cm.digest,
                       aux_digest=aux_cm.digest, challenges=ch,
                       payload=payload)


def poa_verify(cm_digest: bytes, stmt: PoaStatement, bundle: ProofBundle,
               pp: PublicParams) -> bool:
    try:
        if bundle.kind != 1 or bundle.model_digest != cm_digest:
            return False
        model_bytes, r_model, r_aux, witness = _unpack_payload(bundle.payload)
        model = model_from_dict(json.loads(model_bytes))
        if _commit(MODEL_DOMAIN_TAG, model_canonical_bytes(model), r_model) \
                != bundle.model_digest:
            return False
        if any(len(x) != model.sample_dim for x in stmt.samples):
            return False
        ch = poa_transcript(pp, stmt, bundle.model_digest, bundle.aux_digest)
        if ch != bundle.challenges:
            return False
        cs, b, mv, pv = build_poa_system(pp, model, stmt, ch, feed=witness)
        if cs.num_witness != len(witness):
            return False
        trace_values = [b.value(v) for v in pv.trace_ids]
        if _commit(AUX_DOMAIN_TAG, values_to_bytes(trace_values), r_aux) \
                != bundle.aux_digest:
            return False
        if [b.value(v) for v in mv.all_ids()] != \
                model_value_list(model, pp.modulus):
            return False
        return BACKEND.verify(cs, b.assignment())
    except (PipelineError, R1CSError, ValueError, KeyError, IndexError):
        return False
