"""Protocol orchestration: setup, model commitment, end-to-end inference,
auxiliary-witness commitment, Fiat-Shamir challenge derivation, proof
assembly, and verification against a pluggable backend.

Proving order: (1) run the pipeline to get the label and the full
auxiliary trace; (2) commit to the trace; (3) absorb public parameters,
sample, label and both commitments into the transcript; (4) derive the
challenges; (5) build the constraint system; (6) backend prove;
(7) assemble the bundle. Verification replays the transcript, re-derives
the challenges, rebuilds the identical system (feeding the received
witness positionally) and delegates the satisfiability check.

The reference backend is transparent: its payload is the full assignment,
so it demonstrates the completeness and soundness of the constraint
compilation while succinctness and zero-knowledge remain the job of a
drop-in CP-ZKP backend behind the same interface.

System construction is split into an allocation pass (public inputs,
model variables, trace variables, in one canonical order) and an emission
pass (all constraints, allocating challenge-dependent helper variables),
so the trace can be committed between the two and the constraint shape
never depends on witness values.
"""

from __future__ import annotations

import hashlib
import json
import struct
from dataclasses import dataclass
from typing import List, Optional, Sequence

from ezdps.dwt import DwtLevelTrace, DwtLevelVars, DwtParams, DwtTrace, \
    dwt_constraints, dwt_witness
from ezdps.field import RISTRETTO_ORDER
from ezdps.fixedpoint import FRAC_BITS, FixedPoint
from ezdps.gadgets import lc_of
from ezdps.pca import PcaParams, PcaVars, pca_constraints, pca_project, \
    project_exact
from ezdps.r1cs import Assignment, Builder, ConstraintSystem, R1CSError
from ezdps.svm import DecisionTrace, SvmClass, SvmParams, SvmVars, \
    svm_constraints, svm_witness

MODEL_DOMAIN_TAG = b"ezdps/model"
AUX_DOMAIN_TAG = b"ezdps/aux"
PROOF_MAGIC = b"EZDP"
PROOF_VERSION = 1


class PipelineError(ValueError):
    pass


class ModelFormatError(PipelineError):
    pass


class ProofFormatError(PipelineError):
    pass


# ---- public parameters ----

@dataclass(frozen=True)
class PublicParams:
    security: int = 128
    modulus: int = RISTRETTO_ORDER
    n_bits: int = 64
    exp_frac_bits: int = 20
    max_model_size: int = 1_000_000
    version: int = 1

    def canonical_bytes(self) -> bytes:
        d = {"version": self.version, "security": self.security,
             "modulus": str(self.modulus), "n_bits": self.n_bits,
             "exp_frac_bits": self.exp_frac_bits,
             "max_model_size": self.max_model_size}
        return json.dumps(d, sort_keys=True, separators=(",", ":")).encode()


def setup(security: int, max_model_size: int, n_bits: int = 64) -> PublicParams:
    if security != 128:
        raise PipelineError(f"unsupported security level {security}")
    return PublicParams(security=security, n_bits=n_bits,
                        max_model_size=max_model_size)


# ---- model ----

@dataclass
class ModelParams:
    dwt: DwtParams
    pca: PcaParams
    svm: SvmParams

    def validate(self) -> None:
        if self.pca.k > self.pca.m:
            raise ModelFormatError("PCA k exceeds m")
        if self.svm.k != self.pca.k:
            raise ModelFormatError("SVM feature dimension != PCA output k")
        limit = 2 << FRAC_BITS  # filters and eigenvectors stay within |v| <= 2
        for f in self.dwt.h + self.dwt.g + self.dwt.h_bar + self.dwt.g_bar:
            if abs(f.raw) > limit:
                raise ModelFormatError("filter tap out of range")
        for row in self.pca.v_rows:
            for v in row:
                if abs(v.raw) > limit:
                    raise ModelFormatError("eigenvector entry out of range")

    @property
    def sample_dim(self) -> int:
        """Raw input length: the DWT halves its working vector per level."""
        return self.pca.m * (1 << (self.dwt.levels - 1))

    def param_count(self) -> int:
        return (self.dwt.param_count + self.pca.m * (self.pca.k + 1)
                + sum((len(c.coef) * (self.svm.k + 1)) + 1 for c in self.svm.classes)
                + 1)


def model_value_list(model: ModelParams, p: int) -> list:
    """Field residues of every committed model parameter, in the canonical
    variable-allocation order."""
    raws = []
    raws += [v.raw for v in model.dwt.h + model.dwt.g
             + model.dwt.h_bar + model.dwt.g_bar]
    raws.append(model.dwt.eta.raw)
    raws += [v.raw for v in model.pca.x_bar]
    for row in model.pca.v_rows:
        raws += [v.raw for v in row]
    for c in model.svm.classes:
        for svec in c.support_vectors:
            raws += [v.raw for v in svec]
        raws += [v.raw for v in c.coef]
        raws.append(c.bias.raw)
    return [r % p for r in raws]


def _raw_list(vals) -> list:
    return [str(v.raw) for v in vals]


def _fxp_list(strs) -> list:
    try:
        return [FixedPoint(int(s)) for s in strs]
    except (TypeError, ValueError) as e:
        raise ModelFormatError(f"bad raw fixed-point value: {e}") from None


def model_to_dict(model: ModelParams, modulus: int = RISTRETTO_ORDER) -> dict:
    return {
        "version": 1,
        "field_modulus": str(modulus),
        "fxp_frac_bits": FRAC_BITS,
        "dwt": {
            "c": model.dwt.c,
            "h": _raw_list(model.dwt.h),
            "g": _raw_list(model.dwt.g),
            "h_bar": _raw_list(model.dwt.h_bar),
            "g_bar": _raw_list(model.dwt.g_bar),
            "eta": str(model.dwt.eta.raw),
            "levels": model.dwt.levels,
        },
        "pca": {
            "m": model.pca.m,
            "k": model.pca.k,
            "x_bar": _raw_list(model.pca.x_bar),
            "V": [_raw_list(row) for row in model.pca.v_rows],
        },
        "svm": {
            "s": model.svm.s,
            "gamma": str(model.svm.gamma.raw),
            "classes": [
                {"sv": [_raw_list(sv) for sv in c.support_vectors],
                 "coef": _raw_list(c.coef),
                 "bias": str(c.bias.raw)}
                for c in model.svm.classes
            ],
        },
    }


def model_from_dict(d: dict) -> ModelParams:
    try:
        if d["version"] != 1:
            raise ModelFormatError(f"unsupported model version {d['version']}")
        if int(d["fxp_frac_bits"]) != FRAC_BITS:
            raise ModelFormatError("unsupported fixed-point precision")
        dw = d["dwt"]
        dwt = DwtParams(h=_fxp_list(dw["h"]), g=_fxp_list(dw["g"]),
                        h_bar=_fxp_list(dw["h_bar"]), g_bar=_fxp_list(dw["g_bar"]),
                        eta=FixedPoint(int(dw["eta"])), levels=int(dw["levels"]))
        if dwt.c != int(dw["c"]):
            raise ModelFormatError("declared filter length mismatch")
        pc = d["pca"]
        pca = PcaParams(x_bar=_fxp_list(pc["x_bar"]),
                        v_rows=[_fxp_list(r) for r in pc["V"]])
        if pca.m != int(pc["m"]) or pca.k != int(pc["k"]):
            raise ModelFormatError("declared PCA dimensions mismatch")
        sv = d["svm"]
        svm = SvmParams(
            classes=[SvmClass(support_vectors=[_fxp_list(v) for v in c["sv"]],
                              coef=_fxp_list(c["coef"]),
                              bias=FixedPoint(int(c["bias"])))
                     for c in sv["classes"]],
            gamma=FixedPoint(int(sv["gamma"])))
        if svm.s != int(sv["s"]):
            raise ModelFormatError("declared class count mismatch")
    except ModelFormatError:
        raise
    except (KeyError, TypeError, ValueError) as e:
        raise ModelFormatError(f"malformed model: {e}") from None
    model = ModelParams(dwt=dwt, pca=pca, svm=svm)
    model.validate()
    return model


def model_canonical_bytes(model: ModelParams) -> bytes:
    return json.dumps(model_to_dict(model), sort_keys=True,
                      separators=(",", ":")).encode()


def load_model(path: str) -> ModelParams:
    try:
        with open(path) as fh:
            d = json.load(fh)
    except json.JSONDecodeError as e:
        raise ModelFormatError(f"model file is not valid JSON: {e}") from None
    return model_from_dict(d)


def save_model(model: ModelParams, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(model_to_dict(model), fh, indent=1)
        fh.write("\n")


def load_sample(path: str) -> List[FixedPoint]:
    try:
        with open(path) as fh:
            d = json.load(fh)
        x = _fxp_list(d["x"])
        if len(x) != int(d["m"]):
            raise ModelFormatError("sample length != declared m")
    except ModelFormatError:
        raise
    except (KeyError, TypeError, ValueError, json.JSONDecodeError) as e:
        raise ModelFormatError(f"malformed sample: {e}") from None
    return x


def save_sample(x: Sequence[FixedPoint], path: str) -> None:
    with open(path, "w") as fh:
        json.dump({"m": len(x), "x": _raw_list(x)}, fh)
        fh.write("\n")


# ---- commitments ----

@dataclass
class Commitment:
    """digest = SHA-256(domain-tag || payload || r); binding under CRHF."""

    digest: bytes
    opening: Optional[tuple] = None  # (payload bytes, randomness r)


def _commit(tag: bytes, payload: bytes, r: bytes) -> bytes:
    if len(r) != 32:
        raise PipelineError("blinding randomness must be 32 bytes")
    h = hashlib.sha256()
    h.update(tag)
    h.update(struct.pack("<I", len(payload)))
    h.update(payload)
    h.update(r)
    return h.digest()


def commit_model(model: ModelParams, r: bytes, pp: PublicParams) -> Commitment:
    model.validate()
    if model.param_count() > pp.max_model_size:
        raise PipelineError("model exceeds the committed size bound")
    payload = model_canonical_bytes(model)
    return Commitment(digest=_commit(MODEL_DOMAIN_TAG, payload, r),
                      opening=(payload, r))


def values_to_bytes(values: Sequence[int]) -> bytes:
    return b"".join(v.to_bytes(32, "little") for v in values)


def commit_aux(values: Sequence[int], r: bytes) -> Commitment:
    payload = values_to_bytes(values)
    return Commitment(digest=_commit(AUX_DOMAIN_TAG, payload, r),
                      opening=(payload, r))


def derive_aux_randomness(r_model: bytes, context: bytes) -> bytes:
    """Deterministic per-proof blinding so identical inputs and secrets
    reproduce identical proof bytes."""
    h = hashlib.sha256()
    h.update(b"ezdps/aux-blind")
    h.update(r_model)
    h.update(context)
    return h.digest()


# ---- transcript ----

class Transcript:
    """Deterministic Fiat-Shamir state. Challenges ratchet the state, so
    identical absorb sequences yield identical challenge sequences and a
    challenge is only a function of everything absorbed before it."""

    def __init__(self, modulus: int = RISTRETTO_ORDER):
        self.modulus = modulus
        self._state = hashlib.sha256(b"ezdps/transcript/v1").digest()

    def _mix(self, kind: bytes, label: str, data: bytes) -> None:
        h = hashlib.sha256()
        h.update(self._state)
        h.update(kind)
        enc = label.encode()
        h.update(struct.pack("<H", len(enc)))
        h.update(enc)
        h.update(struct.pack("<I", len(data)))
        h.update(data)
        self._state = h.digest()

    def absorb(self, label: str, data: bytes) -> None:
        self._mix(b"A", label, data)

    def absorb_int(self, label: str, value: int) -> None:
        self._mix(b"A", label, value.to_bytes(8, "little", signed=True))

    def challenge(self, label: str) -> int:
        # 64 bytes of output keep the bias below 2^-250 for a 252-bit prime
        wide = b""
        for ctr in (0, 1):
            h = hashlib.sha256()
            h.update(self._state)
            h.update(b"C")
            h.update(label.encode())
            h.update(bytes([ctr]))
            wide += h.digest()
        value = int.from_bytes(wide, "little") % self.modulus
        self._mix(b"R", label, value.to_bytes(32, "little"))
        return value


INFERENCE_CHALLENGES = ("alpha", "alpha_bar", "alpha_pca", "beta", "alpha_max")
POA_CHALLENGES = INFERENCE_CHALLENGES + ("xi", "alpha_poa")


def _sample_bytes(x: Sequence[FixedPoint]) -> bytes:
    return b"".join(v.raw.to_bytes(8, "little", signed=True) for v in x)


def inference_transcript(pp: PublicParams, x: Sequence[FixedPoint], y: int,
                         model_digest: bytes, aux_digest: bytes) -> dict:
    t = Transcript(pp.modulus)
    t.absorb("pp", pp.canonical_bytes())
    t.absorb("sample", _sample_bytes(x))
    t.absorb_int("label", y)
    t.absorb("model-commitment", model_digest)
    t.absorb("aux-commitment", aux_digest)
    return {name: t.challenge(name) for name in INFERENCE_CHALLENGES}


# ---- pipeline witness ----

@dataclass
class PipelineTrace:
    dwt: DwtTrace
    pca_exact: List[int]
    pca: List[int]
    svm: DecisionTrace


def dps_infer(model: ModelParams, x: Sequence[FixedPoint], pp: PublicParams
              ) -> tuple:
    """Full inference: DWT levels, PCA projection, SVM classification.
    Returns (1-based label, auxiliary trace)."""
    if len(x) != model.sample_dim:
        raise PipelineError(
            f"sample length {len(x)} != model input dimension {model.sample_dim}")
    dt = dwt_witness(x, model.dwt)
    xhat = [FixedPoint(v) for v in dt.output()]
    p_exact = project_exact([v.raw for v in xhat], model.pca)
    p32 = pca_project(xhat, model.pca)
    st = svm_witness(p32, model.svm, pp.n_bits)
    return st.label, PipelineTrace(dwt=dt, pca_exact=p_exact,
                                   pca=[v.raw for v in p32], svm=st)


# ---- system construction ----

@dataclass
class ModelVars:
    h: List[int]
    g: List[int]
    h_bar: List[int]
    g_bar: List[int]
    eta: int
    mean: List[int]
    v_rows: List[List[int]]
    sv: List[List[List[int]]]
    coef: List[List[int]]
    bias: List[int]

    def all_ids(self) -> List[int]:
        ids = self.h + self.g + self.h_bar + self.g_bar + [self.eta] + self.mean
        for row in self.v_rows:
            ids += row
        for c_sv, c_coef, c_bias in zip(self.sv, self.coef, self.bias):
            for svec in c_sv:
                ids += svec
            ids += c_coef
            ids.append(c_bias)
        return ids


@dataclass
class SampleVars:
    x: List[int]                    # public input variables
    dwt_levels: List[DwtLevelVars]
    pca: PcaVars
    svm: SvmVars
    trace_ids: List[int]            # committed auxiliary section, in order


def _alloc_model(b: Builder, model: ModelParams) -> ModelVars:
    p = b.cs.modulus

    def aw(raw: Optional[int]) -> int:
        return b.wit(raw % p if (b.proving and raw is not None) else None)

    def alloc_vec(vals) -> List[int]:
        return [aw(v.raw if b.proving else None) for v in vals]

    d, pc, sv = model.dwt, model.pca, model.svm
    # allocation order must match ModelVars.all_ids(): filters, threshold,
    # mean, eigenvector rows, then per class (support vectors, coef, bias)
    h = alloc_vec(d.h)
    g = alloc_vec(d.g)
    h_bar = alloc_vec(d.h_bar)
    g_bar = alloc_vec(d.g_bar)
    eta = aw(d.eta.raw if b.proving else None)
    mean = alloc_vec(pc.x_bar)
    v_rows = [alloc_vec(row) for row in pc.v_rows]
    sv_vars, coef_vars, bias_vars = [], [], []
    for c in sv.classes:
        sv_vars.append([alloc_vec(s) for s in c.support_vectors])
        coef_vars.append(alloc_vec(c.coef))
        bias_vars.append(aw(c.bias.raw if b.proving else None))
    return ModelVars(h=h, g=g, h_bar=h_bar, g_bar=g_bar, eta=eta, mean=mean,
                     v_rows=v_rows, sv=sv_vars, coef=coef_vars, bias=bias_vars)


def _alloc_sample(b: Builder, model: ModelParams, x: Optional[Sequence[FixedPoint]],
                  trace: Optional[PipelineTrace], public_label: bool) -> SampleVars:
    """Public inputs plus the committed trace of one sample, in the
    canonical commitment order."""
    p = b.cs.modulus
    m_raw = model.sample_dim

    def aw(raw: Optional[int]) -> int:
        return b.wit(raw % p if (b.proving and raw is not None) else None)

    x_vars = [b.pub(x[i].raw % p if x is not None else None) for i in range(m_raw)]

    trace_ids: List[int] = []

    def traced(raw: Optional[int]) -> int:
        vid = aw(raw)
        trace_ids.append(vid)
        return vid

    levels: List[DwtLevelVars] = []
    cur_len = m_raw
    for li in range(model.dwt.levels):
        t = cur_len // 2
        lt: Optional[DwtLevelTrace] = trace.dwt.levels[li] if trace else None
        levels.append(DwtLevelVars(
            z_exact=[traced(lt.z_exact[i] if lt else None) for i in range(cur_len)],
            z=[traced(lt.z[i] if lt else None) for i in range(cur_len)],
            detail_abs=[traced(lt.detail_abs[i] if lt else None) for i in range(t)],
            detail_sign=[traced(lt.detail_sign[i] if lt else None) for i in range(t)],
            z_thresh=[traced(lt.z_thresh[i] if lt else None) for i in range(t)],
            xhat_exact=[traced(lt.xhat_exact[i] if lt else None) for i in range(cur_len)],
            xhat=[traced(lt.xhat[i] if lt else None) for i in range(cur_len)],
        ))
        cur_len = t

    k = model.pca.k
    pca_vars = PcaVars(
        proj_exact=[traced(trace.pca_exact[i] if trace else None) for i in range(k)],
        proj=[traced(trace.pca[i] if trace else None) for i in range(k)],
    )

    st = trace.svm if trace else None
    exps, kerns, prods = [], [], []
    for c, cl in enumerate(model.svm.classes):
        n_sv = len(cl.support_vectors)
        exps.append([traced(st.exponents[c][i] if st else None) for i in range(n_sv)])
        kerns.append([traced(st.kernels[c][i] if st else None) for i in range(n_sv)])
        prods.append([traced(st.products[c][i] if st else None) for i in range(n_sv)])
    s = model.svm.s
    if public_label:
        f_bar = [traced(st.f_bar[i] if st else None) for i in range(1, s)]
        sigma = [traced(st.sigma[i] if st else None) for i in range(1, s)]
        label_var = None
    else:
        f_bar = [traced(st.f_bar[i] if st else None) for i in range(s)]
        sigma = [traced(st.sigma[i] if st else None) for i in range(s)]
        label_var = sigma[0]
    svm_vars = SvmVars(exponents=exps, kernels=kerns, products=prods,
                       f_bar=f_bar, sigma=sigma, label_var=label_var)
    return SampleVars(x=x_vars, dwt_levels=levels, pca=pca_vars, svm=svm_vars,
                      trace_ids=trace_ids)


def _emit_sample(b: Builder, model: ModelParams, mv: ModelVars, sv: SampleVars,
                 y_public: Optional[int], ch: dict, pp: PublicParams,
                 prefix: str = "") -> None:
    n = pp.n_bits
    x_lcs = [lc_of(v) for v in sv.x]
    dwt_constraints(b, x_lcs, sv.dwt_levels, mv.h, mv.g, mv.h_bar, mv.g_bar,
                    mv.eta, ch["alpha"], ch["alpha_bar"], n, model.dwt.c,
                    label_prefix=prefix + "dwt")
    xhat_lcs = [lc_of(v) for v in sv.dwt_levels[-1].xhat]
    pca_constraints(b, xhat_lcs, sv.pca, mv.mean, mv.v_rows, ch["alpha_pca"],
                    n, label_prefix=prefix + "pca")
    proj_lcs = [lc_of(v) for v in sv.pca.proj]
    svm_constraints(b, proj_lcs, mv.sv, mv.coef, mv.bias, sv.svm, model.svm,
                    y_public, ch["beta"], ch["alpha_max"], n,
                    label_prefix=prefix + "svm")


def build_inference_system(pp: PublicParams, model: ModelParams,
                           x: Optional[Sequence[FixedPoint]], y: int,
                           ch: dict, trace: Optional[PipelineTrace] = None,
                           feed: Optional[Sequence[int]] = None) -> tuple:
    """Returns (cs, builder, model_vars, sample_vars). Proving mode when a
    trace is supplied; verifier rebuild when feed holds the received
    witness values; structure-only otherwise."""
    cs = ConstraintSystem(pp.modulus)
    b = Builder(cs, proving=trace is not None,
                feed=iter(feed) if feed is not None else None)
    mv = _alloc_model(b, model)
    sv = _alloc_sample(b, model, x, trace, public_label=True)
    _emit_sample(b, model, mv, sv, y, ch, pp)
    cs.freeze()
    return cs, b, mv, sv


# ---- proof bundle ----

@dataclass
class ProofBundle:
    kind: int                 # 0 inference, 1 proof-of-accuracy
    y: int                    # claimed label (0 for accuracy proofs)
    model_digest: bytes
    aux_digest: bytes
    challenges: dict
    payload: bytes

    def to_bytes(self) -> bytes:
        out = [PROOF_MAGIC, struct.pack("<HBI", PROOF_VERSION, self.kind, self.y),
               self.model_digest, self.aux_digest,
               struct.pack("<H", len(self.challenges))]
        for name, value in self.challenges.items():
            enc = name.encode()
            out.append(struct.pack("<B", len(enc)))
            out.append(enc)
            out.append(value.to_bytes(32, "little"))
        out.append(struct.pack("<I", len(self.payload)))
        out.append(self.payload)
        return b"".join(out)

    @staticmethod
    def from_bytes(data: bytes) -> "ProofBundle":
        try:
            if data[:4] != PROOF_MAGIC:
                raise ProofFormatError("bad magic")
            off = 4
            version, kind, y = struct.unpack_from("<HBI", data, off)
            off += 7
            if version != PROOF_VERSION:
                raise ProofFormatError(f"unsupported proof version {version}")
            model_digest = data[off:off + 32]
            aux_digest = data[off + 32:off + 64]
            off += 64
            (n_ch,) = struct.unpack_from("<H", data, off)
            off += 2
            challenges = {}
            for _ in range(n_ch):
                (ln,) = struct.unpack_from("<B", data, off)
                off += 1
                name = data[off:off + ln].decode()
                off += ln
                challenges[name] = int.from_bytes(data[off:off + 32], "little")
                off += 32
            (plen,) = struct.unpack_from("<I", data, off)
            off += 4
            payload = data[off:off + plen]
            if len(payload) != plen or off + plen != len(data):
                raise ProofFormatError("truncated or oversized proof")
            if len(model_digest) != 32 or len(aux_digest) != 32:
                raise ProofFormatError("truncated digest")
            return ProofBundle(kind=kind, y=y, model_digest=model_digest,
                               aux_digest=aux_digest, challenges=challenges,
                               payload=payload)
        except ProofFormatError:
            raise
        except (struct.error, UnicodeDecodeError, IndexError) as e:
            raise ProofFormatError(f"malformed proof container: {e}") from None


def _pack_payload(model_bytes: bytes, r_model: bytes, r_aux: bytes,
                  witness: Sequence[int]) -> bytes:
    out = [struct.pack("<I", len(model_bytes)), model_bytes, r_model, r_aux,
           struct.pack("<I", len(witness)), values_to_bytes(witness)]
    return b"".join(out)


def _unpack_payload(payload: bytes) -> tuple:
    try:
        (mlen,) = struct.unpack_from("<I", payload, 0)
        off = 4
        model_bytes = payload[off:off + mlen]
        if len(model_bytes) != mlen:
            raise ProofFormatError("truncated payload model")
        off += mlen
        r_model = payload[off:off + 32]
        r_aux = payload[off + 32:off + 64]
        off += 64
        (wcount,) = struct.unpack_from("<I", payload, off)
        off += 4
        need = 32 * wcount
        blob = payload[off:off + need]
        if len(blob) != need or len(r_aux) != 32:
            raise ProofFormatError("truncated payload witness")
        witness = [int.from_bytes(blob[i * 32:(i + 1) * 32], "little")
                   for i in range(wcount)]
        return model_bytes, r_model, r_aux, witness
    except struct.error as e:
        raise ProofFormatError(f"malformed payload: {e}") from None


# ---- backend interface ----

class DirectCheckBackend:
    """Desk-scale reference backend: the 'proof' is the full assignment and
    verification is a direct satisfiability check. Non-succinct and not
    zero-knowledge; exercises exactly the statement a CP-ZKP backend would."""

    name = "direct-check"

    def prove(self, cs: ConstraintSystem, assignment: Assignment) -> List[int]:
        ok, label = cs.is_satisfied(assignment)
        if not ok:
            raise PipelineError(
                f"internal: honest witness violates constraint {label!r}")
        order = cs.z_order()
        return [assignment.values[vid] for vid in order[cs.num_public + 1:]]

    def verify(self, cs: ConstraintSystem, assignment: Assignment) -> bool:
        ok, _ = cs.is_satisfied(assignment)
        return ok


BACKEND = DirectCheckBackend()


# ---- prove / verify ----

def prove(model: ModelParams, x: Sequence[FixedPoint], pp: PublicParams,
          r_model: bytes, r_aux: Optional[bytes] = None) -> tuple:
    """Returns (label, ProofBundle)."""
    model.validate()
    y, trace = dps_infer(model, x, pp)
    model_cm = commit_model(model, r_model, pp)
    if r_aux is None:
        r_aux = derive_aux_randomness(r_model, _sample_bytes(x))

    # allocation pass fixes the committed trace order
    cs = ConstraintSystem(pp.modulus)
    b = Builder(cs, proving=True)
    mv = _alloc_model(b, model)
    sv = _alloc_sample(b, model, x, trace, public_label=True)
    trace_values = [b.value(v) for v in sv.trace_ids]
    aux_cm = commit_aux(trace_values, r_aux)

    ch = inference_transcript(pp, x, y, model_cm.digest, aux_cm.digest)
    _emit_sample(b, model, mv, sv, y, ch, pp)
    cs.freeze()

    witness = BACKEND.prove(cs, b.assignment())
    payload = _pack_payload(model_canonical_bytes(model), r_model, r_aux, witness)
    bundle = ProofBundle(kind=0, y=y, model_digest=model_cm.digest,
                         aux_digest=aux_cm.digest, challenges=ch,
                         payload=payload)
    return y, bundle


def verify(cm_digest: bytes, x: Sequence[FixedPoint], y: int,
           bundle: ProofBundle, pp: PublicParams) -> bool:
    """Transcript replay, commitment checks, identical rebuild, backend
    satisfiability check. Malformed bundles reject rather than raise."""
    try:
        if bundle.kind != 0 or bundle.y != y:
            return False
        if bundle.model_digest != cm_digest:
            return False
        model_bytes, r_model, r_aux, witness = _unpack_payload(bundle.payload)
        model = model_from_dict(json.loads(model_bytes))
        if _commit(MODEL_DOMAIN_TAG, model_canonical_bytes(model), r_model) \
                != bundle.model_digest:
            return False
        if len(x) != model.sample_dim:
            return False
        ch = inference_transcript(pp, x, y, bundle.model_digest,
                                  bundle.aux_digest)
        if ch != bundle.challenges:
            return False
        cs, b, mv, sv = build_inference_system(pp, model, x, y, ch, feed=witness)
        if cs.num_witness != len(witness):
            return False
        trace_values = [b.value(v) for v in sv.trace_ids]
        if _commit(AUX_DOMAIN_TAG, values_to_bytes(trace_values), r_aux) \
                != bundle.aux_digest:
            return False
        if [b.value(v) for v in mv.all_ids()] != \
                model_value_list(model, pp.modulus):
            return False
        return BACKEND.verify(cs, b.assignment())
    except (PipelineError, R1CSError, ValueError, KeyError, IndexError):
        return False


def save_proof(bundle: ProofBundle, path: str) -> None:
    with open(path, "wb") as fh:
        fh.write(bundle.to_bytes())


def load_proof(path: str) -> ProofBundle:
    with open(path, "rb") as fh:
        return ProofBundle.from_bytes(fh.read())


# ---- constraint accounting (structural builds) ----

@dataclass
class AccountingDims:
    m: int
    c: int
    k: int
    s: int
    t: int
    n: int


def synthetic_model(dims: AccountingDims, levels: int = 1) -> ModelParams:
    """Zero-valued model of the given dimensions (structure-only builds)."""
    z = FixedPoint(0)
    per = [dims.t // dims.s] * dims.s
    for i in range(dims.t - sum(per)):
        per[i] += 1
    return ModelParams(
        dwt=DwtParams(h=[z] * dims.c, g=[z] * dims.c, h_bar=[z] * dims.c,
                      g_bar=[z] * dims.c, eta=z, levels=levels),
        pca=PcaParams(x_bar=[z] * dims.m, v_rows=[[z] * dims.m] * dims.k),
        svm=SvmParams(classes=[
            SvmClass(support_vectors=[[z] * dims.k] * cnt, coef=[z] * cnt, bias=z)
            for cnt in per], gamma=FixedPoint.encode("0.001")),
    )


def build_accounting_system(dims: AccountingDims) -> ConstraintSystem:
    """Structural system for the documented per-stage accounting: one
    decomposition + reconstruction level, a thresholding block sized for
    the full recursion (m - c/2 detail slots), PCA, and the SVM blocks."""
    from ezdps.dwt import threshold_constraints

    pp = PublicParams(n_bits=dims.n)
    model = synthetic_model(dims)
    cs = ConstraintSystem(pp.modulus)
    b = Builder(cs)
    mv = _alloc_model(b, model)
    sv = _alloc_sample(b, model, None, None, public_label=True)
    ch = {name: i + 2 for i, name in enumerate(INFERENCE_CHALLENGES)}
    _emit_sample(b, model, mv, sv, 1, ch, pp)
    # extend the built level-1 thresholding to the full-recursion total
    done = dims.m // 2
    total = dims.m - dims.c // 2
    for i in range(done, total):
        zd, za, zs, zo = (b.wit() for _ in range(4))
        threshold_constraints(b, zd, za, zs, zo, mv.eta, dims.n,
                              f"dwt.threshold[acct][{i}]")
    cs.freeze()
    return cs


def accounting_formulas(dims: AccountingDims) -> dict:
    """Closed-form counts: this scheme's per-stage rows and the
    generic-circuit baseline, for the loaded dimensions."""
    m, c, k, s, t, n = dims.m, dims.c, dims.k, dims.s, dims.t, dims.n
    return {
        "dwt_decompose_per_level": c * (c // 2 - 1) + 4,
        "dwt_threshold": (3 * n + 9) * (m - c // 2),
        "dwt_reconstruct_per_level": c * (c // 2 - 1) + 4,
        "pca": m,
        "svm_kernel": (2 * n + k) * t + 2 * s,
        "svm_class": (3 * n + 6) * (s - 1) + 2 * s,
        "baseline_dwt_decompose": 8 * m - 4 * c,
        "baseline_dwt_threshold": (5 * n + 12) * (m - c // 2),
        "baseline_dwt_reconstruct": 8 * m - 4 * c,
        "baseline_pca": m * k,
        "baseline_svm_kernel": (2 * n + k + 2) * t + s,
        "baseline_svm_class": (s * s - s) * (2 * n + 5) + 2 * s - 2,
    }
