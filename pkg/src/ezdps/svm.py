"""Multi-class one-vs-rest SVM with RBF kernel: decision witness and
constraint compilation.

Decision function per class: f = sum_i d_i * exp(-gamma * ||q - sv_i||^2) + bias,
with d_i the signed dual coefficients. The gamma factor folds into the
public exponent base e^(-gamma), so the in-circuit exponent is the squared
distance itself, truncated to the 20-fractional-bit encoding.

Constraint groups (n = value bit width, k = feature dim, t = total support
vectors, s = classes):

  svm.kernel    (2n + k)t + 2s   per SV: k squared-difference rows plus the
                                 exponent gadget (2n); plus the 2s value-index
                                 binding rows p = f + beta*c, pbar = fbar + beta*sigma
  svm.decision  t                dual-coefficient product rows
  svm.class     (3n+6)(s-1)+2s   the max check's s-1 comparisons plus the
                                 permutation chains (final equality folded)

Fixed-point rescaling (exponent narrowing, kernel chain, coefficient
products) is emitted under gadget.* labels. The claimed label can be a
public constant (single-inference proofs) or a committed witness variable
(proof-of-accuracy), with identical constraint shape either way.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence

from ezdps.fixedpoint import (EXP_FRAC_BITS, FRAC_BITS, FixedPoint,
                              fxp_sq64_to_exponent, trunc_div_toward_zero)
from ezdps.gadgets import (build_exp_table, exp_chain_value, exponent_gadget,
                           greater_equal, lc_add, lc_of, lc_scale, lc_sub,
                           perm_gadget, trunc_gadget, trunc_signed)
from ezdps.r1cs import Builder, LC

EXP_INT_BITS_GUARD = 12  # exponent integer bits the base table covers


class SvmError(ValueError):
    pass


class DegenerateTieError(SvmError):
    """Two decision values are bit-equal; the strict argmax is undefined."""


@dataclass
class SvmClass:
    support_vectors: List[List[FixedPoint]]
    coef: List[FixedPoint]       # signed dual coefficients (delta*y folded)
    bias: FixedPoint

    def __post_init__(self):
        if not self.support_vectors:
            raise SvmError("each class needs at least one support vector")
        if len(self.coef) != len(self.support_vectors):
            raise SvmError("one coefficient per support vector")


@dataclass
class SvmParams:
    classes: List[SvmClass]
    gamma: FixedPoint = FixedPoint.encode("0.001")

    def __post_init__(self):
        if not self.classes:
            raise SvmError("at least one class")
        if self.gamma.raw <= 0:
            raise SvmError("gamma must be positive")
        k = len(self.classes[0].support_vectors[0])
        for cl in self.classes:
            if any(len(sv) != k for sv in cl.support_vectors):
                raise SvmError("support vector dimension mismatch")

    @property
    def s(self) -> int:
        return len(self.classes)

    @property
    def k(self) -> int:
        return len(self.classes[0].support_vectors[0])

    @property
    def t(self) -> int:
        return sum(len(c.support_vectors) for c in self.classes)

    def exp_table(self, n: int) -> List[int]:
        base = math.exp(-self.gamma.to_float())
        return build_exp_table(base, n)


@dataclass
class DecisionTrace:
    """Committed SVM auxiliaries: per-SV exponents, kernel values, and
    coefficient products; the permuted decision list with its index map."""

    exponents: List[List[int]]   # Q.20 raws, per class per SV
    kernels: List[List[int]]     # Q.32 raws
    products: List[List[int]]    # Q.32 raws of d_i * kernel_i
    f: List[FixedPoint]          # decision values, one per class
    label: int                   # argmax, 1-based
    f_bar: List[int]             # permuted decision raws, maximum first
    sigma: List[int]             # 1-based source index per permuted slot


def svm_decision_values(x: Sequence[FixedPoint], params: SvmParams, n: int
                        ) -> tuple:
    """Fixed-point decision values mirroring the circuit bit-exactly.

    Returns (f values, per-class exponents, kernels, coefficient products)."""
    if len(x) != params.k:
        raise SvmError(f"feature length {len(x)} != k={params.k}")
    table = params.exp_table(n)
    exps, kernels, products, fs = [], [], [], []
    for cl in params.classes:
        ce, ck, cp = [], [], []
        acc = 0
        for sv, d in zip(cl.support_vectors, cl.coef):
            dist = sum((xi.raw - si.raw) ** 2 for xi, si in zip(x, sv))
            e20 = fxp_sq64_to_exponent(dist)
            if e20.raw >= 1 << (EXP_INT_BITS_GUARD + EXP_FRAC_BITS):
                raise SvmError(
                    f"kernel exponent {e20.decode()} exceeds the table range "
                    f"({EXP_INT_BITS_GUARD} integer bits)")
            kv = exp_chain_value(e20.raw, table, n)
            q = trunc_div_toward_zero(d.raw * kv, FRAC_BITS)
            ce.append(e20.raw)
            ck.append(kv)
            cp.append(q)
            acc += q
        exps.append(ce)
        kernels.append(ck)
        products.append(cp)
        fs.append(FixedPoint(acc + cl.bias.raw))
    return fs, exps, kernels, products


def svm_classify(f: Sequence[FixedPoint]) -> tuple:
    """1-based argmax and the permuted (value, index) witness, max first.

    Bit-equal maxima are rejected as a degenerate case: the comparison
    gadget cannot certify a strict winner between identical values."""
    if not f:
        raise SvmError("empty decision vector")
    raws = [v.raw for v in f]
    best = max(range(len(raws)), key=lambda i: (raws[i], -i))
    if raws.count(raws[best]) > 1:
        raise DegenerateTieError("tied decision values")
    order = [best] + [i for i in range(len(raws)) if i != best]
    f_bar = [raws[i] for i in order]
    sigma = [i + 1 for i in order]
    return best + 1, f_bar, sigma


def svm_witness(x: Sequence[FixedPoint], params: SvmParams, n: int) -> DecisionTrace:
    fs, exps, kernels, products = svm_decision_values(x, params, n)
    label, f_bar, sigma = svm_classify(fs)
    return DecisionTrace(exponents=exps, kernels=kernels, products=products,
                         f=fs, label=label, f_bar=f_bar, sigma=sigma)


@dataclass
class SvmVars:
    """Variable ids of the committed SVM trace. In public-label mode
    f_bar/sigma cover permuted slots 2..s (slot 1 folds onto the claimed
    class); in witness-label mode they cover all s slots and label_var is
    sigma[0]."""

    exponents: List[List[int]]
    kernels: List[List[int]]
    products: List[List[int]]
    f_bar: List[int]
    sigma: List[int]
    label_var: Optional[int] = None


def svm_constraints(b: Builder, x_lcs: Sequence[LC], sv_vars, coef_vars,
                    bias_vars, sv: SvmVars, params: SvmParams,
                    y_public: Optional[int], beta: int, alpha_max: int,
                    n: int, label_prefix: str = "svm") -> None:
    """Kernel, decision and classification blocks for one sample.

    sv_vars[c][i][j], coef_vars[c][i], bias_vars[c] are the committed model
    variables. y_public is the 1-based claimed label, or None to bind the
    label to sv.label_var instead (identical row counts)."""
    cs = b.cs
    p = cs.modulus
    s, k = params.s, params.k
    table = params.exp_table(n)
    exp_width = 2 * n + k.bit_length() + 1
    drop = 2 * FRAC_BITS - EXP_FRAC_BITS

    f_lcs: List[LC] = []
    flat = 0
    for c in range(s):
        terms: LC = []
        for i in range(len(params.classes[c].support_vectors)):
            klabel = f"{label_prefix}.kernel.sv[{flat}]"
            dist_terms: LC = []
            for j in range(k):
                d_lc = lc_sub(x_lcs[j], lc_of(sv_vars[c][i][j]), p)
                u = b.wit(pow(b.eval_lc(d_lc), 2, p) if b.proving else None)
                cs.enforce(d_lc, d_lc, lc_of(u), klabel)
                dist_terms.append((u, 1))
            trunc_gadget(b, dist_terms, exp_width, drop,
                         f"gadget.svm.exponent[{flat}]",
                         out_var=sv.exponents[c][i])
            exponent_gadget(b, lc_of(sv.exponents[c][i]), table, n, klabel,
                            fxp=True,
                            rescale_label=f"gadget.svm.chain[{flat}]",
                            out_var=sv.kernels[c][i])
            # d_i * kernel_i, then one rescale to Q.32
            u2 = b.wit(b.value(coef_vars[c][i]) * b.value(sv.kernels[c][i]) % p
                       if b.proving else None)
            cs.enforce(lc_of(coef_vars[c][i]), lc_of(sv.kernels[c][i]),
                       lc_of(u2), f"{label_prefix}.decision[{flat}]")
            trunc_signed(b, lc_of(u2), FRAC_BITS + n + 2, FRAC_BITS,
                         f"gadget.svm.coef[{flat}]", out_var=sv.products[c][i])
            terms.append((sv.products[c][i], 1))
            flat += 1
        f_lcs.append(lc_add(terms, lc_of(bias_vars[c])))

    _classification_constraints(b, f_lcs, sv, y_public, beta, alpha_max, n,
                                label_prefix)


def _classification_constraints(b: Builder, f_lcs: Sequence[LC], sv: SvmVars,
                                y_public: Optional[int], beta: int,
                                alpha_max: int, n: int, label_prefix: str
                                ) -> None:
    """Value-index binding rows (2s, kernel group), the s-1 comparisons and
    the permutation chains (classification group)."""
    cs = b.cs
    p = cs.modulus
    s = len(f_lcs)
    shift = b.const_lc(1 << (n - 1))
    blabel = f"{label_prefix}.kernel.bind"
    clabel = f"{label_prefix}.class"

    if y_public is not None:
        top_lc = f_lcs[y_public - 1]
        top_idx_lc = b.const_lc(y_public)
        rest = list(zip(sv.f_bar, sv.sigma))
    else:
        top_lc = lc_of(sv.f_bar[0])
        top_idx_lc = lc_of(sv.sigma[0])
        rest = list(zip(sv.f_bar[1:], sv.sigma[1:]))

    # p = f + beta*c and pbar = fbar + beta*sigma, as explicit rows
    p_vars = []
    for c in range(s):
        bound = lc_add(f_lcs[c], b.const_lc(beta * (c + 1) % p))
        v = b.wit(b.eval_lc(bound) if b.proving else None)
        cs.enforce_linear(lc_of(v), bound, blabel)
        p_vars.append(v)
    pbar_lcs = []
    first = lc_add(top_lc, lc_scale(top_idx_lc, beta, p))
    v = b.wit(b.eval_lc(first) if b.proving else None)
    cs.enforce_linear(lc_of(v), first, blabel)
    pbar_lcs.append(lc_of(v))
    for fb, sg in rest:
        bound = lc_add(lc_of(fb), lc_scale(lc_of(sg), beta, p))
        v = b.wit(b.eval_lc(bound) if b.proving else None)
        cs.enforce_linear(lc_of(v), bound, blabel)
        pbar_lcs.append(lc_of(v))

    # the claimed class's value beats every other permuted slot
    for fb, _ in rest:
        greater_equal(b, lc_add(top_lc, shift), lc_add(lc_of(fb), shift), n,
                      clabel)
    perm_gadget(b, [lc_of(v) for v in p_vars], pbar_lcs, alpha_max, clabel)


def svm_kernel_rows(n: int, k: int, t: int, s: int) -> int:
    return (2 * n + k) * t + 2 * s


def svm_class_rows(n: int, s: int) -> int:
    return (3 * n + 6) * (s - 1) + 2 * s
