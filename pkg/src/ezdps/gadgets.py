"""Reusable constraint-builder subroutines.

Each gadget appends constraints to a Builder's system under a caller-chosen
label and, in proving mode, computes the auxiliary witness values it
introduces. Gadgets never branch on witness values, so prover and verifier
emit structurally identical systems.

Closed-form row counts (n = operand bit width, L = array length, w = width):
  bit_decompose        n + 1
  greater_equal        3n + 6      (satisfiable iff a >= b)
  exponent_gadget      2n          (plus n-1 rescale gadgets in fxp mode)
  abs_gadget           2n + 5
  perm_gadget          2L
  max_gadget           (L-1)(3n+6) + 2L + 1
  trunc_gadget         w + 2
  trunc_signed         w + 4

Comparisons assume nonnegative operands below 2^n; callers pre-shift signed
values by +2^(n-1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

from ezdps.fixedpoint import (EXP_FRAC_BITS, FRAC_BITS, SCALE, field_to_raw,
                              field_to_signed)
from ezdps.r1cs import LC, Builder


@dataclass
class GadgetResult:
    """Output variable(s), auxiliary witness variables introduced, and the
    number of constraints emitted under the gadget's own label."""

    output: object
    aux: list
    constraint_count: int
    rescale_count: int = 0  # rows emitted under separate gadget.* labels


class GadgetError(ValueError):
    pass


# ---- linear-combination helpers ----

def lc_add(*lcs: LC) -> LC:
    out: LC = []
    for terms in lcs:
        out.extend(terms)
    return out


def lc_scale(terms: LC, k: int, p: int) -> LC:
    k %= p
    return [(vid, coef * k % p) for vid, coef in terms]


def lc_sub(a: LC, b: LC, p: int) -> LC:
    return lc_add(a, lc_scale(b, p - 1, p))


def lc_of(var: int) -> LC:
    return [(var, 1)]


# ---- building blocks ----

def bit_decompose(b: Builder, x_lc: LC, width: int, label: str) -> GadgetResult:
    """v[i]^2 = v[i] for each bit plus one recomposition constraint."""
    cs = b.cs
    bits = []
    if b.proving:
        v = b.eval_lc(x_lc)
        if v >= 1 << width:
            raise GadgetError(f"value {v} does not fit {width} bits ({label})")
        for i in range(width):
            bits.append(b.wit((v >> i) & 1))
    else:
        for _ in range(width):
            bits.append(b.wit())
    for bit in bits:
        cs.enforce(lc_of(bit), lc_of(bit), lc_of(bit), label)
    recomp = [(bit, 1 << i) for i, bit in enumerate(bits)]
    cs.enforce_linear(recomp, x_lc, label)
    return GadgetResult(output=bits, aux=bits, constraint_count=width + 1)


def greater_equal(b: Builder, a_lc: LC, b_lc: LC, n: int, label: str) -> GadgetResult:
    """a >= b for nonnegative n-bit operands, via the sign bit of
    c = 2^n + a - b. Satisfied exactly when a >= b."""
    cs = b.cs
    p = cs.modulus
    if b.proving:
        av, bv = b.eval_lc(a_lc), b.eval_lc(b_lc)
        if av >= 1 << n or bv >= 1 << n:
            raise GadgetError(f"comparison operand exceeds {n} bits ({label})")
        c_var = b.wit(((1 << n) + av - bv) % p)
    else:
        c_var = b.wit()
    cs.enforce_linear(
        lc_of(c_var), lc_add(b.const_lc(1 << n), a_lc, lc_scale(b_lc, p - 1, p)), label
    )
    aux = [c_var]
    aux += bit_decompose(b, a_lc, n, label).output
    aux += bit_decompose(b, b_lc, n, label).output
    c_bits = bit_decompose(b, lc_of(c_var), n + 1, label).output
    aux += c_bits
    cs.enforce_linear(lc_of(c_bits[n]), b.const_lc(1), label)
    return GadgetResult(output=c_var, aux=aux, constraint_count=3 * n + 6)


def trunc_gadget(b: Builder, u_lc: LC, width: int, drop: int, label: str,
                 out_var: Optional[int] = None) -> GadgetResult:
    """t = u >> drop for nonnegative u below 2^width."""
    cs = b.cs
    bits = bit_decompose(b, u_lc, width, label).output
    if out_var is None:
        out_var = b.wit(b.eval_lc(u_lc) >> drop if b.proving else None)
    elif b.proving and b.value(out_var) != b.eval_lc(u_lc) >> drop:
        raise GadgetError(f"precomputed rescale value mismatch ({label})")
    high = [(bits[i], 1 << (i - drop)) for i in range(drop, width)]
    cs.enforce_linear(lc_of(out_var), high, label)
    return GadgetResult(output=out_var, aux=bits, constraint_count=width + 2)


def trunc_signed(b: Builder, x_lc: LC, width: int, drop: int, label: str,
                 out_var: Optional[int] = None) -> GadgetResult:
    """Truncation toward zero of a signed (field-embedded) value: the sign
    is a committed +-1 auxiliary and the magnitude is bit-decomposed."""
    cs = b.cs
    p = cs.modulus
    if b.proving:
        xv = field_to_signed(b.eval_lc(x_lc), p, 1 << width)
        sign = 1 if xv >= 0 else -1
        mag = abs(xv)
        s_var = b.wit(sign % p)
        mag_var = b.wit(mag)
        out_val = sign * (mag >> drop) % p
    else:
        s_var = b.wit()
        mag_var = b.wit()
        out_val = None
    cs.enforce(lc_of(s_var), lc_of(s_var), b.const_lc(1), label)       # s^2 = 1
    cs.enforce(lc_of(s_var), x_lc, lc_of(mag_var), label)              # s*x = |x|
    bits = bit_decompose(b, lc_of(mag_var), width, label).output
    if out_var is None:
        out_var = b.wit(out_val)
    elif b.proving and b.value(out_var) != out_val:
        raise GadgetError(f"precomputed rescale value mismatch ({label})")
    high = [(bits[i], 1 << (i - drop)) for i in range(drop, width)]
    cs.enforce(lc_of(s_var), high, lc_of(out_var), label)              # s*(|x|>>d) = t
    return GadgetResult(output=out_var, aux=[s_var, mag_var] + bits,
                        constraint_count=width + 4)


def abs_gadget(b: Builder, a_lc: LC, n: int, label: str,
               out_var: Optional[int] = None) -> GadgetResult:
    """a' = |a| via the sign bit of c = a + 2^n. The magnitude a' (not the
    signed value) is bit-decomposed, which also range-checks |a| < 2^n."""
    cs = b.cs
    p = cs.modulus
    if b.proving:
        av = field_to_signed(b.eval_lc(a_lc), p, 1 << n)
        if out_var is None:
            out_var = b.wit(abs(av))
        c_var = b.wit((1 << n) + av)
    else:
        if out_var is None:
            out_var = b.wit()
        c_var = b.wit()
    cs.enforce_linear(lc_of(c_var), lc_add(a_lc, b.const_lc(1 << n)), label)
    aux = [c_var]
    aux += bit_decompose(b, lc_of(out_var), n, label).output
    c_bits = bit_decompose(b, lc_of(c_var), n + 1, label).output
    aux += c_bits
    # (1 - msb)(a + a') + msb(a - a') = 0, rearranged to msb*2a' = a + a'
    cs.enforce(lc_of(c_bits[n]), [(out_var, 2)], lc_add(a_lc, lc_of(out_var)), label)
    return GadgetResult(output=out_var, aux=aux, constraint_count=2 * n + 5)


def perm_gadget(b: Builder, left_lcs: Sequence[LC], right_lcs: Sequence[LC],
                alpha: int, label: str) -> GadgetResult:
    """Multiset equality via characteristic polynomials: both product
    chains prod(v[i] - alpha) must agree at the transcript point alpha.
    The final equality is folded into the last chain row (2L rows total)."""
    cs = b.cs
    p = cs.modulus
    if len(left_lcs) != len(right_lcs):
        raise GadgetError("permutation check length mismatch")
    n = len(left_lcs)
    if n == 0:
        raise GadgetError("empty permutation check")
    neg_alpha = b.const_lc(p - alpha % p)
    aux = []

    def chain(lcs, last_out: Optional[int]):
        cur = None
        for i, terms in enumerate(lcs):
            factor = lc_add(terms, neg_alpha)
            lastrow = i == n - 1 and last_out is not None
            if cur is None:
                # materialize the first factor: r1 = F1 * 1
                if lastrow:
                    cs.enforce(factor, b.const_lc(1), lc_of(last_out), label)
                    return None
                r = b.wit(b.eval_lc(factor) if b.proving else None)
                cs.enforce(factor, b.const_lc(1), lc_of(r), label)
            else:
                if lastrow:
                    cs.enforce(lc_of(cur), factor, lc_of(last_out), label)
                    return None
                r = b.wit(b.eval_lc(lc_of(cur)) * b.eval_lc(factor) % p
                          if b.proving else None)
                cs.enforce(lc_of(cur), factor, lc_of(r), label)
            aux.append(r)
            cur = r
        return cur

    left_end = chain(left_lcs, None)
    chain(right_lcs, left_end)
    return GadgetResult(output=None, aux=aux, constraint_count=2 * n)


def max_gadget(b: Builder, v_lc: LC, arr_lcs: Sequence[LC], alpha: int, n: int,
               label: str, minimum: bool = False) -> GadgetResult:
    """v is the max (or min) of arr: the prover supplies a permuted copy
    with the extreme value first, compared pairwise and bound by Perm.
    Operands must be nonnegative below 2^n (pre-shift signed inputs)."""
    cs = b.cs
    if not arr_lcs:
        raise GadgetError("max/min of empty array")
    L = len(arr_lcs)
    if b.proving:
        vals = [b.eval_lc(t) for t in arr_lcs]
        pick = min(range(L), key=lambda i: (vals[i], i)) if minimum \
            else max(range(L), key=lambda i: (vals[i], -i))
        order = [pick] + [i for i in range(L) if i != pick]
        permuted = [b.wit(vals[i]) for i in order]
    else:
        permuted = [b.wit() for _ in range(L)]
    count = 0
    for i in range(1, L):
        if minimum:
            count += greater_equal(b, lc_of(permuted[i]), lc_of(permuted[0]), n, label
                                   ).constraint_count
        else:
            count += greater_equal(b, lc_of(permuted[0]), lc_of(permuted[i]), n, label
                                   ).constraint_count
    cs.enforce_linear(v_lc, lc_of(permuted[0]), label)
    count += 1
    count += perm_gadget(b, arr_lcs, [lc_of(v) for v in permuted], alpha, label
                         ).constraint_count
    return GadgetResult(output=permuted[0], aux=permuted, constraint_count=count)


def min_gadget(b: Builder, v_lc: LC, arr_lcs: Sequence[LC], alpha: int, n: int,
               label: str) -> GadgetResult:
    return max_gadget(b, v_lc, arr_lcs, alpha, n, label, minimum=True)


# ---- exponentiation ----

def build_exp_table(base_real: float, n: int, frac_bits: int = EXP_FRAC_BITS) -> list:
    """Public constants base^(2^(j-frac_bits)) for bit positions j in [0, n),
    quantized to Q.32 raws. base_real must lie in (0, 1]."""
    if not 0.0 < base_real <= 1.0:
        raise GadgetError("exponent base must lie in (0, 1]")
    table = []
    for j in range(n):
        val = base_real ** (2.0 ** (j - frac_bits))
        table.append(max(0, round(val * SCALE)))
    return table


def exponent_gadget(b: Builder, x_lc: LC, table: Sequence[int], n: int, label: str,
                    fxp: bool = True, rescale_label: str = "gadget.exp.rescale",
                    chain_width: int = 2 * FRAC_BITS + 2,
                    out_var: Optional[int] = None) -> GadgetResult:
    """b = prod_i (table[i]*v[i] + unit*(1 - v[i])) over the bit
    decomposition v of the exponent x.

    In fxp mode the unit is 2^32 and every chain product is rescaled by a
    truncation gadget emitted under rescale_label; in field mode products
    chain without rescaling (unit 1). 2n rows under `label`."""
    cs = b.cs
    p = cs.modulus
    if len(table) != n:
        raise GadgetError(f"base table has {len(table)} entries, need {n}")
    if n < 2:
        raise GadgetError("exponent bit width must be at least 2")
    unit = SCALE if fxp else 1
    bits = bit_decompose(b, x_lc, n, label).output
    aux = list(bits)
    rescales = 0

    def factor(i: int) -> LC:
        return [(bits[i], (table[i] - unit) % p), (0, unit)]

    cur = factor(0)
    for i in range(1, n):
        last = i == n - 1
        prod_val = b.eval_lc(cur) * b.eval_lc(factor(i)) % p if b.proving else None
        if fxp:
            u = b.wit(prod_val)
            cs.enforce(cur, factor(i), lc_of(u), label)
            res = trunc_gadget(b, lc_of(u), chain_width, FRAC_BITS,
                               rescale_label, out_var=out_var if last else None)
            rescales += res.constraint_count
            aux.append(u)
            cur = lc_of(res.output)
        else:
            if last and out_var is not None:
                cs.enforce(cur, factor(i), lc_of(out_var), label)
                cur = lc_of(out_var)
            else:
                u = b.wit(prod_val)
                cs.enforce(cur, factor(i), lc_of(u), label)
                aux.append(u)
                cur = lc_of(u)
    out = cur[0][0]
    return GadgetResult(output=out, aux=aux, constraint_count=2 * n,
                        rescale_count=rescales)


def exp_chain_value(x_raw: int, table: Sequence[int], n: int) -> int:
    """Witness-side mirror of the fxp exponent chain (bit-exact)."""
    if x_raw >= 1 << n:
        raise GadgetError(f"exponent {x_raw} does not fit {n} bits")
    cur = table[0] if x_raw & 1 else SCALE
    for i in range(1, n):
        f = table[i] if (x_raw >> i) & 1 else SCALE
        cur = (cur * f) >> FRAC_BITS
    return cur


# ---- kernel gadgets (alternative SVM kernels) ----

def _squared_distance_rows(b: Builder, xi_lcs, xj_lcs, label):
    """Per-coordinate difference squares; returns the Q.64 sum LC."""
    cs = b.cs
    p = cs.modulus
    terms: LC = []
    count = 0
    for ai, aj in zip(xi_lcs, xj_lcs):
        d = lc_sub(ai, aj, p)
        u = b.wit(pow(b.eval_lc(d), 2, p) if b.proving else None)
        cs.enforce(d, d, lc_of(u), label)
        terms.append((u, 1))
        count += 1
    return terms, count


def laplace_kernel(b: Builder, xi_lcs, xj_lcs, gamma_real: float, n: int,
                   label: str) -> GadgetResult:
    """c = base^r with base = e^(-gamma') and r the (non-squared) norm.
    Square roots are not circuit-native, so r is a prover-supplied Q.32
    value certified by r^2 <= D < (r+1)^2 plus a nonnegativity check."""
    cs = b.cs
    p = cs.modulus
    dist_lc, count = _squared_distance_rows(b, xi_lcs, xj_lcs, label)
    if b.proving:
        dval = b.eval_lc(dist_lc)
        r_val = math.isqrt(dval)  # Q.64 isqrt is the Q.32 norm, rounded down
        r = b.wit(r_val)
        sq = b.wit(r_val * r_val % p)
    else:
        r = b.wit()
        sq = b.wit()
    cs.enforce(lc_of(r), lc_of(r), lc_of(sq), label)
    count += 1
    # operand widths follow the Q.32 value bounds (norms below 2^12), not
    # the exponent bit count n
    r_width = FRAC_BITS + 12
    wide = 2 * r_width + 2
    count += greater_equal(b, dist_lc, lc_of(sq), wide, label).constraint_count
    upper = lc_add(lc_of(sq), [(r, 2)], b.const_lc(1))  # (r+1)^2 = r^2 + 2r + 1
    count += greater_equal(b, upper, lc_add(dist_lc, b.const_lc(1)), wide, label
                           ).constraint_count
    count += greater_equal(b, lc_of(r), b.const_lc(0), r_width, label
                           ).constraint_count
    # exponent = r truncated from Q.32 to Q.20; gamma' folds into the base
    e20 = trunc_gadget(b, lc_of(r), r_width, FRAC_BITS - EXP_FRAC_BITS, label)
    count += e20.constraint_count
    table = build_exp_table(math.exp(-gamma_real), n)
    res = exponent_gadget(b, lc_of(e20.output), table, n, label,
                          rescale_label="gadget.laplace.rescale")
    count += res.constraint_count
    return GadgetResult(output=res.output, aux=[r, sq], constraint_count=count,
                        rescale_count=res.rescale_count)


def _dot_product_rows(b: Builder, xi_lcs, xj_lcs, label):
    cs = b.cs
    p = cs.modulus
    terms: LC = []
    count = 0
    for ai, aj in zip(xi_lcs, xj_lcs):
        u = b.wit(b.eval_lc(ai) * b.eval_lc(aj) % p if b.proving else None)
        cs.enforce(ai, aj, lc_of(u), label)
        terms.append((u, 1))
        count += 1
    return terms, count


def _division_bracket(b: Builder, num_lc: LC, den_lc: LC, out_var: int,
                      width: int, label: str) -> int:
    """Certify out = floor(num*2^32 / den) for nonnegative operands:
    the remainder num*2^32 - out*den must lie in [0, den), which pins the
    quotient uniquely (a +-1 change of out violates one side)."""
    cs = b.cs
    p = cs.modulus
    prod = b.wit(b.value(out_var) * b.eval_lc(den_lc) % p if b.proving else None)
    cs.enforce(lc_of(out_var), den_lc, lc_of(prod), label)
    scaled = lc_scale(num_lc, SCALE, p)
    count = 1
    count += greater_equal(b, scaled, lc_of(prod), width, label
                           ).constraint_count
    upper = lc_add(lc_of(prod), den_lc, b.const_lc(p - 1))
    count += greater_equal(b, upper, scaled, width, label).constraint_count
    return count


def tanh_core(b: Builder, b_lc: LC, n: int, label: str) -> GadgetResult:
    """a1 = e^b (nonnegative b), a1*a2 = 1, c*(a1+a2) = a1-a2, each product
    certified within one ulp. Output c = tanh(b) in Q.32."""
    cs = b.cs
    p = cs.modulus
    # base e > 1: represent a1 = e^b as 1 / e^(-b) ... instead compute the
    # pair directly: a2 = e^(-b) via the table, then a1 certified as 1/a2.
    table = build_exp_table(math.exp(-1.0), n)
    a2_res = exponent_gadget(b, b_lc, table, n, label,
                             rescale_label="gadget.tanh.rescale")
    a2 = a2_res.output
    count = a2_res.constraint_count
    if b.proving:
        a2v = b.value(a2)
        if a2v == 0:
            raise GadgetError("tanh exponent out of range (a2 underflow)")
        a1 = b.wit((SCALE * SCALE) // a2v)
    else:
        a1 = b.wit()
    # a1*a2 = 1 in Q.32: a1 is floor(2^64 / a2), pinned by the remainder
    # 2^64 - a1*a2 lying in [0, a2)
    prod = b.wit(b.value(a1) * b.value(a2) % p if b.proving else None)
    cs.enforce(lc_of(a1), lc_of(a2), lc_of(prod), label)
    count += 1
    unit64 = b.const_lc(SCALE * SCALE)
    w = 2 * FRAC_BITS + n + 2
    count += greater_equal(b, unit64, lc_of(prod), w, label).constraint_count
    upper = lc_add(lc_of(prod), lc_of(a2), b.const_lc(p - 1))
    count += greater_equal(b, upper, unit64, w, label).constraint_count
    # c*(a1+a2) = a1-a2 (b >= 0 so a1 >= a2 and c >= 0)
    den = lc_add(lc_of(a1), lc_of(a2))
    num = lc_sub(lc_of(a1), lc_of(a2), p)
    if b.proving:
        a1v, a2v = b.value(a1), b.value(a2)
        c_var = b.wit(((a1v - a2v) * SCALE) // (a1v + a2v))
    else:
        c_var = b.wit()
    count += _division_bracket(b, num, den, c_var, w, label)
    return GadgetResult(output=c_var, aux=[a1, a2], constraint_count=count,
                        rescale_count=a2_res.rescale_count)


def sigmoid_kernel(b: Builder, xi_lcs, xj_lcs, alpha_h: float, beta_h: float,
                   n: int, label: str) -> GadgetResult:
    """tanh(alpha*(xi . xj) - beta); the shifted argument must be
    nonnegative for the witness (prover pre-check)."""
    p = b.cs.modulus
    dot_lc, count = _dot_product_rows(b, xi_lcs, xj_lcs, label)
    dot32 = trunc_signed(b, dot_lc, 2 * FRAC_BITS + n, FRAC_BITS, label)
    count += dot32.constraint_count
    a_raw = round(alpha_h * SCALE)
    scaled = trunc_signed(b, [(dot32.output, a_raw)], 2 * FRAC_BITS + n,
                          FRAC_BITS, label)
    count += scaled.constraint_count
    b_lc = lc_add(lc_of(scaled.output), b.const_lc(p - round(beta_h * SCALE) % p))
    if b.proving and field_to_raw(b.eval_lc(b_lc), p) < 0:
        raise GadgetError("sigmoid kernel argument is negative")
    # narrow the Q.32 argument to the Q.20 exponent encoding
    b20 = trunc_gadget(b, b_lc, FRAC_BITS + n, FRAC_BITS - EXP_FRAC_BITS, label)
    count += b20.constraint_count
    core = tanh_core(b, lc_of(b20.output), n, label)
    return GadgetResult(output=core.output, aux=core.aux,
                        constraint_count=count + core.constraint_count,
                        rescale_count=core.rescale_count)


def polynomial_kernel(b: Builder, xi_lcs, xj_lcs, gamma_real: float, add_c: float,
                      degree: int, n: int, label: str) -> GadgetResult:
    """(gamma * xi.xj + a)^degree via repeated squaring with rescaling."""
    cs = b.cs
    p = cs.modulus
    if degree < 1:
        raise GadgetError("polynomial kernel degree must be >= 1")
    dot_lc, count = _dot_product_rows(b, xi_lcs, xj_lcs, label)
    width = 2 * FRAC_BITS + n
    g_raw = round(gamma_real * SCALE)
    scaled = trunc_signed(b, lc_scale(dot_lc, g_raw, p), width + FRAC_BITS,
                          2 * FRAC_BITS, label)
    count += scaled.constraint_count
    base_lc = lc_add(lc_of(scaled.output), b.const_lc(round(add_c * SCALE) % p))
    # left-to-right square-and-multiply over the public degree
    acc = base_lc
    for bit in bin(degree)[3:]:
        sq = b.wit(pow(b.eval_lc(acc), 2, p) if b.proving else None)
        cs.enforce(acc, acc, lc_of(sq), label)
        count += 1
        res = trunc_signed(b, lc_of(sq), width, FRAC_BITS, label)
        count += res.constraint_count
        acc = lc_of(res.output)
        if bit == "1":
            m = b.wit(b.eval_lc(acc) * b.eval_lc(base_lc) % p if b.proving else None)
            cs.enforce(acc, base_lc, lc_of(m), label)
            count += 1
            res = trunc_signed(b, lc_of(m), width, FRAC_BITS, label)
            count += res.constraint_count
            acc = lc_of(res.output)
    out = b.wit(b.eval_lc(acc) if b.proving else None)
    cs.enforce_linear(lc_of(out), acc, label)
    count += 1
    return GadgetResult(output=out, aux=[out], constraint_count=count)


# ---- activation gadgets ----

def relu_activation(b: Builder, x_lc: LC, alpha: int, n: int, label: str,
                    leaky: bool = False) -> GadgetResult:
    """max(x, 0) (or max(0.01x, x)) with operands pre-shifted by 2^(n-1)."""
    p = b.cs.modulus
    shift = b.const_lc(1 << (n - 1))
    if leaky:
        slope = round(0.01 * SCALE)
        other = trunc_signed(b, [(vid, coef * slope % p) for vid, coef in x_lc],
                             FRAC_BITS + n, FRAC_BITS, label)
        other_lc = lc_of(other.output)
        extra = other.constraint_count
    else:
        other_lc = b.const_lc(0)
        extra = 0
    if b.proving:
        xv = field_to_raw(b.eval_lc(x_lc), p)
        ov = field_to_raw(b.eval_lc(other_lc), p)
        out = b.wit(max(xv, ov) % p)
    else:
        out = b.wit()
    res = max_gadget(b, lc_add(lc_of(out), shift),
                     [lc_add(x_lc, shift), lc_add(other_lc, shift)],
                     alpha, n, label)
    return GadgetResult(output=out, aux=res.aux,
                        constraint_count=res.constraint_count + extra)


def sigmoid_activation(b: Builder, x_lc: LC, n: int, label: str) -> GadgetResult:
    """1/(1 + e^-x) for nonnegative x: a = e^-x then c*(1+a) = 1."""
    cs = b.cs
    p = cs.modulus
    table = build_exp_table(math.exp(-1.0), n)
    a_res = exponent_gadget(b, x_lc, table, n, label,
                            rescale_label="gadget.sigmoid.rescale")
    a = a_res.output
    count = a_res.constraint_count
    den = lc_add(b.const_lc(SCALE), lc_of(a))
    if b.proving:
        c_var = b.wit((SCALE * SCALE) // (SCALE + b.value(a)))
    else:
        c_var = b.wit()
    count += _division_bracket(b, b.const_lc(SCALE), den, c_var,
                               2 * FRAC_BITS + n, label)
    return GadgetResult(output=c_var, aux=[a], constraint_count=count,
                        rescale_count=a_res.rescale_count)


def tanh_activation(b: Builder, x_lc: LC, n: int, label: str) -> GadgetResult:
    return tanh_core(b, x_lc, n, label)


def maxpool_activation(b: Builder, out_lc: LC, window_lcs, alpha: int, n: int,
                       label: str) -> GadgetResult:
    return max_gadget(b, out_lc, window_lcs, alpha, n, label)


KERNEL_GADGETS = {"laplace": laplace_kernel, "sigmoid": sigmoid_kernel,
                  "polynomial": polynomial_kernel}


def kernel_gadget(b: Builder, kind: str, *args, **kwargs) -> GadgetResult:
    try:
        return KERNEL_GADGETS[kind](b, *args, **kwargs)
    except KeyError:
        raise GadgetError(f"unknown kernel {kind!r}") from None


ACTIVATION_GADGETS = {
    "sigmoid": sigmoid_activation,
    "relu": relu_activation,
    "leaky_relu": lambda b, *a, **kw: relu_activation(b, *a, leaky=True, **kw),
    "tanh": tanh_activation,
    "maxpool": maxpool_activation,
}


def activation_gadget(b: Builder, kind: str, *args, **kwargs) -> GadgetResult:
    try:
        return ACTIVATION_GADGETS[kind](b, *args, **kwargs)
    except KeyError:
        raise GadgetError(f"unknown activation {kind!r}") from None


# ---- strided convolution (split technique, general stride) ----

def strided_conv_outputs(x_vals: Sequence[int], k_vals: Sequence[int], stride: int,
                         p: int) -> list:
    """Witness: circular stride-s correlation o[i] = sum_j k[j] x[(si+j) mod n]."""
    n = len(x_vals)
    return [
        sum(k_vals[j] * x_vals[(stride * i + j) % n] for j in range(len(k_vals))) % p
        for i in range(n // stride)
    ]


def strided_conv_constraints(b: Builder, x_lcs, k_lcs, stride: int, alpha: int,
                             label: str, out_vars: Optional[list] = None
                             ) -> GadgetResult:
    """Split-technique check of a circular stride-s correlation.

    x and k are interleaved into s residue parts; each part is a stride-1
    correlation proven with one product of sums plus its wrap-around
    correction products, all bound to the committed outputs through a
    single alpha-weighted identity."""
    cs = b.cs
    p = cs.modulus
    n, c = len(x_lcs), len(k_lcs)
    if stride < 1 or n % stride or c % stride:
        raise GadgetError("stride must divide both input and kernel lengths")
    T = n // stride      # outputs (and part length)
    V = c // stride      # taps per part
    if out_vars is None:
        if b.proving:
            xv = [b.eval_lc(t) for t in x_lcs]
            kv = [b.eval_lc(t) for t in k_lcs]
            out_vars = [b.wit(v) for v in strided_conv_outputs(xv, kv, stride, p)]
        else:
            out_vars = [b.wit() for _ in range(T)]
    count = 0
    q = V - 1
    lhs = [(out_vars[i], pow(alpha, q + i, p)) for i in range(T)]
    correction: LC = []
    main_products = []
    wrap = (pow(alpha, T, p) - 1) % p
    for r in range(stride):
        xr = [x_lcs[stride * u + r] for u in range(T)]
        kr = [k_lcs[stride * v + r] for v in range(V)]
        a_lc = lc_add(*(lc_scale(kr[v], pow(alpha, q - v, p), p) for v in range(V)))
        s_lc = lc_add(*(lc_scale(xr[u], pow(alpha, u, p), p) for u in range(T)))
        u_var = b.wit(b.eval_lc(a_lc) * b.eval_lc(s_lc) % p if b.proving else None)
        cs.enforce(a_lc, s_lc, lc_of(u_var), label)
        main_products.append(u_var)
        count += 1
        for v in range(1, V):
            for u in range(v):
                pv = b.wit(b.eval_lc(kr[v]) * b.eval_lc(xr[u]) % p
                           if b.proving else None)
                cs.enforce(kr[v], xr[u], lc_of(pv), label)
                count += 1
                coef = -wrap * pow(alpha, q - v + u, p) % p
                correction.append((pv, coef))
    # sum of main products equals the alpha-combined outputs minus corrections
    rhs = lc_add(lhs, correction)
    cs.enforce_linear(lc_add(*(lc_of(u) for u in main_products)), rhs, label)
    count += 1
    return GadgetResult(output=out_vars, aux=main_products, constraint_count=count)
