"""Daubechies DB4 wavelet stage: decomposition, soft thresholding of the
detail half, reconstruction, and the optimized constraint compilation.

Witness values are exact integer fixed-point. Per level, the committed
frequency components and reconstruction are kept in two forms: the exact
pre-rescale Q.64 sums (which the random-linear-combination identities bind
with no rounding slack) and their Q31.32 rescalings (which feed the
thresholding comparisons and the next stage). Rescaling correctness is
enforced by truncation gadgets emitted under gadget.* labels so the
dwt.* constraint groups match the documented accounting exactly:

  decomposition   c(c/2 - 1) + 4 rows per level   (dwt.decompose)
  thresholding    3n + 9 rows per detail coeff    (dwt.threshold)
  reconstruction  c(c/2 - 1) + 4 rows per level   (dwt.reconstruct)

Index conventions (0-based). Decomposition at level L with input I of
length 2t: z[i] = sum_j h[j] I[(2i+j) mod 2t], z[t+i] likewise with g.
Reconstruction assigns the filter-pair sums over window {i, .., i+c/2-1}
to output positions (2i+c-2, 2i+c-1) mod 2t; the c-2 offset is what makes
reconstruct(decompose(x)) the identity for a DB4 synthesis filter bank.

The detail-coefficient update is sign(z)*(|z|-eta) when |z| >= eta, else 0.
It is compiled without witness-dependent branching: the high bit of
c = 2^n + |z| - eta acts as the keep/zero selector, giving a fixed circuit
shape at exactly 3n + 9 rows.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Sequence

from ezdps.fixedpoint import FRAC_BITS, FixedPoint, trunc_div_toward_zero
from ezdps.gadgets import (bit_decompose, lc_add, lc_of, lc_scale, lc_sub,
                           trunc_signed)
from ezdps.r1cs import Builder, LC


class DwtError(ValueError):
    pass


@dataclass
class DwtParams:
    """Filter bank (length c each), detail threshold, and recursion depth."""

    h: List[FixedPoint]
    g: List[FixedPoint]
    h_bar: List[FixedPoint]
    g_bar: List[FixedPoint]
    eta: FixedPoint
    levels: int = 1

    def __post_init__(self):
        c = len(self.h)
        if c < 2 or c % 2:
            raise DwtError("filter length must be even and >= 2")
        if not (len(self.g) == len(self.h_bar) == len(self.g_bar) == c):
            raise DwtError("all four filters must share one length")
        if self.eta.raw < 0:
            raise DwtError("threshold must be nonnegative")
        if self.levels < 1:
            raise DwtError("at least one recursion level")

    @property
    def c(self) -> int:
        return len(self.h)

    @property
    def param_count(self) -> int:
        return 4 * self.c + 1


@dataclass
class DwtLevelTrace:
    """Auxiliary witness of one recursion level (all signed raws)."""

    z_exact: List[int]       # Q.64 frequency components, pre-rescale
    z: List[int]             # Q.32 rescaled components
    detail_abs: List[int]    # |z| of the detail half (Q.32)
    detail_sign: List[int]   # +-1 per detail coefficient
    z_thresh: List[int]      # thresholded detail half (Q.32)
    xhat_exact: List[int]    # Q.64 reconstruction, pre-rescale
    xhat: List[int]          # Q.32 rescaled reconstruction


@dataclass
class DwtTrace:
    levels: List[DwtLevelTrace]

    def output(self) -> List[int]:
        return self.levels[-1].xhat


def _check_input(x_len: int, c: int):
    if x_len < c:
        raise DwtError(f"input length {x_len} shorter than filter length {c}")
    if x_len & (x_len - 1) or x_len < 2 * c:
        raise DwtError("input length must be a power of two >= 2c (zero-pad)")


def decompose_exact(x_raw: Sequence[int], params: DwtParams) -> List[int]:
    """Q.64 frequency components of a Q.32 input (no rescale)."""
    n = len(x_raw)
    t = n // 2
    c = params.c
    h = [f.raw for f in params.h]
    g = [f.raw for f in params.g]
    z = [0] * n
    for i in range(t):
        z[i] = sum(h[j] * x_raw[(2 * i + j) % n] for j in range(c))
        z[t + i] = sum(g[j] * x_raw[(2 * i + j) % n] for j in range(c))
    return z


def dwt_decompose(x: Sequence[FixedPoint], params: DwtParams) -> List[FixedPoint]:
    _check_input(len(x), params.c)
    exact = decompose_exact([v.raw for v in x], params)
    return [FixedPoint(trunc_div_toward_zero(v, FRAC_BITS)) for v in exact]


def dwt_threshold(z: Sequence[FixedPoint], eta: FixedPoint):
    """Soft-threshold the detail half; approximation half is unchanged.

    Returns (z', |z| auxiliaries, sign auxiliaries); the latter two cover
    the detail half only. sign(0) is +1."""
    n = len(z)
    t = n // 2
    out = list(z[:t])
    abs_aux: List[FixedPoint] = []
    sign_aux: List[int] = []
    for v in z[t:]:
        mag = abs(v.raw)
        sign = 1 if v.raw >= 0 else -1
        abs_aux.append(FixedPoint(mag))
        sign_aux.append(sign)
        if mag >= eta.raw:
            out.append(FixedPoint(sign * (mag - eta.raw)))
        else:
            out.append(FixedPoint(0))
    return out, abs_aux, sign_aux


def reconstruct_exact(zp_raw: Sequence[int], params: DwtParams) -> List[int]:
    """Q.64 reconstruction of a Q.32 thresholded spectrum (no rescale)."""
    n = len(zp_raw)
    t = n // 2
    c = params.c
    hb = [f.raw for f in params.h_bar]
    gb = [f.raw for f in params.g_bar]
    xh = [0] * n
    for i in range(t):
        lo = sum(hb[2 * j] * zp_raw[(i + j) % t] + hb[2 * j + 1] * zp_raw[t + (i + j) % t]
                 for j in range(c // 2))
        hi = sum(gb[2 * j] * zp_raw[(i + j) % t] + gb[2 * j + 1] * zp_raw[t + (i + j) % t]
                 for j in range(c // 2))
        xh[(2 * i + c - 2) % n] = lo
        xh[(2 * i + c - 1) % n] = hi
    return xh


def dwt_reconstruct(zp: Sequence[FixedPoint], params: DwtParams) -> List[FixedPoint]:
    if len(zp) % 2:
        raise DwtError("spectrum length must be even")
    exact = reconstruct_exact([v.raw for v in zp], params)
    return [FixedPoint(trunc_div_toward_zero(v, FRAC_BITS)) for v in exact]


def dwt_witness(x: Sequence[FixedPoint], params: DwtParams) -> DwtTrace:
    """Run all recursion levels; level L decomposes the approximation half
    of the previous level's frequency components (level 1 takes the input)."""
    _check_input(len(x), params.c)
    cur = [v.raw for v in x]
    levels = []
    for _ in range(params.levels):
        if len(cur) < params.c:
            raise DwtError("recursion exceeds the c-limited depth")
        z_exact = decompose_exact(cur, params)
        z = [trunc_div_toward_zero(v, FRAC_BITS) for v in z_exact]
        t = len(cur) // 2
        zt, abs_aux, sign_aux = dwt_threshold([FixedPoint(v) for v in z],
                                              params.eta)
        zp = [v.raw for v in zt]
        xh_exact = reconstruct_exact(zp, params)
        xh = [trunc_div_toward_zero(v, FRAC_BITS) for v in xh_exact]
        levels.append(DwtLevelTrace(
            z_exact=z_exact, z=z,
            detail_abs=[a.raw for a in abs_aux],
            detail_sign=sign_aux,
            z_thresh=zp[t:],
            xhat_exact=xh_exact, xhat=xh,
        ))
        cur = z[:t]
    return DwtTrace(levels=levels)


# ---- constraint emission ----

@dataclass
class DwtLevelVars:
    """Variable ids of one level's committed trace."""

    z_exact: List[int]
    z: List[int]
    detail_abs: List[int]
    detail_sign: List[int]
    z_thresh: List[int]
    xhat_exact: List[int]
    xhat: List[int]


def _rlc_identity(b: Builder, out_lcs, in_lcs, tap_vars, alpha: int, t: int,
                  c: int, label: str) -> None:
    """One split product-of-sums identity: the alpha-weighted committed
    outputs out[i] equal the interleaved tap sums against in[.], with
    (alpha^t - 1)-weighted wrap-around correction products.

    Emits (c/2)(c/2 - 1) correction rows, one main product row, and one
    main product row carrying the folded equality: (c/2)(c/2-1) + 2 rows."""
    cs = b.cs
    p = cs.modulus
    half = c // 2
    a_even = lc_add(*(lc_scale(lc_of(tap_vars[2 * k]), pow(alpha, half - 1 - k, p), p)
                      for k in range(half)))
    a_odd = lc_add(*(lc_scale(lc_of(tap_vars[2 * k + 1]), pow(alpha, half - 1 - k, p), p)
                     for k in range(half)))
    s_even = lc_add(*(lc_scale(in_lcs[2 * u], pow(alpha, u, p), p) for u in range(t)))
    s_odd = lc_add(*(lc_scale(in_lcs[2 * u + 1], pow(alpha, u, p), p) for u in range(t)))
    wrap = (pow(alpha, t, p) - 1) % p
    correction: LC = []
    for k in range(1, half):
        for u in range(k):
            for tap, term in ((tap_vars[2 * k], in_lcs[2 * u]),
                              (tap_vars[2 * k + 1], in_lcs[2 * u + 1])):
                pv = b.wit(b.eval_lc(lc_of(tap)) * b.eval_lc(term) % p
                           if b.proving else None)
                cs.enforce(lc_of(tap), term, lc_of(pv), label)
                coef = wrap * pow(alpha, half - 1 - k + u, p) % p
                correction.append((pv, coef))
    u1 = b.wit(b.eval_lc(a_even) * b.eval_lc(s_even) % p if b.proving else None)
    cs.enforce(a_even, s_even, lc_of(u1), label)
    lhs = lc_add(*(lc_scale(out_lcs[i], pow(alpha, half - 1 + i, p), p)
                   for i in range(t)))
    fold = lc_sub(lc_sub(lhs, lc_of(u1), p), correction, p)
    cs.enforce(a_odd, s_odd, fold, label)


def decompose_constraints(b: Builder, in_lcs: Sequence[LC], lv: DwtLevelVars,
                          h_vars, g_vars, alpha: int, c: int, label: str) -> None:
    """Both Q.64 decomposition identities (low- and high-pass) of a level:
    c(c/2 - 1) + 4 rows."""
    t = len(in_lcs) // 2
    _rlc_identity(b, [lc_of(v) for v in lv.z_exact[:t]], in_lcs, h_vars, alpha,
                  t, c, label)
    _rlc_identity(b, [lc_of(v) for v in lv.z_exact[t:]], in_lcs, g_vars, alpha,
                  t, c, label)


def reconstruct_constraints(b: Builder, zp_lcs: Sequence[LC], lv: DwtLevelVars,
                            hb_vars, gb_vars, alpha_bar: int, c: int,
                            label: str) -> None:
    """Both Q.64 reconstruction identities of a level under alpha_bar;
    outputs are read at the (2i+c-2, 2i+c-1) rotation: c(c/2-1) + 4 rows."""
    n = len(zp_lcs)
    t = n // 2
    # per parity, the window stream interleaves (approx, detail) pairs
    inter = []
    for u in range(t):
        inter.append(zp_lcs[u])
        inter.append(zp_lcs[t + u])
    even_out = [lc_of(lv.xhat_exact[(2 * i + c - 2) % n]) for i in range(t)]
    odd_out = [lc_of(lv.xhat_exact[(2 * i + c - 1) % n]) for i in range(t)]
    _rlc_identity(b, even_out, inter, hb_vars, alpha_bar, t, c, label)
    _rlc_identity(b, odd_out, inter, gb_vars, alpha_bar, t, c, label)


def threshold_constraints(b: Builder, z_detail: int, abs_var: int, sign_var: int,
                          out_var: int, eta_var: int, n: int, label: str) -> None:
    """One detail coefficient, 3n + 9 rows, no witness-dependent shape:

      Bin(|z|, n), Bin(eta, n), c = 2^n + |z| - eta, Bin(c, n+1)   3n+5
      s^2 = 1,  s*z = |z|,  u = s*eta,  z' = keep*(z - u)          4

    The high bit of c is the keep/zero selector (|z| >= eta keeps)."""
    cs = b.cs
    p = cs.modulus
    bit_decompose(b, lc_of(abs_var), n, label)
    bit_decompose(b, lc_of(eta_var), n, label)
    if b.proving:
        c_val = ((1 << n) + b.value(abs_var) - b.value(eta_var)) % p
        c_var = b.wit(c_val)
    else:
        c_var = b.wit()
    cs.enforce_linear(
        lc_of(c_var),
        lc_add(b.const_lc(1 << n), lc_of(abs_var), lc_scale(lc_of(eta_var), p - 1, p)),
        label)
    keep = bit_decompose(b, lc_of(c_var), n + 1, label).output[n]
    cs.enforce(lc_of(sign_var), lc_of(sign_var), b.const_lc(1), label)
    cs.enforce(lc_of(sign_var), lc_of(z_detail), lc_of(abs_var), label)
    if b.proving:
        u_var = b.wit(b.value(sign_var) * b.value(eta_var) % p)
    else:
        u_var = b.wit()
    cs.enforce(lc_of(sign_var), lc_of(eta_var), lc_of(u_var), label)
    cs.enforce(lc_of(keep), lc_sub(lc_of(z_detail), lc_of(u_var), p),
               lc_of(out_var), label)


def dwt_constraints(b: Builder, x_lcs: Sequence[LC], level_vars: List[DwtLevelVars],
                    h_vars, g_vars, hb_vars, gb_vars, eta_var: int,
                    alpha: int, alpha_bar: int, n: int, c: int,
                    label_prefix: str = "dwt") -> None:
    """All levels: decomposition and reconstruction identities, per-detail
    thresholding, and the gadget.* rescale bindings between the exact and
    Q.32 committed forms."""
    cur = list(x_lcs)
    width = n + FRAC_BITS + max(2, c.bit_length())
    for idx, lv in enumerate(level_vars):
        t = len(cur) // 2
        decompose_constraints(b, cur, lv, h_vars, g_vars, alpha, c,
                              f"{label_prefix}.decompose[{idx}]")
        for i in range(2 * t):
            trunc_signed(b, lc_of(lv.z_exact[i]), width, FRAC_BITS,
                         f"gadget.{label_prefix}.z_rescale[{idx}][{i}]",
                         out_var=lv.z[i])
        for i in range(t):
            threshold_constraints(
                b, lv.z[t + i], lv.detail_abs[i], lv.detail_sign[i],
                lv.z_thresh[i], eta_var, n,
                f"{label_prefix}.threshold[{idx}][{i}]")
        zp_lcs = [lc_of(v) for v in lv.z[:t]] + [lc_of(v) for v in lv.z_thresh]
        reconstruct_constraints(b, zp_lcs, lv, hb_vars, gb_vars, alpha_bar, c,
                                f"{label_prefix}.reconstruct[{idx}]")
        for i in range(2 * t):
            trunc_signed(b, lc_of(lv.xhat_exact[i]), width, FRAC_BITS,
                         f"gadget.{label_prefix}.xhat_rescale[{idx}][{i}]",
                         out_var=lv.xhat[i])
        cur = [lc_of(v) for v in lv.z[:t]]


def decomposition_rows_per_level(c: int) -> int:
    return c * (c // 2 - 1) + 4


def threshold_rows(n: int) -> int:
    return 3 * n + 9
