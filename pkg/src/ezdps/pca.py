"""PCA projection witness and its single random-linear-combination
constraint: m rows instead of m*k.

The committed projection is kept in exact Q.64 form so the combined
identity

    sum_i alpha^i proj[i] = sum_j (sum_i alpha^i V[i][j]) * (xin[j] - mean[j])

holds with no rounding slack; the alpha-weighted eigenvector sums are
linear combinations of committed model variables with public coefficients
and cost nothing. Each projection component is then rescaled once to
Q31.32 by a signed truncation gadget (gadget.* labels) for the SVM stage.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Sequence

from ezdps.fixedpoint import FRAC_BITS, FixedPoint, trunc_div_toward_zero
from ezdps.gadgets import lc_of, lc_sub, trunc_signed
from ezdps.r1cs import Builder, LC


class PcaError(ValueError):
    pass


@dataclass
class PcaParams:
    """Mean vector (length m) and the top-k eigenvector rows (k x m)."""

    x_bar: List[FixedPoint]
    v_rows: List[List[FixedPoint]]

    def __post_init__(self):
        m = len(self.x_bar)
        if not self.v_rows or len(self.v_rows) > m:
            raise PcaError("need 1 <= k <= m eigenvector rows")
        if any(len(r) != m for r in self.v_rows):
            raise PcaError("eigenvector row length must equal the mean length")

    @property
    def m(self) -> int:
        return len(self.x_bar)

    @property
    def k(self) -> int:
        return len(self.v_rows)


def project_exact(x_raw: Sequence[int], params: PcaParams) -> List[int]:
    """Q.64 projection components (no rescale)."""
    if len(x_raw) != params.m:
        raise PcaError(f"input length {len(x_raw)} != m={params.m}")
    centered = [x_raw[j] - params.x_bar[j].raw for j in range(params.m)]
    return [
        sum(row[j].raw * centered[j] for j in range(params.m))
        for row in params.v_rows
    ]


def pca_project(x_hat: Sequence[FixedPoint], params: PcaParams) -> List[FixedPoint]:
    """Q31.32 feature vector; each component rescaled once after summation."""
    exact = project_exact([v.raw for v in x_hat], params)
    return [FixedPoint(trunc_div_toward_zero(v, FRAC_BITS)) for v in exact]


@dataclass
class PcaVars:
    proj_exact: List[int]   # committed Q.64 projection variables
    proj: List[int]         # committed Q.32 rescaled variables


def pca_constraints(b: Builder, xin_lcs: Sequence[LC], pv: PcaVars,
                    mean_vars: Sequence[int], v_row_vars: Sequence[Sequence[int]],
                    alpha: int, n: int, label_prefix: str = "pca") -> None:
    """m product rows, the final equality folded into the last row's
    output side; then k rescale gadgets under gadget.* labels."""
    cs = b.cs
    p = cs.modulus
    m = len(xin_lcs)
    k = len(v_row_vars)
    powers = [pow(alpha, i + 1, p) for i in range(k)]
    products = []
    for j in range(m):
        w_lc = [(v_row_vars[i][j], powers[i]) for i in range(k)]
        centered = lc_sub(xin_lcs[j], lc_of(mean_vars[j]), p)
        if j < m - 1:
            u = b.wit(b.eval_lc(w_lc) * b.eval_lc(centered) % p
                      if b.proving else None)
            cs.enforce(w_lc, centered, lc_of(u), f"{label_prefix}.rlc[{j}]")
            products.append(u)
        else:
            lhs = [(pv.proj_exact[i], powers[i]) for i in range(k)]
            fold = lc_sub(lhs, [(u, 1) for u in products], p)
            cs.enforce(w_lc, centered, fold, f"{label_prefix}.rlc[{j}]")
    width = n + FRAC_BITS + m.bit_length() + 1
    for i in range(k):
        trunc_signed(b, lc_of(pv.proj_exact[i]), width, FRAC_BITS,
                     f"gadget.pca.rescale[{i}]", out_var=pv.proj[i])
