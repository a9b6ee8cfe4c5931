"""Shared test fixtures: DB4 filter bank, hand-built prototype RBF-SVM
models over separable Gaussian blobs, and the double-precision oracle
pipeline the fixed-point path is checked against.

The fixture models need no training: each class contributes a few
support vectors placed at jittered copies of its blob center with unit
coefficients, which classifies well-separated blobs essentially
perfectly and exercises every pipeline stage.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import List

from ezdps.dwt import DwtParams
from ezdps.fixedpoint import FixedPoint
from ezdps.pca import PcaParams
from ezdps.pipeline import ModelParams, PublicParams, setup
from ezdps.svm import SvmClass, SvmParams

SQRT3 = math.sqrt(3.0)
DB4_H = [(1 + SQRT3) / (4 * math.sqrt(2)), (3 + SQRT3) / (4 * math.sqrt(2)),
         (3 - SQRT3) / (4 * math.sqrt(2)), (1 - SQRT3) / (4 * math.sqrt(2))]
DB4_G = [DB4_H[3], -DB4_H[2], DB4_H[1], -DB4_H[0]]
DB4_HBAR = [DB4_H[2], DB4_G[2], DB4_H[0], DB4_G[0]]
DB4_GBAR = [DB4_H[3], DB4_G[3], DB4_H[1], DB4_G[1]]

enc = FixedPoint.encode


def db4_params(eta: float = 0.2, levels: int = 1) -> DwtParams:
    return DwtParams(h=[enc(v) for v in DB4_H], g=[enc(v) for v in DB4_G],
                     h_bar=[enc(v) for v in DB4_HBAR],
                     g_bar=[enc(v) for v in DB4_GBAR],
                     eta=enc(eta), levels=levels)


@dataclass
class FloatModel:
    """Double-precision mirror of a fixture model (the oracle)."""

    h: List[float]
    g: List[float]
    h_bar: List[float]
    g_bar: List[float]
    eta: float
    levels: int
    mean: List[float]
    v_rows: List[List[float]]
    svm_classes: list   # (support vectors, coefs, bias) per class
    gamma: float


def float_dwt(x: List[float], fm: FloatModel) -> List[float]:
    cur = list(x)
    for _ in range(fm.levels):
        n = len(cur)
        t = n // 2
        z = [0.0] * n
        for i in range(t):
            z[i] = sum(fm.h[j] * cur[(2 * i + j) % n] for j in range(4))
            z[t + i] = sum(fm.g[j] * cur[(2 * i + j) % n] for j in range(4))
        zp = z[:t] + [
            math.copysign(abs(v) - fm.eta, v) if abs(v) > fm.eta else 0.0
            for v in z[t:]
        ]
        xh = [0.0] * n
        for i in range(t):
            lo = sum(fm.h_bar[2 * j] * zp[(i + j) % t]
                     + fm.h_bar[2 * j + 1] * zp[t + (i + j) % t] for j in range(2))
            hi = sum(fm.g_bar[2 * j] * zp[(i + j) % t]
                     + fm.g_bar[2 * j + 1] * zp[t + (i + j) % t] for j in range(2))
            xh[(2 * i + 2) % n] = lo
            xh[(2 * i + 3) % n] = hi
        cur = z[:t]
        last = xh
    return last


def float_pipeline(x: List[float], fm: FloatModel) -> tuple:
    """Returns (decision values, 1-based argmax label)."""
    xh = float_dwt(x, fm)
    proj = [sum(row[j] * (xh[j] - fm.mean[j]) for j in range(len(xh)))
            for row in fm.v_rows]
    fs = []
    for svs, coefs, bias in fm.svm_classes:
        acc = bias
        for sv, d in zip(svs, coefs):
            dist = sum((a - b) ** 2 for a, b in zip(proj, sv))
            acc += d * math.exp(-fm.gamma * dist)
        fs.append(acc)
    y = max(range(len(fs)), key=lambda i: (fs[i], -i)) + 1
    return fs, y


def blob_centers(rng: random.Random, s: int, m: int, spread: float = 2.0):
    return [[rng.uniform(-spread, spread) for _ in range(m)] for _ in range(s)]


def blob_sample(rng: random.Random, center, noise: float = 0.35):
    return [c + rng.gauss(0.0, noise) for c in center]


def make_fixture(m: int, s: int, k: int, sv_per_class: int = 3,
                 gamma: float = 0.05, eta: float = 0.05, levels: int = 1,
                 seed: int = 0) -> tuple:
    """Hand-built model over separable blobs: (ModelParams, FloatModel,
    centers, rng). PCA rows are a fixed orthonormal-ish projection."""
    rng = random.Random(seed)
    m_pca = m // (1 << (levels - 1))
    centers = blob_centers(rng, s, m)

    # projection rows: normalized random directions (deterministic per seed)
    v_rows = []
    for _ in range(k):
        row = [rng.gauss(0.0, 1.0) for _ in range(m_pca)]
        norm = math.sqrt(sum(v * v for v in row))
        v_rows.append([v / norm for v in row])
    fm = FloatModel(h=DB4_H, g=DB4_G, h_bar=DB4_HBAR, g_bar=DB4_GBAR,
                    eta=eta, levels=levels,
                    mean=[0.0] * m_pca, v_rows=v_rows,
                    svm_classes=[], gamma=gamma)

    # support vectors: projected jittered centers, unit coefficients and a
    # small repulsion bias so decision values stay distinct
    for ci, center in enumerate(centers):
        svs, coefs = [], []
        for j in range(sv_per_class):
            raw = blob_sample(rng, center, noise=0.2)
            _, feats = _project_float(raw, fm)
            svs.append(feats)
            coefs.append(1.0)
        fm.svm_classes.append((svs, coefs, -0.01 * ci))

    model = ModelParams(
        dwt=db4_params(eta=eta, levels=levels),
        pca=PcaParams(x_bar=[enc(v) for v in fm.mean],
                      v_rows=[[enc(v) for v in row] for row in fm.v_rows]),
        svm=SvmParams(classes=[
            SvmClass(support_vectors=[[enc(v) for v in sv] for sv in svs],
                     coef=[enc(c) for c in coefs], bias=enc(bias))
            for svs, coefs, bias in fm.svm_classes],
            gamma=enc(gamma)),
    )
    model.validate()
    return model, fm, centers, rng


def _project_float(x, fm: FloatModel):
    xh = float_dwt(x, fm)
    feats = [sum(row[j] * (xh[j] - fm.mean[j]) for j in range(len(xh)))
             for row in fm.v_rows]
    return xh, feats


def sample_for(rng: random.Random, centers, label_idx: int):
    return blob_sample(rng, centers[label_idx])


def to_fxp(vals) -> List[FixedPoint]:
    return [enc(v) for v in vals]


def fixture_pp(n_bits: int = 40) -> PublicParams:
    return setup(128, 1_000_000, n_bits=n_bits)
