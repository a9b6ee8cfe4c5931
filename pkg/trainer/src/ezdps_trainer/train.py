"""Training and fixture export.

The training pipeline mirrors the prover's inference semantics in double
precision: DB4 wavelet denoising, PCA projection, then one binary RBF-SVM
per class (one-vs-rest) fitted with sklearn. Exported parameters are the
PCA mean and component rows and, per class, the support vectors, signed
dual coefficients and bias, all quantized to Q31.32 raw integers in the
prover's model schema. The DB4 filter bank is a fixed constant injected
into every exported model (filters are not trained).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional

import numpy as np
from sklearn.decomposition import PCA
from sklearn.svm import SVC

FRAC_BITS = 32
SCALE = 1 << FRAC_BITS
# order of the ristretto255 scalar group (the prover's default modulus)
FIELD_MODULUS = 2**252 + 27742317777372353535851937790883648493

_S3 = math.sqrt(3.0)
_NORM = 4 * math.sqrt(2.0)
DB4_H = [(1 + _S3) / _NORM, (3 + _S3) / _NORM, (3 - _S3) / _NORM, (1 - _S3) / _NORM]
DB4_G = [DB4_H[3], -DB4_H[2], DB4_H[1], -DB4_H[0]]
DB4_H_BAR = [DB4_H[2], DB4_G[2], DB4_H[0], DB4_G[0]]
DB4_G_BAR = [DB4_H[3], DB4_G[3], DB4_H[1], DB4_G[1]]


class TrainerError(ValueError):
    pass


@dataclass
class TrainingConfig:
    m: int = 16                      # sample dimension (power of two >= 8)
    k: int = 4                       # PCA components
    s: int = 2                       # classes
    gamma: float = 0.05
    C: float = 1.0
    eta: float = 0.2                 # wavelet detail threshold
    n_train: int = 60                # per class
    n_test: int = 20                 # per class, held out
    seed: int = 0
    csv_path: Optional[str] = None   # rows: label,feat1,...,featm
    out_dir: str = "fixtures"

    def validate(self):
        if self.m < 8 or self.m & (self.m - 1):
            raise TrainerError("sample dimension must be a power of two >= 8")
        if not 1 <= self.k <= self.m:
            raise TrainerError("need 1 <= k <= m PCA components")
        if self.s < 2:
            raise TrainerError("need at least two classes")


def quantize(v: float) -> int:
    """Round to the nearest Q31.32 raw integer."""
    raw = int(round(float(v) * SCALE))
    if abs(raw) >= 1 << 63:
        raise TrainerError(f"value {v} exceeds the Q31.32 range")
    return raw


def dequantize(raw: int) -> float:
    return raw / SCALE


def dwt_denoise(x: np.ndarray, eta: float) -> np.ndarray:
    """One DB4 level: decompose, soft-threshold the detail half,
    reconstruct (same index conventions as the prover)."""
    n = len(x)
    t = n // 2
    z = np.empty(n)
    for i in range(t):
        z[i] = sum(DB4_H[j] * x[(2 * i + j) % n] for j in range(4))
        z[t + i] = sum(DB4_G[j] * x[(2 * i + j) % n] for j in range(4))
    zp = z.copy()
    for i in range(t, n):
        mag = abs(z[i])
        zp[i] = math.copysign(mag - eta, z[i]) if mag > eta else 0.0
    out = np.empty(n)
    for i in range(t):
        lo = sum(DB4_H_BAR[2 * j] * zp[(i + j) % t]
                 + DB4_H_BAR[2 * j + 1] * zp[t + (i + j) % t] for j in range(2))
        hi = sum(DB4_G_BAR[2 * j] * zp[(i + j) % t]
                 + DB4_G_BAR[2 * j + 1] * zp[t + (i + j) % t] for j in range(2))
        out[(2 * i + 2) % n] = lo
        out[(2 * i + 3) % n] = hi
    return out


def synth_blobs(cfg: TrainingConfig):
    """Gaussian clusters with well-separated centers, labels 1..s."""
    rng = np.random.default_rng(cfg.seed)
    centers = rng.uniform(-2.5, 2.5, size=(cfg.s, cfg.m))
    per = cfg.n_train + cfg.n_test
    X = np.empty((cfg.s * per, cfg.m))
    y = np.empty(cfg.s * per, dtype=int)
    for c in range(cfg.s):
        X[c * per:(c + 1) * per] = centers[c] + rng.normal(0.0, 0.4, (per, cfg.m))
        y[c * per:(c + 1) * per] = c + 1
    order = rng.permutation(len(X))
    return X[order], y[order]


def load_csv(path: str):
    rows = np.loadtxt(path, delimiter=",")
    if rows.ndim != 2 or rows.shape[1] < 2:
        raise TrainerError("CSV must have rows of label,feat1,...,featm")
    y = rows[:, 0].astype(int)
    X = rows[:, 1:]
    labels = sorted(set(y.tolist()))
    remap = {lab: i + 1 for i, lab in enumerate(labels)}
    return X, np.array([remap[v] for v in y])


@dataclass
class TrainedModel:
    mean: np.ndarray
    components: np.ndarray          # k x m
    classes: list                   # (support_vectors, dual_coefs, bias)
    gamma: float
    eta: float
    variance_retained: float
    held_out_accuracy: float
    held_out_X: np.ndarray
    held_out_y: np.ndarray
    reference_labels: List[int]     # double-precision pipeline predictions


def decision_values(model: TrainedModel, x: np.ndarray) -> np.ndarray:
    xh = dwt_denoise(x, model.eta)
    proj = model.components @ (xh - model.mean)
    out = np.empty(len(model.classes))
    for ci, (svs, coefs, bias) in enumerate(model.classes):
        d2 = np.sum((svs - proj) ** 2, axis=1)
        out[ci] = float(coefs @ np.exp(-model.gamma * d2) + bias)
    return out


def predict(model: TrainedModel, x: np.ndarray) -> int:
    return int(np.argmax(decision_values(model, x))) + 1


def train(cfg: TrainingConfig) -> TrainedModel:
    cfg.validate()
    if cfg.csv_path:
        X, y = load_csv(cfg.csv_path)
        if X.shape[1] != cfg.m:
            raise TrainerError(
                f"CSV feature dimension {X.shape[1]} != configured m={cfg.m}")
    else:
        X, y = synth_blobs(cfg)
    labels = sorted(set(y.tolist()))
    if len(labels) < 2:
        raise TrainerError("training data is degenerate: a single class")

    n_test = max(1, int(0.25 * len(X)))
    X_train, y_train = X[:-n_test], y[:-n_test]
    X_test, y_test = X[-n_test:], y[-n_test:]

    denoised = np.stack([dwt_denoise(row, cfg.eta) for row in X_train])
    pca = PCA(n_components=cfg.k)
    proj = pca.fit_transform(denoised)
    variance = float(np.sum(pca.explained_variance_ratio_))

    classes = []
    for c in labels:
        svc = SVC(kernel="rbf", gamma=cfg.gamma, C=cfg.C)
        svc.fit(proj, y_train == c)
        classes.append((svc.support_vectors_.copy(),
                        svc.dual_coef_[0].copy(),
                        float(svc.intercept_[0])))

    model = TrainedModel(mean=pca.mean_, components=pca.components_,
                         classes=classes, gamma=cfg.gamma, eta=cfg.eta,
                         variance_retained=variance, held_out_accuracy=0.0,
                         held_out_X=X_test, held_out_y=y_test,
                         reference_labels=[])
    preds = [predict(model, row) for row in X_test]
    model.reference_labels = preds
    model.held_out_accuracy = float(np.mean(np.array(preds) == y_test))
    return model


# ---- export ----

def _qlist(vals) -> list:
    return [str(quantize(v)) for v in vals]


def model_dict(model: TrainedModel) -> dict:
    m = len(model.mean)
    return {
        "version": 1,
        "field_modulus": str(FIELD_MODULUS),
        "fxp_frac_bits": FRAC_BITS,
        "dwt": {
            "c": 4,
            "h": _qlist(DB4_H),
            "g": _qlist(DB4_G),
            "h_bar": _qlist(DB4_H_BAR),
            "g_bar": _qlist(DB4_G_BAR),
            "eta": str(quantize(model.eta)),
            "levels": 1,
        },
        "pca": {
            "m": m,
            "k": len(model.components),
            "x_bar": _qlist(model.mean),
            "V": [_qlist(row) for row in model.components],
        },
        "svm": {
            "s": len(model.classes),
            "gamma": str(quantize(model.gamma)),
            "classes": [
                {"sv": [_qlist(sv) for sv in svs],
                 "coef": _qlist(coefs),
                 "bias": str(quantize(bias))}
                for svs, coefs, bias in model.classes
            ],
        },
    }


def train_export(cfg: TrainingConfig) -> dict:
    """Train, quantize, and write model/sample/reference files to
    cfg.out_dir. Returns a summary dictionary."""
    model = train(cfg)
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    with open(out / "model.json", "w") as fh:
        json.dump(model_dict(model), fh, indent=1)
        fh.write("\n")

    samples = [{"x": _qlist(row), "t": int(t)}
               for row, t in zip(model.held_out_X, model.held_out_y)]
    with open(out / "samples.json", "w") as fh:
        json.dump({"M": len(samples), "samples": samples}, fh)
        fh.write("\n")

    with open(out / "reference_labels.json", "w") as fh:
        json.dump({"labels": model.reference_labels,
                   "held_out_accuracy": model.held_out_accuracy,
                   "variance_retained": model.variance_retained}, fh)
        fh.write("\n")

    return {
        "out_dir": str(out),
        "held_out_accuracy": model.held_out_accuracy,
        "variance_retained": model.variance_retained,
        "classes": len(model.classes),
        "support_vectors": sum(len(c[0]) for c in model.classes),
    }
