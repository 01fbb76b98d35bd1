"""Soft-margin SVM trained by sequential minimal optimization.

The dual problem is solved with the classic working-set scheme: pick
the maximal KKT-violating pair, solve the two-variable subproblem
analytically, repeat until the violation gap drops below ``tol``.
Multiclass classification uses one-vs-one voting.  Everything is
deterministic: ties in working-set selection and in voting go to the
lowest index.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ConfigError, DocharvestError

_TAU = 1e-12


class DegenerateTraining(DocharvestError):
    """Training data does not contain at least two classes."""


@dataclass
class KernelSpec:
    kind: str = "rbf"  # linear | polynomial | rbf | sigmoid
    gamma: float = 1.0
    coef0: float = 0.0
    degree: int = 3

    def to_dict(self) -> dict:
        return {"kind": self.kind, "gamma": self.gamma,
                "coef0": self.coef0, "degree": self.degree}

    @classmethod
    def from_dict(cls, d: dict) -> "KernelSpec":
        return cls(kind=d["kind"], gamma=float(d["gamma"]),
                   coef0=float(d["coef0"]), degree=int(d["degree"]))


def kernel_matrix(spec: KernelSpec, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Gram matrix K[i, j] = k(a_i, b_j)."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if spec.kind == "linear":
        return a @ b.T
    if spec.kind == "polynomial":
        return (spec.gamma * (a @ b.T) + spec.coef0) ** spec.degree
    if spec.kind == "rbf":
        aa = np.sum(a * a, axis=1)[:, None]
        bb = np.sum(b * b, axis=1)[None, :]
        d2 = np.maximum(aa + bb - 2.0 * (a @ b.T), 0.0)
        return np.exp(-spec.gamma * d2)
    if spec.kind == "sigmoid":
        return np.tanh(spec.gamma * (a @ b.T) + spec.coef0)
    raise ConfigError(f"unknown kernel kind {spec.kind!r}")


# --- feature scaling -------------------------------------------------------

@dataclass
class FeatureScaler:
    """Linear rescaling of every feature to [0, 1] using training bounds.

    Out-of-range values at prediction time are clamped; a feature that
    was constant in training maps to 0.
    """

    lo: np.ndarray
    hi: np.ndarray

    @classmethod
    def fit(cls, x: np.ndarray) -> "FeatureScaler":
        x = np.asarray(x, dtype=np.float64)
        return cls(lo=x.min(axis=0), hi=x.max(axis=0))

    def transform(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        span = self.hi - self.lo
        safe = np.where(span > 0.0, span, 1.0)
        scaled = (x - self.lo) / safe
        scaled = np.where(span > 0.0, scaled, 0.0)
        return np.clip(scaled, 0.0, 1.0)


def class_weights(labels: Sequence[str]) -> dict[str, float]:
    """w(c) = n / (k * n_c): inversely proportional to class frequency."""
    counts: dict[str, int] = {}
    for y in labels:
        counts[y] = counts.get(y, 0) + 1
    n = len(labels)
    k = len(counts)
    return {c: n / (k * nc) for c, nc in counts.items()}


# --- binary SMO solver -----------------------------------------------------

@dataclass
class BinarySvm:
    """A trained two-class machine: decision(x) = sum coef_i k(sv_i, x) + b."""

    kernel: KernelSpec
    sv: np.ndarray
    coef: np.ndarray  # alpha_i * y_i for the support vectors
    b: float

    def decision(self, x: np.ndarray) -> np.ndarray:
        k = kernel_matrix(self.kernel, np.atleast_2d(x), self.sv)
        return k @ self.coef + self.b


@dataclass
class SmoInfo:
    iterations: int
    gap: float  # final maximal violating pair gap
    alpha: np.ndarray = field(repr=False)


def _working_pair(y, grad, alpha, cap):
    """Maximal violating pair; returns (i, j, gap)."""
    neg_yg = -y * grad
    up = ((y > 0) & (alpha < cap)) | ((y < 0) & (alpha > 0))
    low = ((y > 0) & (alpha > 0)) | ((y < 0) & (alpha < cap))
    if not up.any() or not low.any():
        return -1, -1, 0.0
    up_vals = np.where(up, neg_yg, -np.inf)
    low_vals = np.where(low, neg_yg, np.inf)
    i = int(np.argmax(up_vals))
    j = int(np.argmin(low_vals))
    return i, j, float(up_vals[i] - low_vals[j])


def train_binary_svm(x: np.ndarray, y: np.ndarray, c: float,
                     kernel: KernelSpec, tol: float = 1e-3,
                     weight_pos: float = 1.0, weight_neg: float = 1.0,
                     max_iter: int | None = None) -> tuple[BinarySvm, SmoInfo]:
    """Solve the soft-margin dual for labels y in {+1, -1}.

    Per-class weights scale the box constraint: C_i = c * weight for
    the sample's class.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n = len(y)
    if n == 0 or len(set(np.sign(y).tolist())) < 2:
        raise DegenerateTraining("binary training needs both classes")
    if max_iter is None:
        max_iter = max(100_000, 300 * n)

    cap = np.where(y > 0, c * weight_pos, c * weight_neg)
    k = kernel_matrix(kernel, x, x)
    q = (y[:, None] * y[None, :]) * k
    qd = np.diag(q).copy()
    alpha = np.zeros(n)
    grad = -np.ones(n)

    it = 0
    gap = math.inf
    while it < max_iter:
        i, j, gap = _working_pair(y, grad, alpha, cap)
        if i < 0 or gap <= tol:
            break
        old_i, old_j = alpha[i], alpha[j]
        ci, cj = cap[i], cap[j]
        if y[i] != y[j]:
            quad = qd[i] + qd[j] + 2.0 * q[i, j]
            if quad <= 0:
                quad = _TAU
            delta = (-grad[i] - grad[j]) / quad
            diff = alpha[i] - alpha[j]
            alpha[i] += delta
            alpha[j] += delta
            if diff > 0:
                if alpha[j] < 0:
                    alpha[j] = 0.0
                    alpha[i] = diff
            else:
                if alpha[i] < 0:
                    alpha[i] = 0.0
                    alpha[j] = -diff
            if diff > ci - cj:
                if alpha[i] > ci:
                    alpha[i] = ci
                    alpha[j] = ci - diff
            else:
                if alpha[j] > cj:
                    alpha[j] = cj
                    alpha[i] = cj + diff
        else:
            quad = qd[i] + qd[j] - 2.0 * q[i, j]
            if quad <= 0:
                quad = _TAU
            delta = (grad[i] - grad[j]) / quad
            total = alpha[i] + alpha[j]
            alpha[i] -= delta
            alpha[j] += delta
            if total > ci:
                if alpha[i] > ci:
                    alpha[i] = ci
                    alpha[j] = total - ci
            else:
                if alpha[j] < 0:
                    alpha[j] = 0.0
                    alpha[i] = total
            if total > cj:
                if alpha[j] > cj:
                    alpha[j] = cj
                    alpha[i] = total - cj
            else:
                if alpha[i] < 0:
                    alpha[i] = 0.0
                    alpha[j] = total
        grad += q[:, i] * (alpha[i] - old_i) + q[:, j] * (alpha[j] - old_j)
        it += 1

    # Offset from the KKT conditions: average over free vectors when any.
    ygrad = y * grad
    free = (alpha > 0) & (alpha < cap)
    if free.any():
        rho = float(ygrad[free].mean())
    else:
        ub = math.inf
        lb = -math.inf
        for idx in range(n):
            v = float(ygrad[idx])
            at_cap = alpha[idx] >= cap[idx]
            at_zero = alpha[idx] <= 0
            if (at_cap and y[idx] < 0) or (at_zero and y[idx] > 0):
                ub = min(ub, v)
            elif (at_cap and y[idx] > 0) or (at_zero and y[idx] < 0):
                lb = max(lb, v)
        rho = (ub + lb) / 2.0 if math.isfinite(ub) and math.isfinite(lb) else 0.0

    mask = alpha > 0
    machine = BinarySvm(kernel=kernel, sv=x[mask].copy(),
                        coef=(alpha * y)[mask].copy(), b=-rho)
    return machine, SmoInfo(iterations=it, gap=gap, alpha=alpha)


def kkt_violation(x: np.ndarray, y: np.ndarray, alpha: np.ndarray, c: float,
                  kernel: KernelSpec, weight_pos: float = 1.0,
                  weight_neg: float = 1.0) -> float:
    """Maximal violating-pair gap of a dual solution (0 when optimal)."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    cap = np.where(y > 0, c * weight_pos, c * weight_neg)
    k = kernel_matrix(kernel, x, x)
    grad = (y[:, None] * y[None, :] * k) @ alpha - 1.0
    _, _, gap = _working_pair(y, grad, alpha, cap)
    return max(0.0, gap)


# --- multiclass ------------------------------------------------------------

@dataclass
class SvmModel:
    """One-vs-one multiclass model over a fixed, named feature schema."""

    labels: list[str]
    kernel: KernelSpec
    scaler: FeatureScaler
    machines: list[tuple[int, int, BinarySvm]]  # (positive idx, negative idx)
    feature_names: list[str]
    weights: dict[str, float] = field(default_factory=dict)

    @property
    def schema_hash(self) -> str:
        return schema_hash(self.feature_names)

    def predict(self, x: np.ndarray) -> list[str]:
        x = np.atleast_2d(np.asarray(x, dtype=np.float64))
        scaled = self.scaler.transform(x)
        votes = np.zeros((len(x), len(self.labels)), dtype=int)
        for pos, neg, machine in self.machines:
            d = machine.decision(scaled)
            votes[:, pos] += (d >= 0)
            votes[:, neg] += (d < 0)
        # argmax returns the first maximum: the lowest label index wins ties.
        return [self.labels[i] for i in np.argmax(votes, axis=1)]

    def predict_one(self, x: np.ndarray) -> str:
        return self.predict(np.atleast_2d(x))[0]


def schema_hash(feature_names: Sequence[str]) -> str:
    joined = "\n".join(feature_names).encode("utf-8")
    return hashlib.sha256(joined).hexdigest()[:16]


def train_multiclass_svm(x: np.ndarray, y: Sequence[str], c: float,
                         kernel: KernelSpec,
                         feature_names: Sequence[str] | None = None,
                         tol: float = 1e-3,
                         weighted: bool = True) -> SvmModel:
    """Train k(k-1)/2 one-vs-one machines.

    Features are scaled to [0, 1] by the training bounds.  Class
    weights follow w(c) = n/(k*n_c) unless ``weighted`` is False.

    Raises:
        DegenerateTraining: if the data holds fewer than two classes.
    """
    x = np.asarray(x, dtype=np.float64)
    y = list(y)
    labels = sorted(set(y))
    if len(labels) < 2:
        raise DegenerateTraining("multiclass training needs at least two classes")
    if feature_names is None:
        feature_names = [f"f{i}" for i in range(x.shape[1])]
    scaler = FeatureScaler.fit(x)
    scaled = scaler.transform(x)
    weights = class_weights(y) if weighted else {lab: 1.0 for lab in labels}
    y_arr = np.array([labels.index(v) for v in y])

    machines = []
    for i in range(len(labels)):
        for j in range(i + 1, len(labels)):
            mask = (y_arr == i) | (y_arr == j)
            sub_x = scaled[mask]
            sub_y = np.where(y_arr[mask] == i, 1.0, -1.0)
            machine, _ = train_binary_svm(
                sub_x, sub_y, c, kernel, tol=tol,
                weight_pos=weights[labels[i]], weight_neg=weights[labels[j]])
            machines.append((i, j, machine))
    return SvmModel(labels=labels, kernel=kernel, scaler=scaler,
                    machines=machines, feature_names=list(feature_names),
                    weights=weights)


# --- serialization ---------------------------------------------------------

def svm_model_to_dict(model: SvmModel) -> dict:
    return {
        "format": "svm-model-json",
        "labels": model.labels,
        "kernel": model.kernel.to_dict(),
        "scale": {"lo": model.scaler.lo.tolist(), "hi": model.scaler.hi.tolist()},
        "features": model.feature_names,
        "schema_hash": model.schema_hash,
        "class_weights": model.weights,
        "machines": [
            {"pos": pos, "neg": neg, "b": m.b,
             "sv": m.sv.tolist(), "coef": m.coef.tolist()}
            for pos, neg, m in model.machines
        ],
    }


def svm_model_from_dict(d: dict) -> SvmModel:
    kernel = KernelSpec.from_dict(d["kernel"])
    scaler = FeatureScaler(lo=np.array(d["scale"]["lo"], dtype=np.float64),
                           hi=np.array(d["scale"]["hi"], dtype=np.float64))
    machines = []
    nfeat = len(d["features"])
    for md in d["machines"]:
        sv = np.array(md["sv"], dtype=np.float64).reshape(-1, nfeat)
        machines.append((int(md["pos"]), int(md["neg"]),
                         BinarySvm(kernel=kernel, sv=sv,
                                   coef=np.array(md["coef"], dtype=np.float64),
                                   b=float(md["b"]))))
    return SvmModel(labels=list(d["labels"]), kernel=kernel, scaler=scaler,
                    machines=machines, feature_names=list(d["features"]),
                    weights={k: float(v) for k, v in d.get("class_weights", {}).items()})


def save_svm_model(model: SvmModel, path: str) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(svm_model_to_dict(model), f, sort_keys=True)


def load_svm_model(path: str) -> SvmModel:
    with open(path, "r", encoding="utf-8") as f:
        return svm_model_from_dict(json.load(f))
