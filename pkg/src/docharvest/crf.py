"""Linear-chain conditional random field.

Scores factorize into emission weights (feature x label) and
transition weights (previous label x label).  Inference runs in log
space; training maximizes the regularized conditional log-likelihood
with batch gradient ascent and a backtracking line search, so the
objective never decreases on an accepted step.

Token features are plain strings; a feature name the model never saw
in training is ignored at inference time.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import sparse

logger = logging.getLogger(__name__)

FeatureSeq = Sequence[Sequence[str]]  # one feature-name set per token


@dataclass
class CrfModel:
    labels: list[str]
    feature_names: list[str]
    w_em: np.ndarray = field(repr=False)  # (F, K)
    w_tr: np.ndarray = field(repr=False)  # (K, K)

    def __post_init__(self):
        self._feature_ids = {name: i for i, name in enumerate(self.feature_names)}

    def feature_ids(self, names: Sequence[str]) -> list[int]:
        ids = self._feature_ids
        return [ids[n] for n in names if n in ids]


def _logsumexp(a: np.ndarray, axis: int = -1) -> np.ndarray:
    m = np.max(a, axis=axis, keepdims=True)
    m = np.where(np.isfinite(m), m, 0.0)
    out = m.squeeze(axis) + np.log(np.sum(np.exp(a - m), axis=axis))
    return out


def _emissions(model: CrfModel, seq: FeatureSeq) -> np.ndarray:
    k = len(model.labels)
    emis = np.zeros((len(seq), k))
    for t, names in enumerate(seq):
        ids = model.feature_ids(names)
        if ids:
            emis[t] = model.w_em[ids].sum(axis=0)
    return emis


@dataclass
class ForwardBackward:
    log_z: float
    log_z_backward: float
    marginals: np.ndarray          # (T, K); rows sum to 1
    pairwise: np.ndarray           # (T-1, K, K); each slice sums to 1


def forward_backward(model: CrfModel, seq: FeatureSeq) -> ForwardBackward:
    """Exact log-space forward-backward for one sequence."""
    k = len(model.labels)
    t_len = len(seq)
    if t_len == 0:
        return ForwardBackward(0.0, 0.0, np.zeros((0, k)), np.zeros((0, k, k)))
    emis = _emissions(model, seq)
    tr = model.w_tr

    alpha = np.empty((t_len, k))
    alpha[0] = emis[0]
    for t in range(1, t_len):
        alpha[t] = emis[t] + _logsumexp(alpha[t - 1][:, None] + tr, axis=0)

    beta = np.empty((t_len, k))
    beta[-1] = 0.0
    for t in range(t_len - 2, -1, -1):
        beta[t] = _logsumexp(tr + emis[t + 1][None, :] + beta[t + 1][None, :], axis=1)

    log_z = float(_logsumexp(alpha[-1], axis=0))
    log_z_b = float(_logsumexp(emis[0] + beta[0], axis=0))

    marginals = np.exp(alpha + beta - log_z)
    pairwise = np.empty((t_len - 1, k, k))
    for t in range(1, t_len):
        logp = (alpha[t - 1][:, None] + tr + emis[t][None, :]
                + beta[t][None, :] - log_z)
        pairwise[t - 1] = np.exp(logp)
    return ForwardBackward(log_z=log_z, log_z_backward=log_z_b,
                           marginals=marginals, pairwise=pairwise)


def viterbi(model: CrfModel, seq: FeatureSeq) -> list[str]:
    """Most likely label sequence; ties resolve to the lowest label index."""
    if len(seq) == 0:
        return []
    emis = _emissions(model, seq)
    tr = model.w_tr
    t_len, k = emis.shape
    delta = emis[0]
    back = np.zeros((t_len, k), dtype=int)
    for t in range(1, t_len):
        cand = delta[:, None] + tr  # (prev, cur)
        back[t] = np.argmax(cand, axis=0)  # first max: lowest prev index
        delta = emis[t] + cand[back[t], np.arange(k)]
    best = int(np.argmax(delta))
    path = [best]
    for t in range(t_len - 1, 0, -1):
        best = int(back[t, best])
        path.append(best)
    path.reverse()
    return [model.labels[i] for i in path]


def log_score(model: CrfModel, seq: FeatureSeq, labels: Sequence[str]) -> float:
    """Unnormalized log score of one labeling."""
    idx = [model.labels.index(y) for y in labels]
    emis = _emissions(model, seq)
    total = float(sum(emis[t, y] for t, y in enumerate(idx)))
    total += float(sum(model.w_tr[idx[t - 1], idx[t]] for t in range(1, len(idx))))
    return total


# --- training ---------------------------------------------------------------

@dataclass
class CrfTrainReport:
    epochs: int
    converged: bool
    final_grad_norm: float
    objective: list[float] = field(default_factory=list)


class _Batch:
    """All training sequences padded to one tensor with sparse features."""

    def __init__(self, sequences: list[list[list[int]]], labels: list[list[int]],
                 n_features: int, n_labels: int):
        self.n = len(sequences)
        self.k = n_labels
        self.f = n_features
        self.lengths = np.array([len(s) for s in sequences], dtype=int)
        self.max_t = int(self.lengths.max()) if self.n else 0
        rows, cols = [], []
        for s, seq in enumerate(sequences):
            base = s * self.max_t
            for t, ids in enumerate(seq):
                rows.extend([base + t] * len(ids))
                cols.extend(ids)
        data = np.ones(len(rows))
        self.feats = sparse.csr_matrix(
            (data, (rows, cols)), shape=(self.n * self.max_t, n_features))

        # Empirical counts of the gold labeling (constant during training).
        self.emp_tr = np.zeros((n_labels, n_labels))
        flat_labels = np.zeros(self.n * self.max_t, dtype=int)
        valid = np.zeros(self.n * self.max_t, dtype=bool)
        for s, ys in enumerate(labels):
            base = s * self.max_t
            for t, y in enumerate(ys):
                flat_labels[base + t] = y
                valid[base + t] = True
            for t in range(1, len(ys)):
                self.emp_tr[ys[t - 1], ys[t]] += 1
        onehot = sparse.csr_matrix(
            (np.ones(valid.sum()),
             (np.nonzero(valid)[0], flat_labels[valid])),
            shape=(self.n * self.max_t, n_labels))
        self.emp_em = np.asarray((self.feats.T @ onehot).todense())
        self.valid = valid.reshape(self.n, self.max_t)

    def emissions(self, w_em: np.ndarray) -> np.ndarray:
        emis = self.feats @ w_em
        return np.asarray(emis).reshape(self.n, self.max_t, self.k)

    def log_likelihood(self, w_em, w_tr) -> float:
        """Sum of gold log-probabilities (no regularizer)."""
        emis = self.emissions(w_em)
        gold = float((self.emp_em * w_em).sum() + (self.emp_tr * w_tr).sum())
        return gold - self._log_z_sum(emis, w_tr)

    def _forward(self, emis, w_tr):
        alpha = np.empty((self.n, self.max_t, self.k))
        alpha[:, 0, :] = emis[:, 0, :]
        for t in range(1, self.max_t):
            prev = alpha[:, t - 1, :]
            step = emis[:, t, :] + _logsumexp(prev[:, :, None] + w_tr[None], axis=1)
            active = (self.lengths > t)[:, None]
            alpha[:, t, :] = np.where(active, step, prev)
        return alpha

    def _log_z_sum(self, emis, w_tr) -> float:
        alpha = self._forward(emis, w_tr)
        last = alpha[np.arange(self.n), self.lengths - 1, :]
        return float(_logsumexp(last, axis=1).sum())

    def log_likelihood_and_grad(self, w_em, w_tr):
        emis = self.emissions(w_em)
        alpha = self._forward(emis, w_tr)
        last = alpha[np.arange(self.n), self.lengths - 1, :]
        log_z = _logsumexp(last, axis=1)

        beta = np.empty_like(alpha)
        beta[:, self.max_t - 1, :] = 0.0
        exp_tr = np.zeros_like(w_tr)
        for t in range(self.max_t - 1, 0, -1):
            active = self.lengths > t
            inner = (w_tr[None] + emis[:, t, None, :] + beta[:, t, None, :])
            step = _logsumexp(inner, axis=2)
            beta[:, t - 1, :] = np.where(active[:, None], step, 0.0)
            # Pairwise marginals for positions (t-1, t) of active sequences.
            logp = (alpha[:, t - 1, :, None] + inner
                    - log_z[:, None, None])
            probs = np.exp(logp)
            probs[~active] = 0.0
            exp_tr += probs.sum(axis=0)

        marg = np.exp(alpha + beta - log_z[:, None, None])
        marg[~self.valid] = 0.0
        exp_em = np.asarray(
            (self.feats.T @ marg.reshape(self.n * self.max_t, self.k)))

        gold = float((self.emp_em * w_em).sum() + (self.emp_tr * w_tr).sum())
        ll = gold - float(log_z.sum())
        return ll, self.emp_em - exp_em, self.emp_tr - exp_tr


def train_crf(sequences: Sequence[FeatureSeq], labels: Sequence[Sequence[str]],
              label_set: Sequence[str] | None = None, sigma2: float = 10.0,
              tol: float = 1e-4, max_epochs: int = 200) -> tuple[CrfModel, CrfTrainReport]:
    """Fit a chain CRF by batch gradient ascent with backtracking line search.

    The objective is the sum of per-sequence conditional log-likelihoods
    minus ||w||^2 / (2 * sigma2).  Training stops when the gradient
    infinity norm drops below ``tol`` or after ``max_epochs`` accepted
    steps.
    """
    if len(sequences) != len(labels):
        raise ValueError("sequences and labels differ in length")
    if label_set is None:
        label_set = sorted({y for ys in labels for y in ys})
    label_ids = {y: i for i, y in enumerate(label_set)}

    names: list[str] = []
    name_ids: dict[str, int] = {}
    indexed_seqs = []
    for seq in sequences:
        iseq = []
        for feats in seq:
            ids = []
            for nm in feats:
                if nm not in name_ids:
                    name_ids[nm] = len(names)
                    names.append(nm)
                ids.append(name_ids[nm])
            iseq.append(ids)
        indexed_seqs.append(iseq)
    indexed_labels = [[label_ids[y] for y in ys] for ys in labels]

    k = len(label_set)
    f = len(names)
    batch = _Batch(indexed_seqs, indexed_labels, f, k)

    w = np.zeros(f * k + k * k)

    def split(wv):
        return wv[:f * k].reshape(f, k), wv[f * k:].reshape(k, k)

    def objective(wv) -> float:
        w_em, w_tr = split(wv)
        return batch.log_likelihood(w_em, w_tr) - float(wv @ wv) / (2 * sigma2)

    def objective_and_grad(wv):
        w_em, w_tr = split(wv)
        ll, g_em, g_tr = batch.log_likelihood_and_grad(w_em, w_tr)
        obj = ll - float(wv @ wv) / (2 * sigma2)
        grad = np.concatenate([g_em.ravel(), g_tr.ravel()]) - wv / sigma2
        return obj, grad

    trace: list[float] = []
    step = 1.0
    grad_norm = np.inf
    epochs = 0
    converged = False
    for epoch in range(max_epochs):
        obj, grad = objective_and_grad(w)
        trace.append(obj)
        grad_norm = float(np.abs(grad).max()) if grad.size else 0.0
        if grad_norm < tol:
            converged = True
            break
        # Backtracking line search along the gradient (Armijo condition).
        g2 = float(grad @ grad)
        eta = step * 2.0
        accepted = False
        for _ in range(40):
            cand = w + eta * grad
            if objective(cand) >= obj + 1e-4 * eta * g2:
                accepted = True
                break
            eta *= 0.5
        if not accepted:
            logger.warning("line search failed at epoch %d", epoch)
            break
        w = w + eta * grad
        step = eta
        epochs = epoch + 1

    w_em, w_tr = split(w)
    model = CrfModel(labels=list(label_set), feature_names=names,
                     w_em=w_em.copy(), w_tr=w_tr.copy())
    report = CrfTrainReport(epochs=epochs, converged=converged,
                            final_grad_norm=grad_norm, objective=trace)
    return model, report


# --- serialization -----------------------------------------------------------

def crf_model_to_dict(model: CrfModel, meta: dict | None = None) -> dict:
    d = {
        "format": "crf-model-json",
        "labels": model.labels,
        "features": model.feature_names,
        "w_em": model.w_em.tolist(),
        "w_tr": model.w_tr.tolist(),
    }
    if meta:
        d["meta"] = meta
    return d


def crf_model_from_dict(d: dict) -> CrfModel:
    f = len(d["features"])
    k = len(d["labels"])
    w_em = np.array(d["w_em"], dtype=np.float64).reshape(f, k)
    w_tr = np.array(d["w_tr"], dtype=np.float64).reshape(k, k)
    return CrfModel(labels=list(d["labels"]), feature_names=list(d["features"]),
                    w_em=w_em, w_tr=w_tr)


def save_crf_model(model: CrfModel, path: str, meta: dict | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(crf_model_to_dict(model, meta), fh, sort_keys=True)


def load_crf_model(path: str) -> CrfModel:
    with open(path, "r", encoding="utf-8") as fh:
        d = json.load(fh)
    return crf_model_from_dict(d)
