"""Scalar reference implementations of the three training objectives, with
analytic gradients, for validating training stacks.

* asymmetric multi-label loss (separate focusing powers for positives and
  negatives, probability clip for easy negatives)
* pairwise sigmoid image-text loss (per-pair, no softmax normalization)
* token-level cross-entropy with an ignore index

These are oracles, not trainers: inputs are plain arrays, outputs are
(loss, gradient) pairs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit, log_softmax

PROB_EPS = 1e-7


@dataclass(frozen=True)
class AslParams:
    gamma_pos: float = 0.0
    gamma_neg: float = 4.0
    clip: float = 0.05

    def __post_init__(self):
        if self.gamma_pos < 0 or self.gamma_neg < 0:
            raise ValueError("focusing powers must be >= 0")
        if not 0.0 <= self.clip < 1.0:
            raise ValueError(f"clip must be in [0, 1), got {self.clip}")


@dataclass(frozen=True)
class SiglipParams:
    temperature: float = 1.0
    bias: float = 0.0

    def __post_init__(self):
        if not (np.isfinite(self.temperature) and self.temperature > 0):
            raise ValueError(f"temperature must be positive, got {self.temperature}")
        if not np.isfinite(self.bias):
            raise ValueError("bias must be finite")


def asl_loss(probs, targets, params: AslParams = AslParams()):
    """Asymmetric loss over per-label probabilities.

    Positive labels contribute (1-p)^g+ * log p; negative labels use the
    clipped probability p_m = max(p - m, 0) and contribute p_m^g- * log(1-p_m).
    Loss is the negative mean; the gradient is analytic w.r.t. probs.
    """
    probs = np.asarray(probs, dtype=np.float64)
    targets = np.asarray(targets, dtype=np.float64)
    if probs.shape != targets.shape:
        raise ValueError(f"shape mismatch: probs {probs.shape} vs targets {targets.shape}")
    p = np.clip(probs, PROB_EPS, 1.0 - PROB_EPS)
    gp, gn, m = params.gamma_pos, params.gamma_neg, params.clip
    n = p.size

    pos = targets == 1.0
    pm = np.maximum(p - m, 0.0)

    terms = np.zeros_like(p)
    grads = np.zeros_like(p)

    lp = np.log(p[pos])
    w = (1.0 - p[pos]) ** gp
    terms[pos] = w * lp
    dw = -gp * (1.0 - p[pos]) ** (gp - 1.0) if gp > 0 else 0.0
    grads[pos] = dw * lp + w / p[pos]

    neg = ~pos
    pmn = pm[neg]
    lq = np.log1p(-pmn)
    wn = pmn ** gn  # 0**0 == 1 covers the g-=0, p<=m case
    terms[neg] = wn * lq
    with np.errstate(divide="ignore", invalid="ignore"):
        dwn = np.where(pmn > 0, gn * pmn ** (gn - 1.0), 0.0) if gn > 0 else 0.0
        gneg = dwn * lq - wn / (1.0 - pmn)
        grads[neg] = np.where(pmn > 0, gneg, 0.0)

    loss = -float(terms.sum()) / n
    grad = -grads / n
    return loss, grad


def pairwise_sigmoid_loss(similarity, params: SiglipParams = SiglipParams()):
    """Pairwise sigmoid image-text loss over an NxN similarity matrix.

    Matching pairs (the diagonal) get label +1, all others -1; each pair
    contributes log(1 + exp(-z * (tmp * s + b))) independently, summed and
    divided by N.
    """
    s = np.asarray(similarity, dtype=np.float64)
    if s.ndim != 2 or s.shape[0] != s.shape[1]:
        raise ValueError(f"similarity must be square, got shape {s.shape}")
    if not np.all(np.isfinite(s)):
        raise ValueError("similarity entries must be finite")
    n = s.shape[0]
    z = 2.0 * np.eye(n) - 1.0
    a = z * (params.temperature * s + params.bias)
    loss = float(np.logaddexp(0.0, -a).sum()) / n
    grad = -z * params.temperature * expit(-a) / n
    return loss, grad


def token_cross_entropy(logits, target_ids, ignore_index: int = -100):
    """Mean negative log-softmax of the target token at each non-ignored
    position; gradient is (softmax - onehot) / count on those rows."""
    logits = np.asarray(logits, dtype=np.float64)
    targets = np.asarray(target_ids, dtype=np.int64)
    if logits.ndim != 2 or targets.ndim != 1 or targets.shape[0] != logits.shape[0]:
        raise ValueError(
            f"expected (T, V) logits and length-T targets, got {logits.shape} "
            f"and {targets.shape}")
    vocab = logits.shape[1]
    active = targets != ignore_index
    if np.any((targets[active] < 0) | (targets[active] >= vocab)):
        raise ValueError(f"target ids must be in [0, {vocab}) or {ignore_index}")

    count = int(active.sum())
    grad = np.zeros_like(logits)
    if count == 0:
        return 0.0, grad
    logp = log_softmax(logits[active], axis=1)
    rows = np.arange(count)
    loss = -float(logp[rows, targets[active]].sum()) / count
    g = np.exp(logp)
    g[rows, targets[active]] -= 1.0
    grad[active] = g / count
    return loss, grad
