"""Training losses with analytic gradients.

Three losses, each returning (value, gradient):

  asl_loss             - asymmetric multi-label loss; separate focusing powers
                         for positives/negatives and a probability clip that
                         silences easy negatives; gamma=m=0 recovers plain BCE;
  pairwise_sigmoid_loss- image-text contrastive loss over a similarity matrix
                         where the diagonal holds the matched pairs;
  token_cross_entropy  - per-token softmax cross-entropy with an ignore index.

Run:  python3 demos/05_losses.py
"""

import numpy as np

from dynview.losses import (AslParams, SiglipParams, asl_loss,
                            pairwise_sigmoid_loss, token_cross_entropy)


def fd_check(f, x, g, h=1e-5):
    """Max relative error of analytic gradient g against central differences."""
    num = np.zeros_like(x)
    it = np.nditer(x, flags=["multi_index"])
    for _ in it:
        i = it.multi_index
        xp, xm = x.copy(), x.copy()
        xp[i] += h
        xm[i] -= h
        num[i] = (f(xp) - f(xm)) / (2 * h)
    return np.abs(num - g).max() / max(np.abs(num).max(), 1e-12)


def main():
    rng = np.random.default_rng(21)

    probs = rng.uniform(0.1, 0.9, size=12)
    targets = rng.integers(0, 2, size=12).astype(float)
    loss0, _ = asl_loss(probs, targets, AslParams(0, 0, 0))
    bce = -np.mean(targets * np.log(probs) + (1 - targets) * np.log1p(-probs))
    print(f"ASL at gamma=m=0: {loss0:.6f}  vs BCE: {bce:.6f}")

    params = AslParams(1, 4, 0.05)
    loss, grad = asl_loss(probs, targets, params)
    err = fd_check(lambda p: asl_loss(p, targets, params)[0], probs, grad)
    print(f"ASL(1, 4, 0.05) = {loss:.6f}, gradient vs finite diff: {err:.1e}")

    sim = rng.normal(size=(5, 5))
    sp = SiglipParams(temperature=2.0, bias=-0.5)
    loss, grad = pairwise_sigmoid_loss(sim, sp)
    err = fd_check(lambda s: pairwise_sigmoid_loss(s, sp)[0], sim, grad)
    print(f"pairwise sigmoid = {loss:.6f}, gradient vs finite diff: {err:.1e}")

    logits = rng.normal(size=(6, 9))
    ids = rng.integers(0, 9, size=6)
    ids[0] = -100  # padding position, excluded from the average
    loss, grad = token_cross_entropy(logits, ids)
    err = fd_check(lambda l: token_cross_entropy(l, ids)[0], logits, grad)
    print(f"token CE (1 ignored) = {loss:.6f}, gradient vs finite diff: {err:.1e}")

    flat, _ = token_cross_entropy(np.zeros((4, 9)), np.arange(4))
    print(f"uniform logits give log V: {flat:.6f} vs {np.log(9):.6f}")


if __name__ == "__main__":
    main()
