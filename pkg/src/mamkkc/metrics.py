"""External clustering measures and the paired t-test."""
import math

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.special import betainc


def _check(pred, truth):
    pred = np.asarray(pred).ravel()
    truth = np.asarray(truth).ravel()
    if pred.shape != truth.shape:
        raise ValueError(f"length mismatch: {pred.size} predictions vs {truth.size} labels")
    return pred, truth


def contingency(pred, truth):
    """Counts table, rows = predicted clusters, columns = true classes."""
    pred, truth = _check(pred, truth)
    _, p = np.unique(pred, return_inverse=True)
    _, t = np.unique(truth, return_inverse=True)
    table = np.zeros((p.max() + 1, t.max() + 1), dtype=np.int64)
    np.add.at(table, (p, t), 1)
    return table


def accuracy(pred, truth):
    """Fraction matched under the best one-to-one cluster/class mapping."""
    table = contingency(pred, truth)
    rows, cols = linear_sum_assignment(table, maximize=True)
    return float(table[rows, cols].sum() / table.sum())


def _entropy(counts, n):
    p = counts[counts > 0] / n
    return float(-(p * np.log(p)).sum())


def nmi(pred, truth):
    """Mutual information normalized by the geometric mean of entropies."""
    table = contingency(pred, truth)
    n = table.sum()
    h_pred = _entropy(table.sum(1), n)
    h_true = _entropy(table.sum(0), n)
    if h_pred == 0.0 or h_true == 0.0:
        # single-cluster vs single-class is the only identical zero-entropy pair
        return 1.0 if table.shape == (1, 1) else 0.0
    pxy = table / n
    outer = np.outer(table.sum(1), table.sum(0)) / (n * n)
    nz = pxy > 0
    mi = float((pxy[nz] * np.log(pxy[nz] / outer[nz])).sum())
    return min(1.0, max(0.0, mi / math.sqrt(h_pred * h_true)))


def purity(pred, truth):
    table = contingency(pred, truth)
    return float(table.max(axis=1).sum() / table.sum())


def evaluate(pred, truth):
    return {"acc": accuracy(pred, truth), "nmi": nmi(pred, truth), "purity": purity(pred, truth)}


def paired_t_test(x, y):
    """Two-sided p-value of the paired t-test on ``x - y``.

    Identical samples give 1.0; a constant non-zero shift gives 0.0.
    """
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if x.shape != y.shape:
        raise ValueError(f"length mismatch: {x.size} vs {y.size}")
    n = x.size
    if n < 2:
        raise ValueError("paired t-test needs at least 2 pairs")
    d = x - y
    mean = d.mean()
    sd = d.std(ddof=1)
    if sd == 0.0:
        return 1.0 if mean == 0.0 else 0.0
    t = mean / (sd / math.sqrt(n))
    df = n - 1
    # P(|T| > t) = I_{df/(df+t^2)}(df/2, 1/2)
    return float(betainc(df / 2.0, 0.5, df / (df + t * t)))
