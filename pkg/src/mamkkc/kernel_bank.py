"""Base kernel construction and loading.

The default bank holds 12 kernels: 7 Gaussian kernels with bandwidths
scaled by the largest pairwise distance, 4 polynomial kernels and one
linear kernel. Every kernel is cosine normalized to a unit diagonal.
"""
import csv
from pathlib import Path

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .errors import InputError

GAUSSIAN_SCALES = (0.01, 0.05, 0.1, 1.0, 10.0, 50.0, 100.0)
POLYNOMIAL_PARAMS = ((0.0, 2), (0.0, 4), (1.0, 2), (1.0, 4))


def check_features(features):
    X = np.asarray(features, dtype=float)
    if X.ndim != 2:
        raise InputError(f"feature matrix must be 2-D, got shape {X.shape}")
    n, d = X.shape
    if n < 2 or d < 1:
        raise InputError(f"need at least 2 samples and 1 feature, got {n}x{d}")
    if not np.all(np.isfinite(X)):
        raise InputError("feature matrix contains non-finite entries")
    return X


def minmax_scale(X):
    """Scale each column to [0, 1]; constant columns become 0."""
    lo = X.min(axis=0)
    span = X.max(axis=0) - lo
    span[span == 0] = 1.0
    return (X - lo) / span


def normalize_kernel(raw):
    """Cosine-normalize a kernel: K_ij / sqrt(K_ii K_jj)."""
    K = np.asarray(raw, dtype=float)
    diag = np.diag(K)
    if np.any(~(diag > 0)):
        raise InputError("kernel has a non-positive diagonal entry; cannot normalize")
    s = 1.0 / np.sqrt(diag)
    out = K * s[:, None] * s[None, :]
    # restore exact symmetry and unit diagonal lost to rounding
    out = np.triu(out, 1)
    out = out + out.T
    np.fill_diagonal(out, 1.0)
    return out


def gaussian_kernel(sq_dists, sigma):
    return np.exp(-sq_dists / (2.0 * sigma**2))


def polynomial_kernel(X, a, b):
    return (a + X @ X.T) ** b


def linear_kernel(X):
    return X @ X.T


def kernel_column(K, index):
    """Column ``index`` of K, i.e. the similarities of every sample to it."""
    return np.asarray(K)[:, index].copy()


def build_kernel_bank(features, scale=True):
    """Build the 12 default base kernels from a feature matrix.

    Parameters
    ----------
    features : array_like, shape (n, d)
        One sample per row.
    scale : bool
        Min-max scale each feature to [0, 1] before building kernels.

    Returns
    -------
    names : list of str
    kernels : list of ndarray, each (n, n), symmetric with unit diagonal
    """
    X = check_features(features)
    if scale:
        X = minmax_scale(X)

    sq = squareform(pdist(X, "sqeuclidean"))
    d_max = np.sqrt(sq.max())
    if d_max == 0:
        raise InputError("all pairwise distances are zero; Gaussian bandwidth is degenerate")

    norms = np.einsum("ij,ij->i", X, X)
    if np.any(norms == 0):
        raise InputError("an all-zero sample makes the a=0 polynomial and linear kernels degenerate")

    names, kernels = [], []
    for t in GAUSSIAN_SCALES:
        names.append(f"gaussian_t{t:g}")
        kernels.append(normalize_kernel(gaussian_kernel(sq, t * d_max)))
    for a, b in POLYNOMIAL_PARAMS:
        names.append(f"poly_a{a:g}_b{b}")
        kernels.append(normalize_kernel(polynomial_kernel(X, a, b)))
    names.append("linear")
    kernels.append(normalize_kernel(linear_kernel(X)))
    return names, kernels


def _parse_rows(lines, path):
    rows = []
    for lineno, line in enumerate(lines, 1):
        line = line.strip()
        if not line:
            continue
        try:
            rows.append([float(tok) for tok in line.replace(",", " ").split()])
        except ValueError:
            raise InputError(f"{path}:{lineno}: unparseable entry") from None
    return rows


def read_matrix(path):
    """Read a dense whitespace- or comma-separated matrix."""
    with open(path) as fh:
        rows = _parse_rows(fh, path)
    if not rows or len({len(r) for r in rows}) != 1:
        raise InputError(f"{path}: ragged or empty matrix")
    return np.array(rows, dtype=float)


def load_kernels(paths):
    """Load precomputed kernels, symmetrize them and normalize them."""
    kernels = []
    for path in paths:
        K = read_matrix(path)
        if K.shape[0] != K.shape[1]:
            raise InputError(f"{path}: kernel matrix is not square, shape {K.shape}")
        if kernels and K.shape != kernels[0].shape:
            raise InputError(
                f"{path}: dimension mismatch, {K.shape} vs {kernels[0].shape}"
            )
        kernels.append(normalize_kernel((K + K.T) / 2.0))
    return kernels


def read_features(path):
    """Read a headerless (or single header row) CSV of reals."""
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if not rows:
        raise InputError(f"{path}: empty feature file")
    try:
        [float(c) for c in rows[0]]
    except ValueError:
        rows = rows[1:]
    try:
        X = np.array([[float(c) for c in r] for r in rows], dtype=float)
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from None
    return check_features(X)


def read_labels(path):
    """Read one label per line; non-numeric labels are mapped to 0..k-1."""
    tokens = [t.strip(",") for t in Path(path).read_text().split()]
    tokens = [t for t in tokens if t]
    try:
        return np.array([int(float(t)) for t in tokens], dtype=int)
    except ValueError:
        _, codes = np.unique(tokens, return_inverse=True)
        return codes.astype(int)
