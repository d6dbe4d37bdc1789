"""Alternating optimization of kernel weights and the spectral partition.

Each sweep combines the (pre-deformed) kernels with the current weights,
solves the weight subproblem in closed form, then takes the top-c
eigenvectors of the reweighted combination. The trace objective
``tr(sum_p w_p^2 K_p (I - Y Y^T))`` is non-increasing across sweeps.
"""
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .adaptive_kernel import combine
from .errors import InputError, NumericalError

A_FLOOR = 1e-12
MONOTONE_TOL = 1e-9


@dataclass(frozen=True)
class SolverState:
    weights: np.ndarray
    partition: np.ndarray
    objective_trace: list = field(default_factory=list)
    iterations: int = 0
    converged: bool = False
    initial_objective: float = float("nan")


def objective(combined, partition):
    """tr(N) - tr(Y^T N Y)."""
    N = np.asarray(combined, dtype=float)
    Y = np.asarray(partition, dtype=float)
    return float(np.trace(N) - np.sum(Y * (N @ Y)))


def _fix_signs(Y):
    # largest-magnitude entry of each column made positive; argmax picks the lowest row on ties
    idx = np.argmax(np.abs(Y), axis=0)
    signs = np.sign(Y[idx, np.arange(Y.shape[1])])
    signs[signs == 0] = 1.0
    return Y * signs


def update_partition(combined, c):
    """Orthonormal eigenvectors of the c largest eigenvalues, descending."""
    N = np.asarray(combined, dtype=float)
    n = N.shape[0]
    if not 1 <= c <= n:
        raise InputError(f"cluster count must lie in [1, {n}], got {c}")
    try:
        vals, vecs = scipy.linalg.eigh(N, subset_by_index=[n - c, n - 1])
    except (scipy.linalg.LinAlgError, ValueError) as exc:
        raise NumericalError(f"eigensolver failed: {exc}") from exc
    return _fix_signs(vecs[:, ::-1])


def residuals(kernels, partition):
    """Per-kernel residual tr(K_p) - tr(Y^T K_p Y), before clamping."""
    Y = np.asarray(partition, dtype=float)
    return np.array([objective(K, Y) for K in kernels])


def weights_from_residuals(A):
    """Minimizer of sum_p A_p w_p^2 over the probability simplex."""
    A = np.maximum(np.asarray(A, dtype=float), A_FLOOR)
    inv = 1.0 / A
    return inv / inv.sum()


def update_weights(kernels, partition):
    return weights_from_residuals(residuals(kernels, partition))


def _relative_change(prev, cur):
    return abs(prev - cur) / max(1.0, abs(prev))


def fit(kernels, c, max_iter=20, tol=1e-6, init_partition=None, fixed_weights=False):
    """Run the alternating optimizer.

    Parameters
    ----------
    kernels : list of ndarray
        Deformed kernels, all (n, n).
    c : int
        Number of clusters.
    max_iter, tol
        Stop after ``max_iter`` sweeps or when the relative objective change
        drops to ``tol``.
    init_partition : ndarray (n, c), optional
        Starting partition. Defaults to the top-c eigenvectors of the
        uniformly weighted combination.
    fixed_weights : bool
        Keep weights uniform and only update the partition.
    """
    m = len(kernels)
    if m < 1:
        raise InputError("need at least one kernel")
    n = np.shape(kernels[0])[0]
    if any(np.shape(K) != (n, n) for K in kernels):
        raise InputError("all kernels must be square with the same size")
    if not 1 <= c <= n:
        raise InputError(f"cluster count must lie in [1, {n}], got {c}")

    w = np.full(m, 1.0 / m)
    if init_partition is None:
        Y = update_partition(combine(kernels, w), c)
    else:
        Y = np.asarray(init_partition, dtype=float)
        if Y.shape != (n, c):
            raise InputError(f"initial partition must be {(n, c)}, got {Y.shape}")
    prev = objective(combine(kernels, w), Y)
    initial = prev

    trace = []
    converged = False
    for _ in range(max_iter):
        if not fixed_weights:
            w = update_weights(kernels, Y)
        N = combine(kernels, w)
        Y = update_partition(N, c)
        cur = objective(N, Y)
        if cur > prev + MONOTONE_TOL * max(1.0, abs(prev)):
            raise NumericalError(
                f"objective increased from {prev!r} to {cur!r}; alternating updates are broken"
            )
        trace.append(cur)
        if _relative_change(prev, cur) <= tol:
            converged = True
            break
        prev = cur

    return SolverState(
        weights=w,
        partition=Y,
        objective_trace=trace,
        iterations=len(trace),
        converged=converged,
        initial_objective=initial,
    )


def random_partition(n, c, rng):
    """Random column-orthonormal n x c matrix (QR of a Gaussian matrix)."""
    Q, R = np.linalg.qr(rng.standard_normal((n, c)))
    return Q * np.sign(np.diag(R))
