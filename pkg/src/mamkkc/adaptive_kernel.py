"""Manifold adaptive kernel deformation and weighted kernel combination."""
import numpy as np
import scipy.linalg

from .errors import InputError, NumericalError

PSD_TOL = 1e-10


def symmetrize(A):
    return (A + A.T) / 2.0


def clip_psd(A, tol=PSD_TOL):
    """Zero out negative eigenvalues of a symmetric matrix when they exceed
    ``tol * max(1, largest eigenvalue)`` in magnitude; otherwise return A."""
    vals, vecs = np.linalg.eigh(A)
    if vals[0] >= -tol * max(1.0, vals[-1]):
        return A
    vals = np.clip(vals, 0.0, None)
    out = (vecs * vals) @ vecs.T
    return symmetrize(out)


def deform(kernel, lap, lam, repair=True):
    """Manifold adaptive kernel K - lam * K (I + L K)^{-1} L K.

    Parameters
    ----------
    kernel : ndarray (n, n)
        Base kernel.
    lap : ndarray (n, n)
        Graph Laplacian built on the same samples.
    lam : float
        Non-negative smoothness weight.
    repair : bool
        Clip negative eigenvalues after symmetrization. With ``repair=False``
        the symmetrized matrix is returned as is (used for diagnostics).
    """
    K = np.asarray(kernel, dtype=float)
    L = np.asarray(lap, dtype=float)
    if K.shape != L.shape or K.ndim != 2 or K.shape[0] != K.shape[1]:
        raise InputError(f"kernel {K.shape} and Laplacian {L.shape} must be equal square shapes")
    if not lam >= 0:
        raise InputError(f"lambda must be non-negative, got {lam}")
    if lam == 0:
        return symmetrize(K)

    n = K.shape[0]
    LK = L @ K
    try:
        with np.errstate(all="raise"):
            lu = scipy.linalg.lu_factor(np.eye(n) + LK, check_finite=True)
    except (scipy.linalg.LinAlgError, FloatingPointError, ValueError) as exc:
        raise NumericalError(f"I + LK factorization failed: {exc}") from exc
    if np.min(np.abs(np.diag(lu[0]))) <= np.finfo(float).eps * n * np.abs(lu[0]).max():
        raise NumericalError("I + LK is numerically singular")
    out = K - lam * (K @ scipy.linalg.lu_solve(lu, LK))
    if not np.all(np.isfinite(out)):
        raise NumericalError("deformed kernel has non-finite entries")
    out = symmetrize(out)
    if repair:
        out = clip_psd(out)
    return out


def deform_all(kernels, laps, lam, repair=True):
    return [deform(K, L, lam, repair=repair) for K, L in zip(kernels, laps)]


def combine(kernels, weights):
    """Sum_p w_p^2 K_p."""
    w = np.asarray(weights, dtype=float)
    if len(kernels) != w.size:
        raise InputError(f"{len(kernels)} kernels but {w.size} weights")
    shape = np.shape(kernels[0])
    out = np.zeros(shape)
    for wp, K in zip(w, kernels):
        if np.shape(K) != shape:
            raise InputError(f"kernel shape mismatch: {np.shape(K)} vs {shape}")
        out += wp * wp * K
    return out
