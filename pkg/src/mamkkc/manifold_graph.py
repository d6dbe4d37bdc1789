"""Nearest-neighbor graphs on kernel similarity and their Laplacians."""
import numpy as np

from .errors import InputError

DEFAULT_TAU = 5


def knn_graph(kernel, tau=DEFAULT_TAU):
    """Binary, union-symmetrized tau-nearest-neighbor graph.

    Neighbors of ``i`` are the ``tau`` samples with the largest similarity
    ``K[i, j]`` (``j != i``); ties go to the lower index.
    """
    K = np.asarray(kernel, dtype=float)
    n = K.shape[0]
    tau = int(tau)
    if not 1 <= tau <= n - 1:
        raise InputError(f"tau must lie in [1, {n - 1}], got {tau}")

    sim = K.copy()
    np.fill_diagonal(sim, -np.inf)
    # stable sort on -sim keeps lower indices first among equal similarities
    order = np.argsort(-sim, axis=1, kind="stable")[:, :tau]
    G = np.zeros((n, n))
    G[np.repeat(np.arange(n), tau), order.ravel()] = 1.0
    G = np.maximum(G, G.T)
    np.fill_diagonal(G, 0.0)
    return G


def laplacian(graph):
    """Unnormalized Laplacian D - G."""
    G = np.asarray(graph, dtype=float)
    return np.diag(G.sum(axis=1)) - G


def kernel_laplacians(kernels, tau=DEFAULT_TAU):
    return [laplacian(knn_graph(K, tau)) for K in kernels]
