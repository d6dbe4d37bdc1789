"""k-means on the rows of the spectral embedding."""
import warnings

import numpy as np

MAX_LLOYD_ITER = 100


class DegenerateInputWarning(UserWarning):
    pass


def _sq_dists(X, centers):
    d = (X * X).sum(1)[:, None] - 2.0 * X @ centers.T + (centers * centers).sum(1)[None, :]
    return np.maximum(d, 0.0)


def kmeans_pp_init(X, k, rng):
    n = X.shape[0]
    centers = np.empty((k, X.shape[1]))
    centers[0] = X[rng.integers(n)]
    closest = ((X - centers[0]) ** 2).sum(1)
    for j in range(1, k):
        total = closest.sum()
        if total > 0:
            i = rng.choice(n, p=closest / total)
        else:
            i = rng.integers(n)
        centers[j] = X[i]
        closest = np.minimum(closest, ((X - centers[j]) ** 2).sum(1))
    return centers


def _repair_empty(X, labels, d, k):
    # move the point farthest from its center in the largest cluster into each empty one
    for j in range(k):
        if np.any(labels == j):
            continue
        counts = np.bincount(labels, minlength=k)
        big = np.argmax(counts)
        if counts[big] < 2:
            break
        members = np.flatnonzero(labels == big)
        far = members[np.argmax(d[members, big])]
        labels[far] = j
    return labels


def lloyd(X, k, rng, max_iter=MAX_LLOYD_ITER):
    """One k-means++-seeded Lloyd run. Returns (labels, wcss)."""
    centers = kmeans_pp_init(X, k, rng)
    labels = None
    for _ in range(max_iter):
        d = _sq_dists(X, centers)
        new = np.argmin(d, axis=1)
        new = _repair_empty(X, new, d, k)
        if labels is not None and np.array_equal(new, labels):
            break
        labels = new
        for j in range(k):
            members = X[labels == j]
            if len(members):
                centers[j] = members.mean(0)
    return labels, wcss(X, labels)


def wcss(X, labels):
    total = 0.0
    for j in np.unique(labels):
        members = X[labels == j]
        total += ((members - members.mean(0)) ** 2).sum()
    return float(total)


def kmeans_rows(Y, c, restarts=10, seed=0, normalize_rows=False):
    """Cluster the rows of ``Y`` into ``c`` groups.

    Runs ``restarts`` k-means++ seeded Lloyd passes, with child seeds drawn
    from ``seed``, and keeps the labeling with the lowest within-cluster sum
    of squares.

    Returns
    -------
    labels : ndarray of int, shape (n,)
    wcss : float
    """
    X = np.asarray(Y, dtype=float)
    if c < 1 or restarts < 1:
        raise ValueError("need c >= 1 and restarts >= 1")
    if normalize_rows:
        norms = np.linalg.norm(X, axis=1, keepdims=True)
        norms[norms == 0] = 1.0
        X = X / norms
    if len(np.unique(X, axis=0)) < c:
        warnings.warn(
            f"fewer distinct rows than clusters ({c}); labeling is best-effort",
            DegenerateInputWarning,
            stacklevel=2,
        )

    seq = np.random.SeedSequence(seed)
    best = None
    for child in seq.spawn(restarts):
        labels, cost = lloyd(X, c, np.random.default_rng(child))
        if best is None or cost < best[1]:
            best = (labels, cost)
    return best
