"""Lloyd's K-Means with deterministic tie-breaking and empty-cluster repair."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin
from sklearn.utils.validation import check_is_fitted

from ..exceptions import ValidationError
from ..validation import check_int, check_matrix, n_distinct_rows
from .model import ClusterModel

DEFAULT_TOLERANCE = 0.025
DEFAULT_MAX_ITER = 500


def squared_distances(X: np.ndarray, C: np.ndarray) -> np.ndarray:
    """(n, k) matrix of squared Euclidean distances."""
    diff = X[:, None, :] - C[None, :, :]
    return np.einsum("nkd,nkd->nk", diff, diff)


def nearest(X: np.ndarray, C: np.ndarray) -> np.ndarray:
    # argmin returns the first minimum: ties go to the lowest cluster index
    return np.argmin(squared_distances(X, C), axis=1)


def sse(X: np.ndarray, C: np.ndarray, labels: np.ndarray) -> float:
    diff = X - C[labels]
    return float(np.einsum("nd,nd->", diff, diff))


def cluster_means(X: np.ndarray, labels: np.ndarray, k: int, fallback: np.ndarray) -> np.ndarray:
    C = fallback.copy()
    for c in range(k):
        members = X[labels == c]
        if len(members):
            C[c] = members.mean(axis=0)
    return C


def _repair_empty(X, C, labels, k):
    """Move each empty cluster's centroid onto the point farthest from its own centroid."""
    labels = labels.copy()
    C = C.copy()
    counts = np.bincount(labels, minlength=k)
    for c in np.flatnonzero(counts == 0):
        d = np.einsum("nd,nd->n", X - C[labels], X - C[labels])
        # a point that is alone in its cluster cannot move without emptying another
        d[counts[labels] <= 1] = -1.0
        p = int(np.argmax(d))
        if d[p] < 0:
            break
        counts[labels[p]] -= 1
        labels[p] = c
        counts[c] = 1
        C[c] = X[p]
    return C, labels


def kmeans(
    points,
    k: int,
    initial_centroids,
    tolerance: float = DEFAULT_TOLERANCE,
    max_iter: int = DEFAULT_MAX_ITER,
) -> ClusterModel:
    """Lloyd iteration from the given starting centroids.

    Iterates assign/update until the largest Euclidean centroid move is
    below ``tolerance`` (and no cluster is empty) or ``max_iter`` rounds
    have run.  The returned labels are the nearest-centroid assignment for
    the returned centroids.  ``sse_history`` records the objective after
    every round; it never increases.
    """
    X = check_matrix(points, "points")
    k = check_int(k, "k", minimum=1)
    if not tolerance > 0:
        raise ValidationError(f"tolerance must be positive, got {tolerance}")
    distinct = n_distinct_rows(X)
    if k > distinct:
        raise ValidationError(f"k={k} exceeds the number of distinct points ({distinct})")
    C = np.array(initial_centroids, dtype=np.float64).reshape(-1, X.shape[1]) if np.size(initial_centroids) else None
    if C is None or C.shape != (k, X.shape[1]):
        raise ValidationError(f"need {k} initial centroids of dimension {X.shape[1]}")

    labels = nearest(X, C)
    history = []
    n_iter = 0
    for n_iter in range(1, max_iter + 1):
        C, labels = _repair_empty(X, C, labels, k)
        new_C = cluster_means(X, labels, k, C)
        shift = float(np.sqrt(np.max(np.einsum("kd,kd->k", new_C - C, new_C - C))))
        C = new_C
        labels = nearest(X, C)
        history.append(sse(X, C, labels))
        if shift < tolerance and np.bincount(labels, minlength=k).min() > 0:
            break
    else:
        C, labels = _repair_empty(X, C, labels, k)

    sizes = np.bincount(labels, minlength=k)
    return ClusterModel(
        centroids=C,
        sizes=tuple(int(s) for s in sizes),
        labels=labels,
        sse=sse(X, C, labels),
        sse_history=tuple(history),
        n_iter=n_iter,
    )


def kmeans_plus_plus(X: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """k-means++ seeding: first centre uniform, then D^2-weighted draws."""
    n = X.shape[0]
    centers = [X[rng.integers(n)]]
    d2 = np.einsum("nd,nd->n", X - centers[0], X - centers[0])
    for _ in range(1, k):
        total = d2.sum()
        if total <= 0:
            raise ValidationError(f"cannot seed {k} centroids: too few distinct points")
        idx = int(rng.choice(n, p=d2 / total))
        centers.append(X[idx])
        d2 = np.minimum(d2, np.einsum("nd,nd->n", X - X[idx], X - X[idx]))
    return np.array(centers)


class KMeans(ClusterMixin, BaseEstimator):
    """Scikit-learn style wrapper around :func:`kmeans`.

    Parameters
    ----------
    n_clusters : int, default=2
    init : {"k-means++"} or array-like of shape (n_clusters, n_features)
    tol : float, default=0.025
        Stop once no centroid moves farther than this.
    max_iter : int, default=500
    random_state : int, default=0
        Seed for k-means++ initialisation.
    """

    def __init__(self, n_clusters=2, init="k-means++", tol=DEFAULT_TOLERANCE,
                 max_iter=DEFAULT_MAX_ITER, random_state=0):
        self.n_clusters = n_clusters
        self.init = init
        self.tol = tol
        self.max_iter = max_iter
        self.random_state = random_state

    def fit(self, X, y=None):
        X = check_matrix(X)
        if isinstance(self.init, str):
            if self.init != "k-means++":
                raise ValidationError(f"unknown init {self.init!r}")
            if self.n_clusters > n_distinct_rows(X):
                raise ValidationError(
                    f"k={self.n_clusters} exceeds the number of distinct points ({n_distinct_rows(X)})"
                )
            init = kmeans_plus_plus(X, self.n_clusters, np.random.default_rng(self.random_state))
        else:
            init = self.init
        self.model_ = kmeans(X, self.n_clusters, init, self.tol, self.max_iter)
        self.cluster_centers_ = np.array(self.model_.centroids)
        self.labels_ = np.array(self.model_.labels)
        self.inertia_ = self.model_.sse
        self.n_iter_ = self.model_.n_iter
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X):
        check_is_fitted(self, "cluster_centers_")
        return nearest(check_matrix(X), self.cluster_centers_)
