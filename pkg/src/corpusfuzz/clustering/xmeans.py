"""X-Means: K-Means that grows k while splitting clusters improves BIC."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin
from sklearn.utils.validation import check_is_fitted

from ..exceptions import ValidationError
from ..validation import check_matrix, n_distinct_rows
from .bic import bic_score
from .kmeans import kmeans, kmeans_plus_plus, nearest
from .model import ClusteringParams, ClusterModel

# child centroids start this many RMS radii away from the parent
SPLIT_OFFSET = 0.5


def _one_cluster_model(P: np.ndarray) -> ClusterModel:
    c = P.mean(axis=0, keepdims=True)
    diff = P - c
    return ClusterModel(
        centroids=c,
        sizes=(P.shape[0],),
        labels=np.zeros(P.shape[0], dtype=np.intp),
        sse=float(np.einsum("nd,nd->", diff, diff)),
    )


def _try_split(P: np.ndarray, centroid: np.ndarray, rng: np.random.Generator, params: ClusteringParams):
    """Return the two child centroids if splitting ``P`` raises BIC, else None."""
    # the direction is drawn even when the split is skipped to keep the
    # random stream independent of data-dependent branches
    direction = rng.standard_normal(P.shape[1])
    if P.shape[0] < 3 or n_distinct_rows(P) < 2:
        return None
    norm = np.linalg.norm(direction)
    direction = direction / norm if norm > 0 else np.eye(P.shape[1])[0]
    parent = _one_cluster_model(P)
    radius = np.sqrt(parent.sse / P.shape[0])
    offset = SPLIT_OFFSET * radius * direction
    children = kmeans(P, 2, np.stack([centroid + offset, centroid - offset]),
                      params.tolerance, params.max_iter)
    if bic_score(P, children) > bic_score(P, parent):
        return children.centroids
    return None


def xmeans(points, params: ClusteringParams | None = None) -> ClusterModel:
    """Estimate the number of clusters and fit them.

    Alternates improve-params (K-Means over all points) and
    improve-structure (a local 2-means split per cluster, kept when the
    children's BIC beats the parent's) until no split is accepted or k
    reaches ``k_max``.  Deterministic for a given ``params.rng_seed``.
    """
    params = params or ClusteringParams()
    X = check_matrix(points, "points")
    distinct = n_distinct_rows(X)
    if params.k_min > distinct:
        raise ValidationError(f"k_min={params.k_min} exceeds the number of distinct points ({distinct})")
    rng = np.random.default_rng(params.rng_seed)
    C = kmeans_plus_plus(X, params.k_min, rng)
    history = []
    n_iter = 0
    while True:
        model = kmeans(X, C.shape[0], C, params.tolerance, params.max_iter)
        history.extend(model.sse_history)
        n_iter += model.n_iter
        k = model.k
        if k >= params.k_max:
            break
        new_centroids = []
        budget = params.k_max - k
        for c in range(k):
            P = X[model.labels == c]
            children = _try_split(P, model.centroids[c], rng, params) if budget > 0 else None
            if children is None:
                new_centroids.append(model.centroids[c])
            else:
                new_centroids.extend(children)
                budget -= 1
        if len(new_centroids) == k:
            break
        C = np.array(new_centroids)

    return ClusterModel(
        centroids=model.centroids,
        sizes=model.sizes,
        labels=model.labels,
        sse=model.sse,
        sse_history=tuple(history),
        n_iter=n_iter,
        params=params,
    )


class XMeans(ClusterMixin, BaseEstimator):
    """Scikit-learn style X-Means estimator.

    Parameters
    ----------
    k_min : int, default=2
        Number of centroids to start from; the result never has fewer.
    k_max : int, default=200
    tol : float, default=0.025
        K-Means stop condition: largest centroid move below this value.
    max_iter : int, default=500
        Cap on Lloyd rounds per K-Means call.
    random_state : int, default=0

    Attributes
    ----------
    cluster_centers_ : ndarray of shape (n_clusters_, n_features)
    cluster_sizes_ : ndarray of shape (n_clusters_,)
    labels_ : ndarray of shape (n_samples,)
    inertia_ : float
        Sum of squared distances to the assigned centroid.
    n_clusters_ : int
    model_ : ClusterModel
    """

    def __init__(self, k_min=2, k_max=200, tol=0.025, max_iter=500, random_state=0):
        self.k_min = k_min
        self.k_max = k_max
        self.tol = tol
        self.max_iter = max_iter
        self.random_state = random_state

    def _params(self):
        return ClusteringParams(k_min=self.k_min, k_max=self.k_max, tolerance=self.tol,
                                rng_seed=self.random_state, max_iter=self.max_iter)

    def fit(self, X, y=None):
        X = check_matrix(X)
        self.model_ = xmeans(X, self._params())
        self.cluster_centers_ = np.array(self.model_.centroids)
        self.cluster_sizes_ = np.array(self.model_.sizes)
        self.labels_ = np.array(self.model_.labels)
        self.inertia_ = self.model_.sse
        self.n_clusters_ = self.model_.k
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X):
        check_is_fitted(self, "cluster_centers_")
        return nearest(check_matrix(X), self.cluster_centers_)
