"""Bayesian information criterion for spherical-Gaussian cluster models.

For n points in d dimensions split into k clusters with sizes n_c and
pooled squared error SSE, every cluster is modelled as a Gaussian with
its centroid as mean and a shared per-dimension variance

    var = SSE / (d * (n - k)).

The log-likelihood of the data under the mixture (mixing weight n_c / n) is

    L = sum_c n_c * ln(n_c / n) - (n * d / 2) * ln(2 * pi * var) - SSE / (2 * var)
      = sum_c n_c * ln(n_c) - n * ln(n) - (n * d / 2) * ln(2 * pi * var) - d * (n - k) / 2

and the score is BIC = L - (p / 2) * ln(n) with p = (k - 1) + k * d + 1 free
parameters (mixing weights, centroid coordinates, the variance).  Higher is
better.  A zero-error fit is floored at ``VARIANCE_FLOOR`` so the score
stays finite.
"""

from __future__ import annotations

import math

import numpy as np

from ..exceptions import UndefinedVarianceError, ValidationError
from ..validation import check_matrix
from .kmeans import sse as _sse
from .model import ClusterModel

VARIANCE_FLOOR = 1e-300


def bic_from_stats(sizes, sse_value: float, d: int) -> float:
    sizes = [int(s) for s in sizes]
    n = sum(sizes)
    k = len(sizes)
    if n <= k:
        raise UndefinedVarianceError(f"BIC needs more points than clusters (n={n}, k={k})")
    variance = max(sse_value / (d * (n - k)), VARIANCE_FLOOR)
    loglik = (
        sum(s * math.log(s) for s in sizes if s > 0)
        - n * math.log(n)
        - (n * d / 2.0) * math.log(2.0 * math.pi * variance)
        - d * (n - k) / 2.0
    )
    p = (k - 1) + k * d + 1
    return loglik - (p / 2.0) * math.log(n)


def bic_score(points_subset, sub_model: ClusterModel) -> float:
    """BIC of ``sub_model`` on exactly the points it clusters."""
    X = check_matrix(points_subset, "points_subset")
    if len(sub_model.labels) != X.shape[0]:
        raise ValidationError("sub_model does not cluster exactly the given points")
    if X.shape[0] <= sub_model.k:
        raise UndefinedVarianceError(
            f"BIC needs more points than clusters (n={X.shape[0]}, k={sub_model.k})"
        )
    err = _sse(X, np.asarray(sub_model.centroids), np.asarray(sub_model.labels))
    return bic_from_stats(sub_model.sizes, err, X.shape[1])
