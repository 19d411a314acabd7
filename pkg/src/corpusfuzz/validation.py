"""Input validation helpers shared by the estimators and pipeline stages."""

from __future__ import annotations

import numbers

import numpy as np
from sklearn.utils.validation import check_array

from .exceptions import ValidationError


def check_matrix(X, name="X", ensure_non_negative=False, dtype=np.float64) -> np.ndarray:
    """2-D, finite, at least one row and one column."""
    try:
        X = check_array(X, dtype=dtype, ensure_2d=True, ensure_min_samples=1,
                        ensure_min_features=1, copy=False)
    except ValueError as exc:
        raise ValidationError(f"{name}: {exc}") from None
    if ensure_non_negative and (X < 0).any():
        raise ValidationError(f"{name}: entries must be non-negative")
    return X


def check_count_matrix(X, name="counts") -> np.ndarray:
    try:
        arr = np.asarray(X)
    except ValueError as exc:  # ragged rows
        raise ValidationError(f"{name}: rows have differing lengths ({exc})") from None
    if arr.dtype == object:
        raise ValidationError(f"{name}: rows have differing lengths")
    arr = check_matrix(arr, name, ensure_non_negative=True, dtype=None)
    if not np.issubdtype(arr.dtype, np.integer):
        if not np.all(np.equal(np.mod(arr, 1), 0)):
            raise ValidationError(f"{name}: feature counts must be integers")
        arr = arr.astype(np.int64)
    return arr


def check_int(value, name, minimum=None) -> int:
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise ValidationError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if minimum is not None and value < minimum:
        raise ValidationError(f"{name} must be >= {minimum}, got {value}")
    return value


def check_probability_vector(v, name="centroid", length=None) -> np.ndarray:
    arr = np.asarray(v, dtype=np.float64)
    if arr.ndim != 1:
        raise ValidationError(f"{name} must be one-dimensional")
    if length is not None and arr.shape[0] != length:
        raise ValidationError(f"{name} has length {arr.shape[0]}, expected {length} (catalog size)")
    # NaN fails both comparisons
    if not ((arr >= 0.0) & (arr <= 1.0)).all():
        raise ValidationError(f"{name} entries must lie in [0, 1]")
    return arr


def n_distinct_rows(X: np.ndarray) -> int:
    return int(np.unique(X, axis=0).shape[0])
