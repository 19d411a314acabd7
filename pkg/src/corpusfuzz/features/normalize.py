"""Min-max normalization of feature count matrices."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator, OneToOneFeatureMixin, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ..exceptions import ValidationError
from ..validation import check_count_matrix, check_matrix
from .extract import FeatureVector

# inclusion probability assigned to columns without spread
CONSTANT_COLUMN_VALUE = 0.5


def minmax_columns(X: np.ndarray, col_min: np.ndarray, col_max: np.ndarray) -> np.ndarray:
    span = col_max - col_min
    constant = span == 0
    safe_span = np.where(constant, 1.0, span)
    Z = (X - col_min) / safe_span
    Z[:, constant] = CONSTANT_COLUMN_VALUE
    return Z


class MinMaxNormalizer(OneToOneFeatureMixin, TransformerMixin, BaseEstimator):
    """Scale each column to [0, 1] by its observed minimum and maximum.

    Columns whose minimum equals their maximum carry no information about
    relative prevalence; they map to ``0.5`` rather than an undefined ratio.

    Parameters
    ----------
    clip : bool, default=False
        Clip transformed values of unseen data into [0, 1].

    Attributes
    ----------
    data_min_, data_max_ : ndarray of shape (n_features,)
    constant_ : ndarray of bool, shape (n_features,)
    """

    def __init__(self, clip=False):
        self.clip = clip

    def fit(self, X, y=None):
        X = check_matrix(X, "X", ensure_non_negative=False)
        self.data_min_ = X.min(axis=0)
        self.data_max_ = X.max(axis=0)
        self.constant_ = self.data_max_ == self.data_min_
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "data_min_")
        X = check_matrix(X, "X", ensure_non_negative=False)
        if X.shape[1] != self.n_features_in_:
            raise ValidationError(
                f"X has {X.shape[1]} columns but the normalizer was fitted on {self.n_features_in_}"
            )
        Z = minmax_columns(X, self.data_min_, self.data_max_)
        if self.clip:
            np.clip(Z, 0.0, 1.0, out=Z)
        return Z


@dataclass
class FeatureMatrix:
    """Raw count rows for a corpus, optionally with their normalized form."""

    catalog_version: str
    rows: list[FeatureVector]
    normalized: np.ndarray | None = field(default=None, repr=False)

    @property
    def program_ids(self) -> list[str]:
        return [r.program_id for r in self.rows]

    @property
    def counts(self) -> np.ndarray:
        if not self.rows:
            return np.zeros((0, 0), dtype=np.int64)
        return np.asarray([r.counts for r in self.rows], dtype=np.int64)

    @property
    def n_features(self) -> int:
        return len(self.rows[0]) if self.rows else 0


def normalize(matrix: FeatureMatrix) -> FeatureMatrix:
    """Return a copy of ``matrix`` with ``normalized`` filled in."""
    if not matrix.rows:
        raise ValidationError("cannot normalize an empty feature matrix")
    counts = check_count_matrix(matrix.counts)
    Z = MinMaxNormalizer().fit_transform(counts.astype(np.float64))
    return FeatureMatrix(matrix.catalog_version, list(matrix.rows), Z)
