"""Per-program feature counting."""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from ..exceptions import ExtractionError, ValidationError
from .catalog import FeatureCatalog, default_catalog
from .detectors import DETECTORS, lex

# share of control characters above which text is treated as binary
_CONTROL_LIMIT = 0.05


@dataclass(frozen=True)
class FeatureVector:
    program_id: str
    counts: tuple[int, ...]

    def __post_init__(self):
        counts = tuple(int(c) for c in self.counts)
        if any(c < 0 for c in counts):
            raise ValidationError(f"{self.program_id}: feature counts must be non-negative")
        object.__setattr__(self, "counts", counts)

    def __len__(self):
        return len(self.counts)


def decode_source(data: bytes | str, name: str = "<source>") -> str:
    """Return C text, rejecting content that looks binary."""
    if isinstance(data, str):
        text = data
    else:
        if b"\x00" in data:
            raise ExtractionError(f"{name}: binary content (NUL byte)")
        try:
            text = data.decode("utf-8")
        except UnicodeDecodeError:
            text = data.decode("latin-1")
    if "\x00" in text:
        raise ExtractionError(f"{name}: binary content (NUL byte)")
    if text:
        control = sum(1 for ch in text if ord(ch) < 32 and ch not in "\t\n\r\f\v")
        if control / len(text) > _CONTROL_LIMIT:
            raise ExtractionError(f"{name}: binary content ({control} control characters)")
    return text


def extract_features(
    source: str | bytes,
    catalog: FeatureCatalog | None = None,
    program_id: str = "<source>",
) -> FeatureVector:
    """Count every catalog feature in one C source text."""
    catalog = catalog or default_catalog()
    text = decode_source(source, program_id)
    lexed = lex(text)
    counts = tuple(DETECTORS[f.detector](lexed) if f.detectable else 0 for f in catalog)
    return FeatureVector(program_id, counts)


def extract_file(path: str | os.PathLike, catalog: FeatureCatalog | None = None,
                 program_id: str | None = None) -> FeatureVector:
    with open(path, "rb") as fh:
        data = fh.read()
    pid = program_id if program_id is not None else os.path.basename(os.fspath(path))
    return extract_features(data, catalog, pid)


class FeatureExtractor(TransformerMixin, BaseEstimator):
    """Map C sources to a count matrix, one column per catalog feature.

    Stateless: ``fit`` only records the catalog dimensions so the extractor
    can sit at the head of a scikit-learn pipeline.

    Parameters
    ----------
    catalog : FeatureCatalog, optional
        Defaults to the bundled Csmith catalog.
    """

    def __init__(self, catalog=None):
        self.catalog = catalog

    def _catalog(self):
        return self.catalog if self.catalog is not None else default_catalog()

    def fit(self, X=None, y=None):
        cat = self._catalog()
        self.n_features_out_ = len(cat)
        self.feature_names_out_ = np.array(cat.names, dtype=object)
        return self

    def transform(self, X):
        """
        Parameters
        ----------
        X : iterable of str or bytes
            Source texts.

        Returns
        -------
        counts : ndarray of shape (n_sources, n_catalog_features), int64
        """
        cat = self._catalog()
        rows = [extract_features(src, cat, f"<{i}>").counts for i, src in enumerate(X)]
        return np.asarray(rows, dtype=np.int64).reshape(len(rows), len(cat))

    def get_feature_names_out(self, input_features=None):
        return np.array(self._catalog().names, dtype=object)
