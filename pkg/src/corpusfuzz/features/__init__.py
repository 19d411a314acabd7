"""Feature catalog, extraction and normalization."""

from .catalog import (
    DEFAULT_CATALOG,
    UNDETECTABLE,
    FeatureCatalog,
    FeatureSpec,
    default_catalog,
    format_catalog,
    load_catalog,
    parse_catalog,
)
from .extract import FeatureExtractor, FeatureVector, decode_source, extract_features, extract_file
from .io import dumps_vectors_csv, loads_vectors_csv, read_vectors_csv, write_vectors_csv
from .normalize import CONSTANT_COLUMN_VALUE, FeatureMatrix, MinMaxNormalizer, normalize

__all__ = [
    "CONSTANT_COLUMN_VALUE",
    "DEFAULT_CATALOG",
    "UNDETECTABLE",
    "FeatureCatalog",
    "FeatureExtractor",
    "FeatureMatrix",
    "FeatureSpec",
    "FeatureVector",
    "MinMaxNormalizer",
    "decode_source",
    "default_catalog",
    "dumps_vectors_csv",
    "extract_features",
    "extract_file",
    "format_catalog",
    "load_catalog",
    "loads_vectors_csv",
    "normalize",
    "parse_catalog",
    "read_vectors_csv",
    "write_vectors_csv",
]
