"""Cluster model container, clustering parameters and model file I/O."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

import numpy as np

from ..exceptions import ValidationError

MODEL_FORMAT = "corpusfuzz-cluster-model/1"


@dataclass(frozen=True)
class ClusteringParams:
    k_min: int = 2
    k_max: int = 200
    tolerance: float = 0.025
    splitting: str = "bic"
    distance: str = "sse"
    rng_seed: int = 0
    max_iter: int = 500

    def __post_init__(self):
        for name in ("k_min", "k_max", "max_iter"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, (int, np.integer)):
                raise ValidationError(f"{name} must be an integer, got {v!r}")
        if self.k_min < 1:
            raise ValidationError(f"k_min must be >= 1, got {self.k_min}")
        if self.k_max < self.k_min:
            raise ValidationError(f"k_max ({self.k_max}) must be >= k_min ({self.k_min})")
        if not self.tolerance > 0:
            raise ValidationError(f"tolerance must be positive, got {self.tolerance}")
        if self.max_iter < 1:
            raise ValidationError(f"max_iter must be >= 1, got {self.max_iter}")
        if self.splitting != "bic":
            raise ValidationError(f"unsupported splitting criterion {self.splitting!r} (only 'bic')")
        if self.distance != "sse":
            raise ValidationError(f"unsupported distance {self.distance!r} (only 'sse')")

    def to_dict(self):
        return {
            "k_min": int(self.k_min),
            "k_max": int(self.k_max),
            "tolerance": float(self.tolerance),
            "splitting": self.splitting,
            "distance": self.distance,
            "rng_seed": int(self.rng_seed),
            "max_iter": int(self.max_iter),
        }


@dataclass(frozen=True, eq=False)
class ClusterModel:
    """Result of a clustering run.

    ``labels[i]`` is the cluster of the i-th input point; ``program_ids``
    (when known) names those points in the same order.
    """

    centroids: np.ndarray
    sizes: tuple[int, ...]
    labels: np.ndarray
    sse: float
    program_ids: tuple[str, ...] | None = None
    sse_history: tuple[float, ...] = ()
    n_iter: int = 0
    catalog_version: str = "unversioned"
    params: ClusteringParams | None = None
    feature_names: tuple[str, ...] | None = field(default=None)

    def __post_init__(self):
        c = np.array(self.centroids, dtype=np.float64)
        c.setflags(write=False)
        lab = np.array(self.labels, dtype=np.intp)
        lab.setflags(write=False)
        object.__setattr__(self, "centroids", c)
        object.__setattr__(self, "labels", lab)
        object.__setattr__(self, "sizes", tuple(int(s) for s in self.sizes))
        if self.program_ids is not None:
            object.__setattr__(self, "program_ids", tuple(self.program_ids))
        object.__setattr__(self, "sse_history", tuple(float(s) for s in self.sse_history))
        if c.ndim != 2 or c.shape[0] != len(self.sizes):
            raise ValidationError("centroids and sizes disagree on k")

    @property
    def k(self) -> int:
        return self.centroids.shape[0]

    @property
    def n_points(self) -> int:
        return int(sum(self.sizes))

    @property
    def assignment(self) -> dict:
        ids = self.program_ids if self.program_ids is not None else range(len(self.labels))
        return {pid: int(c) for pid, c in zip(ids, self.labels)}

    def __eq__(self, other):
        if not isinstance(other, ClusterModel):
            return NotImplemented
        return (
            np.array_equal(self.centroids, other.centroids)
            and self.sizes == other.sizes
            and np.array_equal(self.labels, other.labels)
            and self.sse == other.sse
            and self.program_ids == other.program_ids
            and self.catalog_version == other.catalog_version
            and self.params == other.params
        )

    def check_invariants(self, X=None) -> None:
        if self.k != len(self.sizes):
            raise AssertionError("k != len(sizes)")
        if any(s <= 0 for s in self.sizes):
            raise AssertionError("empty cluster in final model")
        if len(self.labels) != self.n_points:
            raise AssertionError("sum(sizes) != number of points")
        counts = np.bincount(self.labels, minlength=self.k)
        if tuple(counts) != self.sizes:
            raise AssertionError("sizes disagree with labels")
        if X is not None:
            lo, hi = X.min(axis=0), X.max(axis=0)
            if (self.centroids < lo - 1e-12).any() or (self.centroids > hi + 1e-12).any():
                raise AssertionError("centroid outside the data's bounding box")


def model_to_dict(model: ClusterModel) -> dict:
    # float() values serialize via repr, the shortest round-tripping decimal
    return {
        "format": MODEL_FORMAT,
        "catalog_version": model.catalog_version,
        "k": model.k,
        "feature_names": list(model.feature_names) if model.feature_names is not None else None,
        "centroids": [[float(x) for x in row] for row in model.centroids],
        "sizes": list(model.sizes),
        "sse": float(model.sse),
        "program_ids": list(model.program_ids) if model.program_ids is not None else None,
        "labels": [int(x) for x in model.labels],
        "params": model.params.to_dict() if model.params is not None else None,
        "n_iter": int(model.n_iter),
    }


def model_from_dict(d: dict) -> ClusterModel:
    if d.get("format") != MODEL_FORMAT:
        raise ValidationError(f"not a cluster model file (format={d.get('format')!r})")
    centroids = np.array(d["centroids"], dtype=np.float64)
    if centroids.ndim != 2 or centroids.shape[0] != d["k"]:
        raise ValidationError("model file: k does not match the number of centroids")
    params = ClusteringParams(**d["params"]) if d.get("params") else None
    return ClusterModel(
        centroids=centroids,
        sizes=tuple(d["sizes"]),
        labels=np.array(d.get("labels") or [], dtype=np.intp),
        sse=float(d["sse"]),
        program_ids=tuple(d["program_ids"]) if d.get("program_ids") is not None else None,
        n_iter=int(d.get("n_iter", 0)),
        catalog_version=d.get("catalog_version", "unversioned"),
        params=params,
        feature_names=tuple(d["feature_names"]) if d.get("feature_names") else None,
    )


def save_model(model: ClusterModel, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_dict(model), fh, indent=1)
        fh.write("\n")


def load_model(path) -> ClusterModel:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{os.fspath(path)}: malformed model file ({exc})") from None
    return model_from_dict(data)
