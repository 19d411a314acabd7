"""K-Means / X-Means clustering over normalized feature vectors."""

from .bic import bic_from_stats, bic_score
from .kmeans import KMeans, kmeans, kmeans_plus_plus, nearest, sse
from .model import ClusteringParams, ClusterModel, load_model, model_from_dict, model_to_dict, save_model
from .xmeans import XMeans, xmeans

__all__ = [
    "ClusterModel",
    "ClusteringParams",
    "KMeans",
    "XMeans",
    "bic_from_stats",
    "bic_score",
    "kmeans",
    "kmeans_plus_plus",
    "load_model",
    "model_from_dict",
    "model_to_dict",
    "nearest",
    "save_model",
    "sse",
    "xmeans",
]
