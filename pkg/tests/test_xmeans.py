import numpy as np
import pytest

from conftest import load_fixture
from corpusfuzz.clustering import ClusteringParams, XMeans, xmeans
from corpusfuzz.exceptions import ValidationError
from oracles import bic as oracle


def test_two_blob_fixture():
    fx = load_fixture("two_blobs.json")
    X = np.array(fx["points"])
    m = xmeans(X, ClusteringParams(k_min=1, k_max=20))
    assert m.k == 2
    m.check_invariants(X)
    got = sorted(m.centroids.tolist())
    want = sorted(fx["blob_means"])
    np.testing.assert_allclose(got, want, atol=0.05)
    assert sorted(m.sizes) == [20, 20]


def test_n_equals_k_min():
    X = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    m = xmeans(X, ClusteringParams(k_min=3, k_max=5))
    assert m.k == 3
    assert m.sse == 0.0
    assert sorted(m.centroids.tolist()) == sorted(X.tolist())


def test_single_tight_blob_stays_whole():
    rng = np.random.default_rng(11)
    X = 0.4 + rng.uniform(0, 0.006, size=(30, 3))
    assert np.max(np.linalg.norm(X[:, None] - X[None], axis=2)) < 0.02
    m = xmeans(X, ClusteringParams(k_min=1, k_max=20))
    assert m.k == 1
    # the oracle agrees that splitting this blob in two lowers the score
    two = xmeans(X, ClusteringParams(k_min=2, k_max=2))
    assert oracle.bic(X.tolist(), [0] * 30) > oracle.bic(X.tolist(), two.labels.tolist())


def test_k_max_is_respected():
    rng = np.random.default_rng(5)
    X = rng.random((60, 2))
    m = xmeans(X, ClusteringParams(k_min=1, k_max=3))
    assert m.k <= 3


def test_deterministic_for_seed():
    X = np.array(load_fixture("two_blobs.json")["points"])
    p = ClusteringParams(k_min=1, k_max=20, rng_seed=9)
    assert xmeans(X, p) == xmeans(X, p)


def test_k_min_above_distinct_points():
    with pytest.raises(ValidationError, match="distinct"):
        xmeans([[0.0], [0.0]], ClusteringParams(k_min=2, k_max=4))


def test_params_validation():
    with pytest.raises(ValidationError):
        ClusteringParams(k_min=3, k_max=2)
    with pytest.raises(ValidationError):
        ClusteringParams(k_min=0)
    with pytest.raises(ValidationError):
        ClusteringParams(tolerance=0)
    with pytest.raises(ValidationError):
        ClusteringParams(splitting="aic")


def test_estimator_api():
    X = np.array(load_fixture("two_blobs.json")["points"])
    est = XMeans(k_min=1, k_max=10, random_state=0).fit(X)
    assert est.n_clusters_ == 2
    assert est.cluster_centers_.shape == (2, 4)
    assert sorted(est.cluster_sizes_) == [20, 20]
    np.testing.assert_array_equal(est.predict(X), est.labels_)
    assert est.get_params() == {"k_min": 1, "k_max": 10, "tol": 0.025, "max_iter": 500,
                                "random_state": 0}
