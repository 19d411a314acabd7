"""Acceptance criteria 1-10.

Each test records a one-line detail; the terminal summary prints one
PASS/FAIL/SKIP line per criterion.  Runtime limits are asserted too.
"""

import itertools
import json
import os
import random
import shutil
import signal
import time
from fractions import Fraction

import numpy as np
import pytest

from corpusfuzz.campaign import CampaignConfig, run_campaign
from corpusfuzz.clustering import ClusteringParams, ClusterModel, kmeans, xmeans
from corpusfuzz.features import MinMaxNormalizer
from corpusfuzz.harness import FailureClass, StageKind, StageResult, Toolchain, classify, digest
from corpusfuzz.mock import mock_toolchain, write_synthetic_corpus
from corpusfuzz.planner import config_gen, plan_schedule, trial_seed
from corpusfuzz.reporting import tally
from oracles.partition import min_sse
from resume_harness import cli, normalized_log, run_and_kill, write_config


def _detail(record_property, text):
    record_property("detail", text)


def _model_with_sizes(sizes, d=2):
    k = len(sizes)
    return ClusterModel(np.full((k, d), 0.5), sizes, np.repeat(np.arange(k), sizes), 0.0)


# 1 ------------------------------------------------------------------------
def test_criterion_1_normalization(record_property):
    start = time.monotonic()
    rng = np.random.default_rng(1)
    worst = 0.0
    for _ in range(1000):
        n, d = int(rng.integers(1, 51)), int(rng.integers(1, 33))
        X = rng.integers(0, int(rng.integers(1, 50)), size=(n, d))
        Z = MinMaxNormalizer().fit_transform(X)
        lo, hi = X.min(axis=0), X.max(axis=0)
        const = lo == hi
        expected = np.where(const, 0.5, (X - lo) / np.where(const, 1, hi - lo))
        worst = max(worst, float(np.abs(Z - expected).max()))
        assert (Z[:, const] == 0.5).all()
        for j in np.flatnonzero(~const):
            assert (Z[X[:, j] == lo[j], j] == 0.0).all()
            assert (Z[X[:, j] == hi[j], j] == 1.0).all()
    elapsed = time.monotonic() - start
    _detail(record_property, f"1000 matrices, max |error| {worst:.1e}")
    assert worst <= 1e-12
    assert elapsed < 5


# 2 ------------------------------------------------------------------------
def test_criterion_2_kmeans_brute_force(record_property):
    start = time.monotonic()
    rng = np.random.default_rng(2)
    matched = 0
    for _ in range(100):
        k = int(rng.integers(2, 4))
        n = int(rng.integers(k + 1, 9))
        d = int(rng.integers(1, 3))
        X = rng.random((n, d))
        distinct = np.unique(X, axis=0)
        best = min(kmeans(X, k, distinct[list(c)]).sse
                   for c in itertools.combinations(range(len(distinct)), k))
        optimum = min_sse(X.tolist(), k)
        if best == pytest.approx(optimum, rel=1e-12, abs=1e-15):
            matched += 1
    elapsed = time.monotonic() - start
    _detail(record_property, f"{matched}/100 datasets reach the exhaustive minimum")
    assert matched == 100
    assert elapsed < 60


# 3 ------------------------------------------------------------------------
def _ball(rng, center, radius, n):
    d = len(center)
    v = rng.normal(size=(n, d))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    r = radius * rng.random(n) ** (1.0 / d)
    return center + v * r[:, None]


def test_criterion_3_xmeans_recovery(record_property):
    start = time.monotonic()
    rng = np.random.default_rng(3)
    two_ok = 0
    for trial in range(50):
        d = int(rng.integers(4, 33))
        while True:
            a, b = rng.uniform(0.05, 0.95, size=(2, d))
            if np.linalg.norm(a - b) >= 0.6:
                break
        A = _ball(rng, a, 0.05, int(rng.integers(15, 40)))
        B = _ball(rng, b, 0.05, int(rng.integers(15, 40)))
        X = np.vstack([A, B])
        m = xmeans(X, ClusteringParams(k_min=1, k_max=20, rng_seed=trial))
        if m.k == 2:
            means = [A.mean(axis=0), B.mean(axis=0)]
            near = [min(np.abs(c - mu).max() for c in m.centroids) for mu in means]
            if max(near) <= 0.05:
                two_ok += 1
    one_ok = 0
    for trial in range(50):
        d = int(rng.integers(4, 33))
        X = _ball(rng, rng.uniform(0.05, 0.95, d), 0.05, int(rng.integers(15, 60)))
        m = xmeans(X, ClusteringParams(k_min=1, k_max=20, rng_seed=trial))
        one_ok += m.k == 1
    elapsed = time.monotonic() - start
    _detail(record_property, f"two blobs {two_ok}/50, single blob {one_ok}/50")
    assert two_ok >= 48 and one_ok >= 48
    assert elapsed < 120


# 4 ------------------------------------------------------------------------
def test_criterion_4_config_gen_statistics(record_property):
    start = time.monotonic()
    # two features under test plus two always-off and two always-on features
    centroid = np.array([0.1, 0.7, 0.0, 0.0, 1.0, 1.0])
    n = 100_000
    hits = np.zeros(6, dtype=np.int64)
    for i in range(n):
        cfg = config_gen(centroid, "kconfig-weighted", trial_seed(4, i))
        hits += cfg.decisions
    freq = hits / n
    elapsed = time.monotonic() - start
    _detail(record_property, f"frequencies {freq[0]:.4f}, {freq[1]:.4f}; all-0/all-1 exact")
    assert abs(freq[0] - 0.1) <= 0.005 and abs(freq[1] - 0.7) <= 0.005
    assert hits[2] == hits[3] == 0 and hits[4] == hits[5] == n
    assert elapsed < 10


# 5 ------------------------------------------------------------------------
def test_criterion_5_schedule_laws(record_property):
    start = time.monotonic()
    rng = np.random.default_rng(5)
    for _ in range(200):
        k = int(rng.integers(1, 151))
        budget = int(rng.integers(1, 10_001))
        sizes = [int(s) for s in rng.integers(1, 200, size=k)]
        model = _model_with_sizes(sizes)
        rr = plan_schedule(model, "kconfig-round-robin", budget, 0).counts()
        assert max(rr) - min(rr) <= 1 and sum(rr) == budget
        w = plan_schedule(model, "kconfig-weighted", budget, 0)
        counts = w.counts()
        assert len(w.schedule) == budget and sum(counts) == budget
        total = sum(sizes)
        assert all(abs(Fraction(c) - Fraction(budget * s, total)) < 1 for c, s in zip(counts, sizes))
    elapsed = time.monotonic() - start
    _detail(record_property, "200 instances")
    assert elapsed < 5


# 6 ------------------------------------------------------------------------
def test_criterion_6_classification_table(record_property):
    start = time.monotonic()
    OK, CR, TO = (StageResult(StageKind.OK, 0), StageResult(StageKind.CRASH, 1),
                  StageResult(StageKind.TIMEOUT, None))
    outputs = [StageResult(StageKind.OK, 0, digest(b"checksum = 1")),
               StageResult(StageKind.OK, 0, digest(b"checksum = 2")),
               StageResult(StageKind.OK, 1, digest(b"checksum = 1")),
               StageResult(StageKind.CRASH, "SIGSEGV"), StageResult(StageKind.TIMEOUT, None)]
    # outcome table rows: (-O0 outcome, -O3 outcome, counted as failure)
    rows = {
        ("crash", "crash"): False,
        ("crash", "no crash"): True,
        ("no crash", "crash"): True,
        ("identical", "identical"): False,
        ("different", "different"): True,
    }
    seen_rows = set()
    total = 0
    for cl, ch in itertools.product([OK, CR, TO], repeat=2):
        for el in (outputs if cl is OK else [None]):
            for eh in (outputs if ch is OK else [None]):
                fc = classify(cl, ch, el, eh)
                total += 1
                assert isinstance(fc, FailureClass)
                if cl is CR or ch is CR:
                    key = ("crash" if cl is CR else "no crash", "crash" if ch is CR else "no crash")
                elif cl is OK and ch is OK and el.kind is StageKind.OK and eh.kind is StageKind.OK:
                    key = ("identical",) * 2 if el.same_behaviour(eh) else ("different",) * 2
                else:
                    continue
                assert fc.is_differential_failure is rows[key], (key, fc)
                seen_rows.add(key)
    elapsed = time.monotonic() - start
    _detail(record_property, f"{total} combinations, {len(seen_rows)}/5 outcome-table rows reproduced")
    assert seen_rows == set(rows)
    assert elapsed < 1


# 7 and 8 ------------------------------------------------------------------
SEEDS = range(5)
BUDGET = 2000
STRATEGIES = ("kconfig-round-robin", "swarm", "default")


@pytest.fixture(scope="module")
def simulation(tmp_path_factory):
    base = tmp_path_factory.mktemp("simulation")
    corpus = base / "corpus"
    write_synthetic_corpus(corpus, n_programs=60, rich=("volatiles", "unions"))
    tc = mock_toolchain("volatiles-unions")
    start = time.monotonic()
    # cluster once; every kconfig campaign reuses the model
    seed_cfg = CampaignConfig(output_dir=str(base / "model-run"), strategy="kconfig-round-robin",
                              budget=1, toolchain=tc, corpus_dir=str(corpus), workers=2)
    run_campaign(seed_cfg)
    model = os.path.join(seed_cfg.output_dir, "model.json")
    results = {}
    for seed in SEEDS:
        for strategy in STRATEGIES:
            cfg = CampaignConfig(output_dir=str(base / f"{strategy}-{seed}"), strategy=strategy,
                                 budget=BUDGET, master_seed=seed, toolchain=tc,
                                 model=model if strategy.startswith("kconfig") else None, workers=2)
            run_campaign(cfg)
            with open(os.path.join(cfg.output_dir, "records.jsonl")) as fh:
                results[strategy, seed] = tally(fh.read().splitlines(), strategy)
    return {"base": base, "model": model, "tc": tc, "results": results,
            "elapsed": time.monotonic() - start}


@pytest.mark.slow
def test_criterion_7_end_to_end_simulation(simulation, record_property):
    res = simulation["results"]
    wins = 0
    lines = []
    for seed in SEEDS:
        rr, sw, df = (res[s, seed].mc for s in STRATEGIES)
        lines.append(f"{rr}/{sw}/{df}")
        wins += rr > df and rr >= sw
        for s in STRATEGIES:
            res[s, seed].check_partition()
            assert res[s, seed].total == BUDGET
    _detail(record_property, f"MC round-robin/swarm/default per seed: {' '.join(lines)}; "
                             f"{wins}/5 seeds satisfy the ordering")
    assert all(res["default", seed].mc == 0 for seed in SEEDS)
    assert wins >= 4
    assert simulation["elapsed"] < 600


@pytest.mark.slow
def test_criterion_8_reproducibility(simulation, record_property):
    start = time.monotonic()
    base = simulation["base"]
    cfg = CampaignConfig(output_dir=str(base / "rerun"), strategy="kconfig-round-robin",
                         budget=BUDGET, master_seed=0, toolchain=simulation["tc"],
                         model=simulation["model"], workers=2)
    run_campaign(cfg)
    first = normalized_log(base / "kconfig-round-robin-0" / "records.jsonl")
    second = normalized_log(base / "rerun" / "records.jsonl")
    elapsed = time.monotonic() - start
    _detail(record_property, f"{len(second)} records compared after blanking wall_time")
    assert "\n".join(first).encode() == "\n".join(second).encode()
    assert elapsed < 600


# 9 ------------------------------------------------------------------------
@pytest.mark.slow
def test_criterion_9_resume_integrity(tmp_path, record_property):
    start = time.monotonic()
    budget = 150
    reference = tmp_path / "reference"
    ref_cfg = write_config(tmp_path / "ref.json", reference, budget=budget, master_seed=9)
    assert cli("run", ref_cfg).returncode == 0
    expected = normalized_log(reference / "records.jsonl")
    rnd = random.Random(9)
    cuts = []
    for rep in range(10):
        out = tmp_path / f"run{rep}"
        cfg = write_config(tmp_path / f"c{rep}.json", out, budget=budget, master_seed=9)
        sig = signal.SIGKILL if rep % 2 == 0 else signal.SIGINT
        cut = rnd.randrange(1, budget)
        cuts.append(run_and_kill(cfg, out / "records.jsonl", cut, sig))
        res = cli("run", cfg)
        assert res.returncode == 0, res.stderr
        log = normalized_log(out / "records.jsonl")
        indices = [json.loads(line)["trial_index"] for line in log]
        assert len(log) == budget and len(set(indices)) == budget
        assert log == expected
        shutil.rmtree(out)
    elapsed = time.monotonic() - start
    _detail(record_property, f"10 kills at records {cuts}, all resumed to {budget} unique records")
    assert elapsed < 300


# 10 -----------------------------------------------------------------------
def _system_compiler():
    for cc in ("gcc", "clang", "cc"):
        if shutil.which(cc):
            return cc
    return None


@pytest.mark.realtool
@pytest.mark.skipif(shutil.which("csmith") is None, reason="csmith not installed (optional criterion)")
def test_criterion_10_real_toolchain_smoke(tmp_path, record_property):
    cc = _system_compiler()
    if cc is None:
        pytest.skip("no system C compiler")
    start = time.monotonic()
    include = os.environ.get("CSMITH_INCLUDE", "/usr/include/csmith")
    tc = Toolchain(generator_cmd=("csmith",), compiler_cmd=(cc,),
                   compiler_args=("-w", f"-I{include}"), compile_timeout=10.0)
    cfg = CampaignConfig(output_dir=str(tmp_path / "real"), strategy="swarm", budget=100,
                         master_seed=10, toolchain=tc, workers=1)
    run_campaign(cfg)
    with open(tmp_path / "real" / "records.jsonl") as fh:
        lines = fh.read().splitlines()
    summary = tally(lines, "swarm")
    assert summary.total == 100 and summary.skipped == 0
    for line in lines:
        rec = json.loads(line)
        for key in ("compile_low", "compile_high"):
            assert rec[key]["wall_time"] < 10.0 + 2.0
    elapsed = time.monotonic() - start
    _detail(record_property, f"{summary.total} trials classified, MC={summary.mc}")
    assert elapsed < 1800
