"""Campaign configuration and the resumable multi-worker trial loop.

Campaign directory layout::

    campaign.json       resolved configuration snapshot
    features.csv        corpus feature vectors (when clustering ran here)
    model.json          cluster model used by centroid strategies
    plan.json           strategy, budget, master seed and full schedule
    records.jsonl       one trial record per line, in trial-index order
    trials/trial-NNNNNN/  program, binaries and record.json of each trial
    failing/            failing programs + manifest.json
    summary.txt         table report
    summary.json        machine-readable summary
"""

from __future__ import annotations

import json
import logging
import os
from concurrent.futures import FIRST_COMPLETED, ThreadPoolExecutor, wait
from dataclasses import dataclass, field, replace

import numpy as np

from .clustering import ClusteringParams, load_model, save_model, xmeans
from .clustering.model import ClusterModel
from .exceptions import ExtractionError, ValidationError
from .features import (
    FeatureMatrix,
    extract_file,
    load_catalog,
    normalize,
    write_vectors_csv,
)
from .features.catalog import DEFAULT_CATALOG, FeatureCatalog
from .features.normalize import CONSTANT_COLUMN_VALUE
from .harness import Toolchain, TrialRecord, run_trial, validate_toolchain
from .harness import process
from .planner import CampaignPlan, Strategy, load_plan, plan_schedule, plan_to_dict, save_plan
from .reporting import collect_failing_suite, render_machine, render_table, tally
from .validation import n_distinct_rows

log = logging.getLogger(__name__)

RECORDS = "records.jsonl"
PLAN = "plan.json"
MODEL = "model.json"
FEATURES = "features.csv"
TRIALS = "trials"
FAILING = "failing"
SOURCE_SUFFIXES = (".c", ".i", ".h")


@dataclass(frozen=True)
class CampaignConfig:
    output_dir: str
    strategy: Strategy = Strategy.ROUND_ROBIN
    budget: int = 10_000
    master_seed: int = 0
    toolchain: Toolchain | None = None
    corpus_dir: str | None = None
    catalog: str = DEFAULT_CATALOG
    model: str | None = None
    clustering: ClusteringParams = field(default_factory=ClusteringParams)
    workers: int = field(default_factory=lambda: os.cpu_count() or 1)
    keep_all: bool = False

    def __post_init__(self):
        object.__setattr__(self, "strategy", Strategy.parse(self.strategy))
        if isinstance(self.budget, bool) or not isinstance(self.budget, int) or self.budget < 1:
            raise ValidationError(f"budget must be an integer >= 1, got {self.budget!r}")
        if isinstance(self.workers, bool) or not isinstance(self.workers, int) or self.workers < 1:
            raise ValidationError(f"workers must be an integer >= 1, got {self.workers!r}")
        if isinstance(self.master_seed, bool) or not isinstance(self.master_seed, int) or self.master_seed < 0:
            raise ValidationError(f"master_seed must be a non-negative integer, got {self.master_seed!r}")
        if self.toolchain is None:
            raise ValidationError("toolchain is required")

    def check_paths(self) -> None:
        if self.corpus_dir is not None and not os.path.isdir(self.corpus_dir):
            raise ValidationError(f"corpus_dir {self.corpus_dir!r} is not a directory")
        if self.catalog != DEFAULT_CATALOG and not os.path.isfile(self.catalog):
            raise ValidationError(f"catalog file {self.catalog!r} does not exist")
        if self.model is not None and not os.path.isfile(self.model):
            raise ValidationError(f"model file {self.model!r} does not exist")
        if self.strategy.uses_centroids and self.model is None and self.corpus_dir is None:
            if not os.path.isfile(os.path.join(self.output_dir, MODEL)):
                raise ValidationError(
                    f"strategy {self.strategy.value!r} needs a cluster model: set 'model' "
                    "(from 'corpusfuzz cluster') or 'corpus_dir'"
                )

    def to_dict(self) -> dict:
        return {
            "output_dir": self.output_dir,
            "strategy": self.strategy.value,
            "budget": self.budget,
            "master_seed": self.master_seed,
            "toolchain": self.toolchain.to_dict(),
            "corpus_dir": self.corpus_dir,
            "catalog": self.catalog,
            "model": self.model,
            "clustering": self.clustering.to_dict(),
            "workers": self.workers,
            "keep_all": self.keep_all,
        }


_CONFIG_KEYS = {"output_dir", "strategy", "budget", "master_seed", "toolchain", "corpus_dir",
                "catalog", "model", "clustering", "workers", "keep_all"}


def toolchain_from_spec(spec) -> Toolchain:
    if isinstance(spec, Toolchain):
        return spec
    if not isinstance(spec, dict):
        raise ValidationError("toolchain must be a mapping")
    if "mock" in spec:
        from .mock import mock_toolchain

        rest = {k: v for k, v in spec.items() if k != "mock"}
        return mock_toolchain(spec["mock"], **rest)
    return Toolchain.from_dict(spec)


def config_from_dict(data: dict, base_dir: str = ".", overrides: dict | None = None) -> CampaignConfig:
    """Build a config; ``overrides`` (e.g. from command-line flags) win over ``data``.

    Relative paths in ``data`` are resolved against ``base_dir``.
    """
    unknown = set(data) - _CONFIG_KEYS
    if unknown:
        raise ValidationError(f"unknown campaign config key(s): {', '.join(sorted(unknown))}")
    merged = dict(data)
    for k, v in (overrides or {}).items():
        if v is not None:
            merged[k] = v
    if "output_dir" not in merged:
        raise ValidationError("campaign config needs 'output_dir' (or pass --output)")
    if "toolchain" not in merged:
        raise ValidationError("campaign config needs a 'toolchain' section")

    def resolve(key):
        value = merged.get(key)
        if value is None or (key == "catalog" and value == DEFAULT_CATALOG):
            return value
        if key in (overrides or {}) and overrides[key] is not None:
            return os.path.abspath(value)
        return os.path.abspath(os.path.join(base_dir, value))

    clustering = merged.get("clustering") or {}
    if not isinstance(clustering, dict):
        raise ValidationError("'clustering' must be a mapping")
    unknown = set(clustering) - set(ClusteringParams.__dataclass_fields__)
    if unknown:
        raise ValidationError(f"clustering: unknown key(s) {', '.join(sorted(unknown))}")
    try:
        params = ClusteringParams(**clustering)
    except ValidationError as exc:
        raise ValidationError(f"clustering: {exc}") from None
    kwargs = dict(
        output_dir=resolve("output_dir"),
        toolchain=toolchain_from_spec(merged["toolchain"]),
        corpus_dir=resolve("corpus_dir"),
        catalog=resolve("catalog") or DEFAULT_CATALOG,
        model=resolve("model"),
        clustering=params,
    )
    for key in ("strategy", "budget", "master_seed", "workers", "keep_all"):
        if key in merged:
            kwargs[key] = merged[key]
    config = CampaignConfig(**kwargs)
    config.check_paths()
    return config


def load_config(path, overrides: dict | None = None) -> CampaignConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ValidationError(f"cannot read campaign config {os.fspath(path)!r}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{os.fspath(path)}: invalid JSON ({exc})") from None
    if not isinstance(data, dict):
        raise ValidationError(f"{os.fspath(path)}: top level must be a JSON object")
    return config_from_dict(data, os.path.dirname(os.path.abspath(path)), overrides)


# ----------------------------------------------------------------- pipeline


def list_corpus(corpus_dir) -> tuple[list[str], list[str]]:
    """(C sources, other files) under ``corpus_dir``; hidden entries are ignored."""
    sources, others = [], []
    for root, dirs, files in os.walk(corpus_dir):
        dirs[:] = [d for d in dirs if not d.startswith(".")]
        for f in files:
            if f.startswith("."):
                continue
            (sources if f.endswith(SOURCE_SUFFIXES) else others).append(os.path.join(root, f))
    return sorted(sources), sorted(others)


def extract_corpus(corpus_dir, catalog: FeatureCatalog) -> tuple[FeatureMatrix, list[str]]:
    """Feature rows for every readable C source, plus one diagnostic per skipped file."""
    rows, problems = [], []
    sources, others = list_corpus(corpus_dir)
    for path in others:
        problems.append(f"skipped {os.path.relpath(path, corpus_dir)}: not a C source file")
    for path in sources:
        pid = os.path.relpath(path, corpus_dir)
        try:
            rows.append(extract_file(path, catalog, pid))
        except (ExtractionError, OSError) as exc:
            problems.append(f"skipped {pid}: {exc}")
    return FeatureMatrix(catalog.version, rows), problems


def cluster_matrix(matrix: FeatureMatrix, params: ClusteringParams, catalog: FeatureCatalog) -> ClusterModel:
    """Normalize and run X-Means.

    Columns that are constant over the corpus sit at 0.5 for every program.
    They cannot move any point relative to another, but they would inflate
    the dimension in the pooled BIC variance and make every split look
    worthwhile, so X-Means runs on the informative columns only and the
    constant coordinates are put back (as 0.5) in the centroids.  ``k_min``
    is lowered to the number of distinct rows when the corpus is smaller.
    """
    norm = normalize(matrix)
    Z = norm.normalized
    informative = Z.min(axis=0) != Z.max(axis=0)
    n, d = Z.shape
    if not informative.any():
        model = ClusterModel(np.full((1, d), CONSTANT_COLUMN_VALUE), (n,), np.zeros(n, dtype=int),
                             0.0, params=params)
    else:
        sub = Z[:, informative]
        distinct = n_distinct_rows(sub)
        if params.k_min > distinct:
            log.info("k_min lowered from %d to %d (distinct rows)", params.k_min, distinct)
            params = replace(params, k_min=distinct, k_max=max(distinct, params.k_max))
        model = xmeans(sub, params)
        C = np.full((model.k, d), CONSTANT_COLUMN_VALUE)
        C[:, informative] = model.centroids
        model = replace(model, centroids=C)
    return replace(model, program_ids=tuple(matrix.program_ids), catalog_version=catalog.version,
                   feature_names=tuple(catalog.names))


def read_records(path) -> tuple[list[TrialRecord], int]:
    """Parse a records log; return (records, byte offset of the valid prefix).

    A trailing line that does not parse (typically cut short by a kill) is
    excluded from the prefix.  Corruption before the last line is an error.
    """
    records = []
    offset = 0
    with open(path, "rb") as fh:
        lines = fh.read().split(b"\n")
    # after the final "\n" there is an empty (or partial) element
    for i, raw in enumerate(lines):
        is_last = i == len(lines) - 1
        if is_last and raw == b"":
            break
        try:
            if is_last:
                raise ValueError("unterminated line")
            records.append(TrialRecord.from_json(raw.decode("utf-8")))
        except (ValueError, KeyError, TypeError) as exc:
            if is_last or (i == len(lines) - 2 and lines[-1] == b""):
                break
            raise ValidationError(f"{os.fspath(path)}: corrupt record on line {i + 1}: {exc}") from None
        offset += len(raw) + 1
    return records, offset


class _OrderedLog:
    """Append records to the log strictly in trial-index order."""

    def __init__(self, path, pending_indices):
        self.fh = open(path, "a", encoding="utf-8")
        self.order = list(pending_indices)
        self.pos = 0
        self.ready: dict[int, TrialRecord] = {}

    def add(self, record: TrialRecord) -> None:
        self.ready[record.trial_index] = record
        while self.pos < len(self.order) and self.order[self.pos] in self.ready:
            rec = self.ready.pop(self.order[self.pos])
            self.fh.write(rec.to_json() + "\n")
            self.pos += 1
        self.fh.flush()

    def close(self):
        self.fh.close()


def prepare(config: CampaignConfig) -> tuple[FeatureCatalog, CampaignPlan]:
    """Resolve catalog, model and plan inside the campaign directory."""
    config.check_paths()
    out = config.output_dir
    os.makedirs(out, exist_ok=True)
    catalog = load_catalog(config.catalog)

    model = None
    model_ref = None
    if config.strategy.uses_centroids:
        local_model = os.path.join(out, MODEL)
        if config.model is not None:
            model = load_model(config.model)
            model_ref = os.path.abspath(config.model)
        elif os.path.isfile(local_model):
            model = load_model(local_model)
            model_ref = MODEL
        else:
            matrix, problems = extract_corpus(config.corpus_dir, catalog)
            for p in problems:
                log.warning("%s", p)
            if not matrix.rows:
                raise ValidationError(f"no corpus files could be read from {config.corpus_dir!r}")
            write_vectors_csv(matrix, catalog, os.path.join(out, FEATURES))
            model = cluster_matrix(matrix, config.clustering, catalog)
            save_model(model, local_model)
            model_ref = MODEL
        if model.centroids.shape[1] != len(catalog):
            raise ValidationError(
                f"model has {model.centroids.shape[1]} dimensions, catalog has {len(catalog)} features"
            )

    plan_path = os.path.join(out, PLAN)
    fresh = plan_schedule(model, config.strategy, config.budget, config.master_seed, model_ref)
    if os.path.isfile(plan_path):
        existing = load_plan(plan_path)
        if plan_to_dict(existing) != plan_to_dict(fresh):
            raise ValidationError(
                f"{plan_path} was written for a different campaign "
                f"(strategy={existing.strategy.value}, budget={existing.budget}, "
                f"master_seed={existing.master_seed}); use a new output directory"
            )
        plan = existing
    else:
        save_plan(fresh, plan_path)
        plan = fresh
    with open(os.path.join(out, "campaign.json"), "w", encoding="utf-8") as fh:
        json.dump(config.to_dict(), fh, indent=1, sort_keys=True)
        fh.write("\n")
    return catalog, plan


def run_campaign(config: CampaignConfig, on_record=None) -> dict:
    """Run (or resume) a campaign; return counts of executed and skipped trials.

    Trials already present in ``records.jsonl`` are not re-run.  The log is
    written in trial-index order regardless of worker scheduling, so a
    resumed campaign produces the same log as an uninterrupted one.
    """
    validate_toolchain(config.toolchain)
    catalog, plan = prepare(config)
    out = config.output_dir
    records_path = os.path.join(out, RECORDS)
    done: set[int] = set()
    if os.path.exists(records_path):
        existing, offset = read_records(records_path)
        if offset != os.path.getsize(records_path):
            log.warning("dropping a truncated trailing record from %s", records_path)
            with open(records_path, "r+b") as fh:
                fh.truncate(offset)
        done = {r.trial_index for r in existing}
    pending = [i for i in range(plan.budget) if i not in done]
    trials_dir = os.path.join(out, TRIALS)
    os.makedirs(trials_dir, exist_ok=True)

    def one(index):
        cfg = plan.config(index, len(catalog))
        return run_trial(cfg, config.toolchain, trials_dir, catalog, config.keep_all)

    logbook = _OrderedLog(records_path, pending)
    executed = 0
    try:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            queue = iter(pending)
            inflight = set()
            window = 2 * config.workers
            try:
                while True:
                    while len(inflight) < window:
                        idx = next(queue, None)
                        if idx is None:
                            break
                        inflight.add(pool.submit(one, idx))
                    if not inflight:
                        break
                    finished, inflight = wait(inflight, return_when=FIRST_COMPLETED)
                    for fut in finished:
                        rec = fut.result()
                        logbook.add(rec)
                        executed += 1
                        if on_record is not None:
                            on_record(rec)
            except BaseException:
                process.kill_all_active()
                for fut in inflight:
                    fut.cancel()
                raise
    finally:
        logbook.close()

    finalize(out, catalog)
    return {"executed": executed, "already_done": len(done), "budget": plan.budget}


def finalize(out, catalog: FeatureCatalog | None = None):
    """Write summary files and the failing suite for a campaign directory."""
    records_path = os.path.join(out, RECORDS)
    with open(records_path, encoding="utf-8") as fh:
        lines = [line for line in fh.read().split("\n") if line]
    strategy = ""
    plan_path = os.path.join(out, PLAN)
    if os.path.isfile(plan_path):
        strategy = load_plan(plan_path).strategy.value
    summary = tally(lines, strategy)
    with open(os.path.join(out, "summary.txt"), "w", encoding="utf-8") as fh:
        fh.write(render_table([summary]))
    with open(os.path.join(out, "summary.json"), "w", encoding="utf-8") as fh:
        fh.write(render_machine(summary))
    collect_failing_suite(lines, os.path.join(out, FAILING), os.path.join(out, TRIALS), catalog)
    return summary

