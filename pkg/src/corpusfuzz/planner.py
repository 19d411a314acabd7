"""Campaign planning: which centroid drives each trial, and per-trial configs.

Seeds
-----
Every trial gets ``trial_seed = splitmix64(master_seed + (trial_index + 1) * GOLDEN)``
(arithmetic mod 2**64), i.e. element ``trial_index`` of the SplitMix64
stream started at ``master_seed``.  Feature decisions are drawn from a
PCG64 generator seeded with ``trial_seed``; the generator's own seed is
``splitmix64(trial_seed ^ GENERATOR_SALT)`` truncated to 32 bits so it is
accepted by Csmith's ``--seed``.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .clustering.model import ClusterModel
from .exceptions import ValidationError
from .features.catalog import FeatureCatalog
from .validation import check_int, check_probability_vector

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
GENERATOR_SALT = 0xD1B54A32D192ED03
SEED_FLAG = "--seed"
PLAN_FORMAT = "corpusfuzz-plan/1"


class Strategy(str, Enum):
    ROUND_ROBIN = "kconfig-round-robin"
    WEIGHTED = "kconfig-weighted"
    SWARM = "swarm"
    DEFAULT = "default"

    @property
    def uses_centroids(self) -> bool:
        return self in (Strategy.ROUND_ROBIN, Strategy.WEIGHTED)

    @classmethod
    def parse(cls, value) -> "Strategy":
        if isinstance(value, Strategy):
            return value
        try:
            return cls(value)
        except ValueError:
            choices = ", ".join(s.value for s in cls)
            raise ValidationError(f"unknown strategy {value!r} (choose from {choices})") from None


def splitmix64(x: int) -> int:
    z = (x + GOLDEN) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def trial_seed(master_seed: int, trial_index: int) -> int:
    return splitmix64((master_seed + trial_index * GOLDEN) & MASK64)


def generator_seed(seed: int) -> int:
    return splitmix64(seed ^ GENERATOR_SALT) & 0xFFFFFFFF


@dataclass(frozen=True)
class GeneratorConfig:
    decisions: tuple[bool, ...]
    centroid_index: int | None
    generator_seed: int
    trial_index: int = 0
    strategy: Strategy = Strategy.ROUND_ROBIN

    def __post_init__(self):
        if not isinstance(self.decisions, tuple) or not all(type(x) is bool for x in self.decisions):
            object.__setattr__(self, "decisions", tuple(bool(x) for x in self.decisions))
        object.__setattr__(self, "strategy", Strategy.parse(self.strategy))

    @property
    def bits(self) -> str:
        return "".join("1" if d else "0" for d in self.decisions)

    def to_dict(self) -> dict:
        return {
            "strategy": self.strategy.value,
            "centroid_index": self.centroid_index,
            "generator_seed": self.generator_seed,
            "trial_index": self.trial_index,
            "decisions": self.bits,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GeneratorConfig":
        return cls(
            decisions=tuple(ch == "1" for ch in d["decisions"]),
            centroid_index=d.get("centroid_index"),
            generator_seed=int(d["generator_seed"]),
            trial_index=int(d.get("trial_index", 0)),
            strategy=d.get("strategy", Strategy.ROUND_ROBIN.value),
        )


@dataclass(frozen=True)
class CampaignPlan:
    strategy: Strategy
    budget: int
    schedule: tuple[int | None, ...]
    master_seed: int
    centroids: np.ndarray | None = field(default=None, compare=False, repr=False)
    model_ref: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "strategy", Strategy.parse(self.strategy))
        object.__setattr__(self, "schedule", tuple(self.schedule))
        if len(self.schedule) != self.budget:
            raise ValidationError(f"schedule length {len(self.schedule)} != budget {self.budget}")
        if self.strategy.uses_centroids:
            k = 0 if self.centroids is None else len(self.centroids)
            bad = [c for c in self.schedule if c is None or not 0 <= c < k]
            if bad:
                raise ValidationError(f"schedule references invalid centroid index {bad[0]!r} (k={k})")

    def counts(self, k: int | None = None) -> list[int]:
        k = k if k is not None else (len(self.centroids) if self.centroids is not None else 0)
        out = [0] * k
        for c in self.schedule:
            if c is not None:
                out[c] += 1
        return out

    def trial_seed(self, trial_index: int) -> int:
        return trial_seed(self.master_seed, trial_index)

    def config(self, trial_index: int, n_features: int) -> GeneratorConfig:
        c = self.schedule[trial_index]
        centroid = None if c is None else self.centroids[c]
        cfg = config_gen(centroid, self.strategy, self.trial_seed(trial_index), n_features)
        return GeneratorConfig(cfg.decisions, c, cfg.generator_seed, trial_index, self.strategy)


def apportion(sizes, budget: int) -> list[int]:
    """Largest-remainder (Hamilton) apportionment, ties to the lower index.

    Exact integer arithmetic: quota_i = budget * sizes_i / sum(sizes).
    """
    sizes = [int(s) for s in sizes]
    if not sizes or any(s < 0 for s in sizes) or sum(sizes) == 0:
        raise ValidationError("cluster sizes must be non-negative with a positive total")
    total = sum(sizes)
    floors = [budget * s // total for s in sizes]
    remainders = [budget * s % total for s in sizes]
    left = budget - sum(floors)
    order = sorted(range(len(sizes)), key=lambda i: (-remainders[i], i))
    for i in order[:left]:
        floors[i] += 1
    return floors


def interleave(counts) -> list[int]:
    """Spread per-centroid counts evenly over the schedule.

    The j-th of centroid i's c_i trials (j = 1..c_i) is placed at virtual
    time (2j - 1) / (2 c_i), the middle of its share; slots are filled in
    time order with ties to the lower index.  The float keys are exact
    for ordering: equal fractions round to the same double, and distinct
    ones with these small integers differ by far more than one ulp.
    """
    counts = np.array([int(c) for c in counts], dtype=np.int64)
    if (counts < 0).any():
        raise ValidationError("counts must be non-negative")
    owner = np.repeat(np.arange(len(counts)), counts)
    j = np.concatenate([np.arange(1, c + 1) for c in counts]) if counts.sum() else np.zeros(0, np.int64)
    times = (2 * j - 1) / (2.0 * counts[owner])
    return owner[np.lexsort((owner, times))].tolist()


def plan_schedule(model: ClusterModel | None, strategy, budget: int, master_seed: int,
                  model_ref: str | None = None) -> CampaignPlan:
    """Build the per-trial centroid schedule.  Never consults an RNG."""
    strategy = Strategy.parse(strategy)
    budget = check_int(budget, "budget", minimum=1)
    master_seed = check_int(master_seed, "master_seed", minimum=0) & MASK64
    if not strategy.uses_centroids:
        return CampaignPlan(strategy, budget, (None,) * budget, master_seed, None, model_ref)
    if model is None or model.k < 1:
        raise ValidationError(f"strategy {strategy.value!r} needs a cluster model with k >= 1")
    k = model.k
    if strategy is Strategy.ROUND_ROBIN:
        schedule = [t % k for t in range(budget)]
    else:
        schedule = interleave(apportion(model.sizes, budget))
    return CampaignPlan(strategy, budget, tuple(schedule), master_seed,
                        np.array(model.centroids), model_ref)


def uniform_draws(seed: int, n: int) -> np.ndarray:
    """n draws from (0, 1]; 1.0 is reachable, 0.0 is not.

    Same values as ``1 - Generator(PCG64(seed)).random(n)``, computed from
    the raw 64-bit stream to skip the Generator wrapper.
    """
    raw = np.random.PCG64(seed).random_raw(n)
    return 1.0 - (raw >> np.uint64(11)) * (1.0 / 9007199254740992.0)


def config_gen(centroid, strategy, seed: int, n_features: int | None = None) -> GeneratorConfig:
    """Decide each feature for one trial.

    Centroid strategies include feature i iff u_i <= centroid_i; swarm uses
    0.5 for every feature; default includes everything.
    """
    strategy = Strategy.parse(strategy)
    seed = int(seed) & MASK64
    if strategy.uses_centroids:
        if centroid is None:
            raise ValidationError(f"strategy {strategy.value!r} needs a centroid")
        probs = check_probability_vector(centroid, "centroid", n_features)
        decisions = uniform_draws(seed, probs.shape[0]) <= probs
    elif strategy is Strategy.SWARM:
        if n_features is None:
            raise ValidationError("swarm configs need the catalog size")
        decisions = uniform_draws(seed, n_features) <= 0.5
    else:
        if n_features is None:
            raise ValidationError("default configs need the catalog size")
        decisions = np.ones(n_features, dtype=bool)
    return GeneratorConfig(tuple(decisions.tolist()), None, generator_seed(seed), 0, strategy)


def render_flags(config: GeneratorConfig, catalog: FeatureCatalog) -> list[str]:
    """Generator arguments for one config, in catalog order, seed last.

    The default strategy passes no feature flags so the generator's own
    defaults apply.
    """
    if len(config.decisions) != len(catalog):
        raise ValidationError(
            f"config has {len(config.decisions)} decisions, catalog has {len(catalog)} features"
        )
    args = []
    if config.strategy is not Strategy.DEFAULT:
        args = [f.enable_flag if on else f.disable_flag for f, on in zip(catalog, config.decisions)]
    return args + [SEED_FLAG, str(config.generator_seed)]


# ------------------------------------------------------------------ plan file


def plan_to_dict(plan: CampaignPlan) -> dict:
    return {
        "format": PLAN_FORMAT,
        "strategy": plan.strategy.value,
        "budget": plan.budget,
        "master_seed": plan.master_seed,
        "model_ref": plan.model_ref,
        "centroids": None if plan.centroids is None else [[float(x) for x in r] for r in plan.centroids],
        "schedule": list(plan.schedule),
    }


def plan_from_dict(d: dict) -> CampaignPlan:
    if d.get("format") != PLAN_FORMAT:
        raise ValidationError(f"not a plan file (format={d.get('format')!r})")
    cents = d.get("centroids")
    return CampaignPlan(
        strategy=d["strategy"],
        budget=int(d["budget"]),
        schedule=tuple(d["schedule"]),
        master_seed=int(d["master_seed"]),
        centroids=None if cents is None else np.array(cents, dtype=np.float64),
        model_ref=d.get("model_ref"),
    )


def save_plan(plan: CampaignPlan, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(plan_to_dict(plan), fh)
        fh.write("\n")


def load_plan(path) -> CampaignPlan:
    try:
        with open(path, encoding="utf-8") as fh:
            return plan_from_dict(json.load(fh))
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{os.fspath(path)}: malformed plan file ({exc})") from None
