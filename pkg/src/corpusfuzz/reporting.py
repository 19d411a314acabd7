"""Campaign tallies, rendered reports and failing-suite collection."""

from __future__ import annotations

import json
import logging
import math
import os
import shutil
from dataclasses import asdict, dataclass, fields
from typing import Iterable

from .exceptions import ValidationError
from .harness.classify import FailureClass
from .harness.trial import TrialRecord

log = logging.getLogger(__name__)

SUMMARY_FORMAT = "corpusfuzz-summary/1"
MANIFEST_FORMAT = "corpusfuzz-failing-suite/1"

_COLUMN_OF = {
    FailureClass.CRASH_O0_ONLY: "c0",
    FailureClass.CRASH_O3_ONLY: "c3",
    FailureClass.CRASH_BOTH: "c03",
    FailureClass.TIMEOUT_O0_ONLY: "t0",
    FailureClass.TIMEOUT_O3_ONLY: "t3",
    FailureClass.TIMEOUT_BOTH: "t03",
    FailureClass.MISCOMPILATION: "mc",
    FailureClass.PASS: "passes",
    FailureClass.EXEC_INCONCLUSIVE: "inconclusive",
}
# (attribute, table heading)
COLUMNS = [
    ("c0", "C0"), ("c3", "C3"), ("c03", "C03"),
    ("t0", "T0"), ("t3", "T3"), ("t03", "T03"),
    ("mc", "MC"), ("passes", "PASS"), ("inconclusive", "INC"), ("skipped", "SKIP"),
    ("total", "TOTAL"),
]


@dataclass
class CampaignSummary:
    strategy: str = ""
    c0: int = 0
    c3: int = 0
    c03: int = 0
    t0: int = 0
    t3: int = 0
    t03: int = 0
    mc: int = 0
    passes: int = 0
    inconclusive: int = 0
    skipped: int = 0
    total: int = 0

    @property
    def differential_failures(self) -> int:
        # both-level crashes are tallied but are not differential failures
        return self.c0 + self.c3 + self.mc

    def check_partition(self) -> None:
        parts = sum(getattr(self, a) for a, _ in COLUMNS if a != "total")
        if parts != self.total:
            raise AssertionError(f"columns sum to {parts}, total is {self.total}")
        if any(getattr(self, a) < 0 for a, _ in COLUMNS):
            raise AssertionError("negative count")


def _as_record(item) -> TrialRecord:
    if isinstance(item, TrialRecord):
        return item
    if isinstance(item, dict):
        return TrialRecord.from_dict(item)
    if isinstance(item, (str, bytes)):
        return TrialRecord.from_json(item)
    raise ValidationError(f"not a trial record: {type(item).__name__}")


def tally(records: Iterable, strategy: str = "") -> CampaignSummary:
    """Single pass over records (objects, dicts or JSON lines).

    Anything that does not parse as a record counts as skipped.
    """
    s = CampaignSummary(strategy=strategy)
    for item in records:
        s.total += 1
        try:
            rec = _as_record(item)
        except (ValueError, KeyError, TypeError) as exc:
            log.warning("malformed trial record counted as skipped: %s", exc)
            s.skipped += 1
            continue
        if rec.failure_class is None:
            s.skipped += 1
        else:
            col = _COLUMN_OF[rec.failure_class]
            setattr(s, col, getattr(s, col) + 1)
    return s


def compact_row(s: CampaignSummary) -> str:
    return " ".join(f"{h}={getattr(s, a)}" for a, h in COLUMNS[:7])


def render_table(summaries: list[CampaignSummary], averaged: dict | None = None) -> str:
    heads = ["Setting"] + [h for _, h in COLUMNS]
    rows = [[s.strategy or "-"] + [str(getattr(s, a)) for a, _ in COLUMNS] for s in summaries]
    if averaged is not None:
        rows.append([f"{averaged['strategy'] or '-'} (avg of {averaged['runs']})"]
                    + [str(averaged[a]) for a, _ in COLUMNS])
    widths = [max(len(r[i]) for r in [heads] + rows) for i in range(len(heads))]

    def line(cells):
        return "| " + " | ".join(c.rjust(w) if i else c.ljust(w) for i, (c, w) in enumerate(zip(cells, widths))) + " |"

    out = [line(heads), "|" + "|".join("-" * (w + 2) for w in widths) + "|"]
    out += [line(r) for r in rows]
    for s in summaries:
        verdict = "found differential failures" if s.differential_failures else "no differential failures"
        out.append(f"{s.strategy or '-'}: {compact_row(s)}")
        out.append(f"  differential failures (C0+C3+MC): {s.differential_failures} ({verdict})")
    return "\n".join(out) + "\n"


def render_machine(summary: CampaignSummary) -> str:
    doc = {"format": SUMMARY_FORMAT, **asdict(summary)}
    return json.dumps(doc, sort_keys=True, indent=1) + "\n"


def parse_machine(text: str) -> CampaignSummary:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"malformed summary document: {exc}") from None
    if doc.get("format") != SUMMARY_FORMAT:
        raise ValidationError(f"not a summary document (format={doc.get('format')!r})")
    names = {f.name for f in fields(CampaignSummary)}
    return CampaignSummary(**{k: v for k, v in doc.items() if k in names})


def report(summary: CampaignSummary, format: str = "table") -> str:
    if format == "table":
        return render_table([summary])
    if format == "machine":
        return render_machine(summary)
    raise ValidationError(f"unknown report format {format!r} (table or machine)")


def average_summaries(summaries: list[CampaignSummary]) -> dict:
    """Per-column mean over runs, rounded half up to the nearest integer."""
    if not summaries:
        raise ValidationError("nothing to average")
    strategies = {s.strategy for s in summaries}
    out = {"strategy": strategies.pop() if len(strategies) == 1 else "mixed", "runs": len(summaries)}
    for a, _ in COLUMNS:
        mean = sum(getattr(s, a) for s in summaries) / len(summaries)
        out[a] = int(math.floor(mean + 0.5))
    return out


def collect_failing_suite(records: Iterable, outdir, source_root, catalog=None) -> dict:
    """Copy every failing trial's program into ``outdir`` with a manifest.

    Passing, inconclusive and skipped trials are left out.  ``source_root``
    is the directory record program paths are relative to.  A program that
    was not retained is listed with status ``"unrecoverable"``.
    """
    from .planner import render_flags

    os.makedirs(outdir, exist_ok=True)
    entries = []
    for item in records:
        try:
            rec = _as_record(item)
        except (ValueError, KeyError, TypeError):
            continue
        if rec.failure_class in (None, FailureClass.PASS, FailureClass.EXEC_INCONCLUSIVE):
            continue
        name = f"trial-{rec.trial_index:06d}.c"
        entry = {
            "program": name,
            "trial_index": rec.trial_index,
            "failure_class": rec.failure_class.value,
            "generator_seed": rec.config.generator_seed,
            "config": rec.config.to_dict(),
            "status": "ok",
        }
        if catalog is not None and len(catalog) == len(rec.config.decisions):
            entry["flags"] = render_flags(rec.config, catalog)
        src = os.path.join(os.fspath(source_root), rec.program_path) if rec.program_path else None
        if src and os.path.isfile(src):
            shutil.copyfile(src, os.path.join(outdir, name))
        else:
            entry["status"] = "unrecoverable"
            entry["program"] = None
        entries.append(entry)
    entries.sort(key=lambda e: e["trial_index"])
    manifest = {"format": MANIFEST_FORMAT, "entries": entries}
    with open(os.path.join(outdir, "manifest.json"), "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=1, sort_keys=True)
        fh.write("\n")
    return manifest
