"""One differential-testing trial: generate, compile twice, run twice, classify."""

from __future__ import annotations

import json
import logging
import os
import shutil
from dataclasses import dataclass

from ..exceptions import GenerationError, ToolchainError, ValidationError
from ..features.catalog import FeatureCatalog
from ..planner import GeneratorConfig, render_flags
from . import process
from .classify import FailureClass, StageKind, StageResult, classify, digest, signal_name
from .toolchain import Toolchain

log = logging.getLogger(__name__)

RECORD_SCHEMA = 1
PROGRAM_NAME = "program.c"
_DETAIL_LIMIT = 300


def trial_dirname(trial_index: int) -> str:
    return f"trial-{trial_index:06d}"


def _tail(data: bytes) -> str:
    text = data.decode("utf-8", "backslashreplace").strip()
    return text[-_DETAIL_LIMIT:]


def generate_program(config: GeneratorConfig, toolchain: Toolchain, workdir,
                     catalog: FeatureCatalog) -> str:
    """Run the generator for ``config``; return the path of the new source."""
    trial_dir = os.path.join(os.fspath(workdir), trial_dirname(config.trial_index))
    os.makedirs(trial_dir, exist_ok=True)
    path = os.path.join(trial_dir, PROGRAM_NAME)
    argv = [*toolchain.generator_cmd, *render_flags(config, catalog), "-o", path]
    try:
        out = process.run(argv, toolchain.generator_timeout, cwd=trial_dir)
    except OSError as exc:
        raise GenerationError(f"cannot run generator {toolchain.generator_cmd[0]!r}: {exc.strerror}") from None
    if out.timed_out:
        raise GenerationError(f"generator {toolchain.generator_cmd[0]!r} timed out")
    if out.returncode != 0:
        raise GenerationError(
            f"generator {toolchain.generator_cmd[0]!r} exited with {out.returncode}: {_tail(out.stderr)}"
        )
    if not os.path.exists(path) and out.stdout:
        with open(path, "wb") as fh:
            fh.write(out.stdout)
    if not os.path.exists(path) or os.path.getsize(path) == 0:
        raise GenerationError(f"generator {toolchain.generator_cmd[0]!r} produced no program")
    return path


def compile_program(program, opt_flag: str, toolchain: Toolchain, binary=None) -> StageResult:
    program = os.fspath(program)
    if not os.path.exists(program):
        raise ValidationError(f"program {program!r} does not exist")
    binary = binary or os.path.splitext(program)[0] + opt_flag.replace("-", "_") + ".bin"
    if os.path.exists(binary):
        os.unlink(binary)
    argv = [*toolchain.compiler_cmd, opt_flag, *toolchain.compiler_args, program, "-o", binary]
    try:
        out = process.run(argv, toolchain.compile_timeout, cwd=os.path.dirname(program) or None)
    except OSError as exc:
        raise ToolchainError(f"cannot run compiler {toolchain.compiler_cmd[0]!r}: {exc.strerror}") from None
    if out.timed_out:
        return StageResult(StageKind.TIMEOUT, None, digest(b""), out.wall_time,
                           f"killed after {toolchain.compile_timeout:g}s")
    if out.signal is not None:
        return StageResult(StageKind.CRASH, signal_name(out.signal), digest(out.stdout),
                           out.wall_time, _tail(out.stderr))
    if out.returncode != 0:
        return StageResult(StageKind.CRASH, out.returncode, digest(out.stdout), out.wall_time,
                           _tail(out.stderr))
    if not os.path.exists(binary):
        return StageResult(StageKind.CRASH, 0, digest(out.stdout), out.wall_time,
                           "compiler exited 0 without producing a binary")
    return StageResult(StageKind.OK, 0, digest(out.stdout), out.wall_time, "")


def execute(binary, toolchain: Toolchain) -> StageResult:
    binary = os.fspath(binary)
    try:
        out = process.run([os.path.abspath(binary)], toolchain.exec_timeout,
                          cwd=os.path.dirname(os.path.abspath(binary)))
    except OSError as exc:
        return StageResult(StageKind.CRASH, None, digest(b""), 0.0, f"cannot execute: {exc.strerror}")
    if out.timed_out:
        return StageResult(StageKind.TIMEOUT, None, digest(out.stdout), out.wall_time,
                           f"killed after {toolchain.exec_timeout:g}s")
    if out.signal is not None:
        return StageResult(StageKind.CRASH, signal_name(out.signal), digest(out.stdout),
                           out.wall_time, "")
    return StageResult(StageKind.OK, out.returncode, digest(out.stdout), out.wall_time, "")


@dataclass(frozen=True)
class TrialRecord:
    trial_index: int
    config: GeneratorConfig
    program_path: str | None
    compile_low: StageResult | None = None
    compile_high: StageResult | None = None
    exec_low: StageResult | None = None
    exec_high: StageResult | None = None
    failure_class: FailureClass | None = None
    skip_reason: str | None = None

    @property
    def skipped(self) -> bool:
        return self.failure_class is None

    def recompute_class(self) -> FailureClass:
        return classify(self.compile_low, self.compile_high, self.exec_low, self.exec_high)

    def to_dict(self) -> dict:
        def stage(s):
            return None if s is None else s.to_dict()

        return {
            "schema": RECORD_SCHEMA,
            "trial_index": self.trial_index,
            "config": self.config.to_dict(),
            "program_path": self.program_path,
            "compile_low": stage(self.compile_low),
            "compile_high": stage(self.compile_high),
            "exec_low": stage(self.exec_low),
            "exec_high": stage(self.exec_high),
            "failure_class": None if self.failure_class is None else self.failure_class.value,
            "skip_reason": self.skip_reason,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_dict(cls, d: dict) -> "TrialRecord":
        if d.get("schema") != RECORD_SCHEMA:
            raise ValidationError(f"unsupported record schema {d.get('schema')!r}")

        def stage(key):
            return None if d.get(key) is None else StageResult.from_dict(d[key])

        fc = d.get("failure_class")
        return cls(
            trial_index=int(d["trial_index"]),
            config=GeneratorConfig.from_dict(d["config"]),
            program_path=d.get("program_path"),
            compile_low=stage("compile_low"),
            compile_high=stage("compile_high"),
            exec_low=stage("exec_low"),
            exec_high=stage("exec_high"),
            failure_class=None if fc is None else FailureClass(fc),
            skip_reason=d.get("skip_reason"),
        )

    @classmethod
    def from_json(cls, line: str) -> "TrialRecord":
        return cls.from_dict(json.loads(line))


def run_trial(config: GeneratorConfig, toolchain: Toolchain, workdir, catalog: FeatureCatalog,
              keep_all: bool = False) -> TrialRecord:
    """Run one trial inside ``workdir/trial-<index>/`` and persist its record.

    Program paths in the record are relative to ``workdir``.  Binaries of
    passing trials are removed (and the source too unless ``keep_all``);
    everything is kept for every other outcome.
    """
    workdir = os.fspath(workdir)
    trial_dir = os.path.join(workdir, trial_dirname(config.trial_index))
    if os.path.isdir(trial_dir):
        shutil.rmtree(trial_dir)
    os.makedirs(trial_dir)
    try:
        program = generate_program(config, toolchain, workdir, catalog)
    except GenerationError as exc:
        log.warning("trial %d skipped: %s", config.trial_index, exc)
        record = TrialRecord(config.trial_index, config, None, skip_reason=str(exc))
        _persist(record, trial_dir)
        return record

    bins = {}
    results = {}
    for level, flag in (("low", toolchain.opt_low), ("high", toolchain.opt_high)):
        bins[level] = os.path.join(trial_dir, f"{level}.bin")
        results[f"compile_{level}"] = compile_program(program, flag, toolchain, bins[level])
    for level in ("low", "high"):
        ok = results[f"compile_{level}"].kind is StageKind.OK
        results[f"exec_{level}"] = execute(bins[level], toolchain) if ok else None
    fclass = classify(results["compile_low"], results["compile_high"],
                      results["exec_low"], results["exec_high"])

    if fclass is FailureClass.PASS:
        for b in bins.values():
            if os.path.exists(b):
                os.unlink(b)
        if not keep_all:
            os.unlink(program)

    record = TrialRecord(
        trial_index=config.trial_index,
        config=config,
        program_path=os.path.relpath(program, workdir),
        failure_class=fclass,
        **results,
    )
    _persist(record, trial_dir)
    return record


def _persist(record: TrialRecord, trial_dir: str) -> None:
    with open(os.path.join(trial_dir, "record.json"), "w", encoding="utf-8") as fh:
        fh.write(record.to_json() + "\n")
