"""Trial execution: generation, two-level compilation, execution, triage."""

from .classify import FailureClass, StageKind, StageResult, classify, digest
from .toolchain import Toolchain, validate_toolchain
from .trial import TrialRecord, compile_program, execute, generate_program, run_trial, trial_dirname

__all__ = [
    "FailureClass",
    "StageKind",
    "StageResult",
    "Toolchain",
    "TrialRecord",
    "classify",
    "compile_program",
    "digest",
    "execute",
    "generate_program",
    "run_trial",
    "trial_dirname",
    "validate_toolchain",
]
