"""Stage results and the differential failure classification."""

from __future__ import annotations

import hashlib
import signal as _signal
from dataclasses import dataclass
from enum import Enum

from ..exceptions import ValidationError


class StageKind(str, Enum):
    OK = "ok"
    CRASH = "crash"
    TIMEOUT = "timeout"


class FailureClass(str, Enum):
    PASS = "pass"
    CRASH_O0_ONLY = "crash_o0_only"
    CRASH_O3_ONLY = "crash_o3_only"
    CRASH_BOTH = "crash_both"
    TIMEOUT_O0_ONLY = "timeout_o0_only"
    TIMEOUT_O3_ONLY = "timeout_o3_only"
    TIMEOUT_BOTH = "timeout_both"
    MISCOMPILATION = "miscompilation"
    EXEC_INCONCLUSIVE = "exec_inconclusive"

    @property
    def is_differential_failure(self) -> bool:
        """Whether the low/high comparison itself exposes a compiler bug."""
        return self in (FailureClass.CRASH_O0_ONLY, FailureClass.CRASH_O3_ONLY,
                        FailureClass.MISCOMPILATION)


def signal_name(signum: int) -> str:
    try:
        return _signal.Signals(signum).name
    except ValueError:
        return f"SIG{signum}"


def digest(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


@dataclass(frozen=True)
class StageResult:
    """Outcome of one compile or execute step.

    ``exit_status`` is the integer exit code, or a signal name such as
    ``"SIGABRT"`` when the process was killed by a signal; ``None`` after a
    timeout.
    """

    kind: StageKind
    exit_status: int | str | None = 0
    stdout_digest: str = digest(b"")
    wall_time: float = 0.0
    detail: str = ""

    def __post_init__(self):
        object.__setattr__(self, "kind", StageKind(self.kind))
        # microsecond resolution, so records compare equal after a JSON round trip
        object.__setattr__(self, "wall_time", round(float(self.wall_time), 6))

    def same_behaviour(self, other: "StageResult") -> bool:
        return self.stdout_digest == other.stdout_digest and self.exit_status == other.exit_status

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "exit_status": self.exit_status,
            "stdout_digest": self.stdout_digest,
            "wall_time": self.wall_time,
            "detail": self.detail,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "StageResult":
        return cls(d["kind"], d.get("exit_status"), d.get("stdout_digest", digest(b"")),
                   float(d.get("wall_time", 0.0)), d.get("detail", ""))


def classify(compile_low: StageResult, compile_high: StageResult,
             exec_low: StageResult | None, exec_high: StageResult | None) -> FailureClass:
    """Total mapping from stage results to a failure class.

    Compile outcomes decide first, crash taking precedence over timeout.
    Only when both levels compiled do the executions matter: any run that
    crashed or hung makes the trial inconclusive, otherwise differing
    (stdout, exit status) is a miscompilation.
    """
    for level, comp, run in (("low", compile_low, exec_low), ("high", compile_high, exec_high)):
        if (comp.kind is StageKind.OK) != (run is not None):
            raise ValidationError(
                f"{level} execution result must be present exactly when the {level} compile succeeded"
            )
    lo, hi = compile_low.kind, compile_high.kind
    C, T = StageKind.CRASH, StageKind.TIMEOUT
    if lo is C and hi is C:
        return FailureClass.CRASH_BOTH
    if lo is C:
        return FailureClass.CRASH_O0_ONLY
    if hi is C:
        return FailureClass.CRASH_O3_ONLY
    if lo is T and hi is T:
        return FailureClass.TIMEOUT_BOTH
    if lo is T:
        return FailureClass.TIMEOUT_O0_ONLY
    if hi is T:
        return FailureClass.TIMEOUT_O3_ONLY
    if exec_low.kind is not StageKind.OK or exec_high.kind is not StageKind.OK:
        return FailureClass.EXEC_INCONCLUSIVE
    if exec_low.same_behaviour(exec_high):
        return FailureClass.PASS
    return FailureClass.MISCOMPILATION
