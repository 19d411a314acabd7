"""Toolchain description and validation."""

from __future__ import annotations

import os
import shutil
from dataclasses import dataclass

from ..exceptions import ToolchainError, ValidationError


@dataclass(frozen=True)
class Toolchain:
    """Generator and compiler commands plus the differential settings.

    ``generator_cmd`` and ``compiler_cmd`` are argv prefixes: an executable
    followed by fixed arguments.  ``compiler_args`` (include paths, -std)
    go between the optimization flag and the source file.
    """

    generator_cmd: tuple[str, ...]
    compiler_cmd: tuple[str, ...]
    compiler_args: tuple[str, ...] = ()
    opt_low: str = "-O0"
    opt_high: str = "-O3"
    compile_timeout: float = 10.0
    exec_timeout: float = 10.0
    generator_timeout: float = 60.0

    def __post_init__(self):
        for name in ("generator_cmd", "compiler_cmd", "compiler_args"):
            value = getattr(self, name)
            if isinstance(value, str):
                value = (value,)
            object.__setattr__(self, name, tuple(str(v) for v in value))
        if not self.generator_cmd:
            raise ValidationError("toolchain.generator_cmd is empty")
        if not self.compiler_cmd:
            raise ValidationError("toolchain.compiler_cmd is empty")
        for name in ("compile_timeout", "exec_timeout", "generator_timeout"):
            if not getattr(self, name) > 0:
                raise ValidationError(f"toolchain.{name} must be positive, got {getattr(self, name)}")
        if self.opt_low == self.opt_high:
            raise ValidationError(f"toolchain.opt_low and opt_high are both {self.opt_low!r}")

    def to_dict(self) -> dict:
        return {
            "generator_cmd": list(self.generator_cmd),
            "compiler_cmd": list(self.compiler_cmd),
            "compiler_args": list(self.compiler_args),
            "opt_low": self.opt_low,
            "opt_high": self.opt_high,
            "compile_timeout": self.compile_timeout,
            "exec_timeout": self.exec_timeout,
            "generator_timeout": self.generator_timeout,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Toolchain":
        known = {"generator_cmd", "compiler_cmd", "compiler_args", "opt_low", "opt_high",
                 "compile_timeout", "exec_timeout", "generator_timeout"}
        unknown = set(d) - known
        if unknown:
            raise ValidationError(f"toolchain: unknown field(s) {', '.join(sorted(unknown))}")
        if "generator_cmd" not in d or "compiler_cmd" not in d:
            raise ValidationError("toolchain needs generator_cmd and compiler_cmd")
        return cls(**d)


def resolve_executable(argv0: str) -> str | None:
    if os.sep in argv0:
        return argv0 if os.path.isfile(argv0) and os.access(argv0, os.X_OK) else None
    return shutil.which(argv0)


def validate_toolchain(tc: Toolchain) -> None:
    """Raise ToolchainError if either executable cannot be found."""
    for role, cmd in (("generator", tc.generator_cmd), ("compiler", tc.compiler_cmd)):
        if resolve_executable(cmd[0]) is None:
            raise ToolchainError(f"{role} executable not found or not executable: {cmd[0]!r}")
