"""In-tree mock toolchain: a deterministic generator and a scenario-driven compiler.

Both shims are POSIX shell scripts so that a trial costs a few
milliseconds; they let the whole pipeline run without Csmith or GCC.
See ``mockcc.sh`` for the scenario rule format.
"""

from __future__ import annotations

import os
from importlib import resources

from ..exceptions import ValidationError
from ..harness.toolchain import Toolchain
from .corpus import write_synthetic_corpus

SHELL = "/bin/sh"


def _data_path(*parts: str) -> str:
    return os.fspath(resources.files("corpusfuzz.mock").joinpath(*parts))


def scenario_names() -> list[str]:
    folder = resources.files("corpusfuzz.mock").joinpath("scenarios")
    return sorted(p.name[:-4] for p in folder.iterdir() if p.name.endswith(".scn"))


def scenario_path(scenario: str) -> str:
    """Resolve a bundled scenario name or a path to a scenario file."""
    if os.path.sep in scenario or scenario.endswith(".scn"):
        if not os.path.isfile(scenario):
            raise ValidationError(f"scenario file {scenario!r} does not exist")
        return os.path.abspath(scenario)
    if scenario not in scenario_names():
        raise ValidationError(
            f"unknown mock scenario {scenario!r} (bundled: {', '.join(scenario_names())})"
        )
    return _data_path("scenarios", f"{scenario}.scn")


def mock_toolchain(scenario: str = "always-ok", **overrides) -> Toolchain:
    """Toolchain wired to the shell shims and the given scenario."""
    fields = dict(
        generator_cmd=(SHELL, _data_path("mockgen.sh")),
        compiler_cmd=(SHELL, _data_path("mockcc.sh"), "--scenario", scenario_path(scenario)),
    )
    fields.update(overrides)
    return Toolchain(**fields)


__all__ = ["mock_toolchain", "scenario_names", "scenario_path", "write_synthetic_corpus"]
