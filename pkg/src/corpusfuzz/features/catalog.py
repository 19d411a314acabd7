"""Feature catalog: the ordered set of generator-controllable features."""

from __future__ import annotations

import os
from dataclasses import dataclass
from importlib import resources

from ..exceptions import CatalogParseError, ValidationError

UNDETECTABLE = "undetectable"
DEFAULT_CATALOG = "builtin"


@dataclass(frozen=True)
class FeatureSpec:
    """One configurable feature and how to spot it in source.

    Parameters
    ----------
    name : str
        Feature identifier, e.g. ``"volatiles"``.
    enable_flag, disable_flag : str
        Generator options that include / exclude the feature.
    detector : str
        Name of a rule in :data:`corpusfuzz.features.detectors.DETECTORS`,
        or ``"undetectable"``.
    """

    name: str
    enable_flag: str
    disable_flag: str
    detector: str = UNDETECTABLE

    @property
    def detectable(self) -> bool:
        return self.detector != UNDETECTABLE


@dataclass(frozen=True)
class FeatureCatalog:
    features: tuple[FeatureSpec, ...]
    version: str = "unversioned"

    def __post_init__(self):
        object.__setattr__(self, "features", tuple(self.features))
        validate_catalog(self)

    def __len__(self):
        return len(self.features)

    def __iter__(self):
        return iter(self.features)

    def __getitem__(self, i):
        return self.features[i]

    @property
    def names(self) -> list[str]:
        return [f.name for f in self.features]

    def index(self, name: str) -> int:
        for i, f in enumerate(self.features):
            if f.name == name:
                return i
        raise KeyError(name)


def validate_catalog(catalog: FeatureCatalog) -> None:
    # imported lazily: detectors imports this module for UNDETECTABLE
    from .detectors import DETECTORS

    if not catalog.features:
        raise ValidationError("catalog has no features; clustering needs at least one dimension")
    seen = set()
    for spec in catalog.features:
        if not spec.name or not spec.name.strip():
            raise ValidationError("feature name must be non-empty")
        if spec.name in seen:
            raise ValidationError(f"duplicate feature name {spec.name!r}")
        seen.add(spec.name)
        if not spec.enable_flag or not spec.disable_flag:
            raise ValidationError(f"feature {spec.name!r} needs both an enable and a disable flag")
        if spec.enable_flag == spec.disable_flag:
            raise ValidationError(
                f"feature {spec.name!r}: enable and disable flags are identical ({spec.enable_flag!r})"
            )
        if spec.detector != UNDETECTABLE and spec.detector not in DETECTORS:
            raise ValidationError(f"feature {spec.name!r}: unknown detection rule {spec.detector!r}")


def parse_catalog(text: str, path: str | None = None) -> FeatureCatalog:
    """Parse the line-oriented catalog format.

    Blank lines and ``#`` comments are ignored.  ``@version <tag>`` sets the
    catalog version.  Every other line holds four whitespace-separated
    fields: name, enable flag, disable flag, detection rule.
    """
    version = "unversioned"
    specs = []
    names: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("@"):
            directive, _, value = line.partition(" ")
            if directive != "@version" or not value.strip():
                raise CatalogParseError(f"unknown or empty directive {line!r}", lineno, path)
            version = value.strip()
            continue
        fields = line.split()
        if len(fields) != 4:
            raise CatalogParseError(
                f"expected 4 fields (name enable disable detector), got {len(fields)}", lineno, path
            )
        name = fields[0]
        if name in names:
            raise CatalogParseError(
                f"duplicate feature name {name!r} (first defined on line {names[name]})", lineno, path
            )
        names[name] = lineno
        specs.append(FeatureSpec(*fields))
    if not specs:
        raise ValidationError(f"{path or 'catalog'}: feature list is empty")
    try:
        return FeatureCatalog(tuple(specs), version)
    except CatalogParseError:
        raise
    except ValidationError as exc:
        raise ValidationError(f"{path or 'catalog'}: {exc}") from None


def load_catalog(path: str | os.PathLike | None = None) -> FeatureCatalog:
    """Load a catalog file; ``None`` or ``"builtin"`` gives the bundled one."""
    if path is None or str(path) == DEFAULT_CATALOG:
        text = resources.files("corpusfuzz.data").joinpath("default.cat").read_text("utf-8")
        return parse_catalog(text, "<builtin>")
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except UnicodeDecodeError as exc:
        raise CatalogParseError(f"not a text file ({exc.reason})", None, os.fspath(path)) from None
    return parse_catalog(text, os.fspath(path))


def format_catalog(catalog: FeatureCatalog) -> str:
    lines = [f"@version {catalog.version}"]
    for f in catalog:
        lines.append(f"{f.name} {f.enable_flag} {f.disable_flag} {f.detector}")
    return "\n".join(lines) + "\n"


def default_catalog() -> FeatureCatalog:
    return load_catalog(None)
