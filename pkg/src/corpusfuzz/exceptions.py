"""Exception hierarchy shared across the package."""


class CorpusFuzzError(Exception):
    """Base class for all errors raised by corpusfuzz."""


class ValidationError(CorpusFuzzError, ValueError):
    """Input violates a documented invariant."""


class CatalogParseError(ValidationError):
    """A catalog file could not be parsed."""

    def __init__(self, message, line=None, path=None):
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}:"
        if line is not None:
            where += f"{line}: "
        elif where:
            where += " "
        super().__init__(f"{where}{message}")


class ExtractionError(CorpusFuzzError):
    """Source could not be treated as C text (e.g. binary content)."""


class UndefinedVarianceError(ValidationError):
    """BIC requested for a subset with no more points than clusters."""


class ToolchainError(CorpusFuzzError):
    """The configured toolchain is unusable (missing executable, bad flags)."""


class GenerationError(CorpusFuzzError):
    """The test generator failed to produce a program for a trial."""
