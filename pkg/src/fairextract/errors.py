"""Exception hierarchy shared across the package."""


class FairExtractError(Exception):
    """Base class for all package errors."""


class DimensionError(FairExtractError, ValueError):
    """Classifiers from different universes were combined."""


class EmptyMergeError(FairExtractError, ValueError):
    """A merge was requested over an empty set of classifiers."""


class DomainError(FairExtractError, ValueError):
    """An argument lies outside the domain of an operation."""


class SpecError(FairExtractError, ValueError):
    """An oracle specification is malformed."""


class SpecInconsistencyError(SpecError):
    """Forced flip rejection contradicts what the strong oracle accepts."""


class GenerationError(FairExtractError, RuntimeError):
    """Instance generation failed; ``constraint`` names the binding clause."""

    def __init__(self, message: str, constraint: str):
        super().__init__(message)
        self.constraint = constraint


class ResourceError(FairExtractError, RuntimeError):
    """An exhaustive enumeration would exceed the configured budget."""

    def __init__(self, message: str, required: int):
        super().__init__(message)
        self.required = required


class DegenerateOrbitError(FairExtractError, RuntimeError):
    """Both merge candidates for one output index are absent."""

    def __init__(self, message: str, index: int):
        super().__init__(message)
        self.index = index


class ConsistencyError(FairExtractError, ValueError):
    """A threshold stack is not monotone."""
