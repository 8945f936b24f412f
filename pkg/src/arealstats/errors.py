"""Exception hierarchy shared across the package."""


class ArealStatsError(Exception):
    """Base class for every error raised by arealstats."""


class InvalidGeometryError(ArealStatsError, ValueError):
    pass


class InsufficientPointsError(ArealStatsError, ValueError):
    pass


class DomainError(ArealStatsError, ValueError):
    """An input lies outside the region or range an operation is defined on."""


class DegenerateWeightError(ArealStatsError, ArithmeticError):
    """An edge-correction weight of zero was required (its inverse is undefined)."""


class DegenerateWindowError(ArealStatsError, ValueError):
    pass


class InvalidRadiusGridError(ArealStatsError, ValueError):
    pass


class SamplingInefficiencyError(ArealStatsError, RuntimeError):
    pass


class InsufficientSampleError(ArealStatsError, ValueError):
    pass


class LoadError(ArealStatsError, ValueError):
    pass


class ContractViolationError(ArealStatsError, ValueError):
    pass


class RenderError(ArealStatsError, ValueError):
    pass


class ReplicateError(ArealStatsError, RuntimeError):
    """A simulation replicate failed; carries the replicate index and the cause."""

    def __init__(self, index, cause):
        super().__init__(f"replicate {index} failed: {cause!r}")
        self.index = index
        self.cause = cause
