"""Exception types shared across the package."""


class HypercrossError(Exception):
    """Base class for all package-specific errors."""


class NearSingular(HypercrossError):
    """A linear system of hyperplanes is too close to degenerate to solve."""


class Degenerate(HypercrossError):
    """Input point set is not affinely full-dimensional."""


class OriginNotInterior(HypercrossError):
    """Polar duality requested for a polytope that does not contain the origin."""


class Unbounded(HypercrossError):
    """A cell construction failed to close up within the allowed radius doublings."""


class TupleBudgetExceeded(HypercrossError):
    """The number of d-subsets to enumerate exceeds the configured cap."""


class DomainError(HypercrossError, ValueError):
    """An argument is outside the mathematical domain of the operation."""


class TooFewSamples(HypercrossError, ValueError):
    """A statistical routine was called with fewer samples than it supports."""


class DegenerateCategories(HypercrossError, ValueError):
    """Not enough distinct categories remain after merging small cells."""


class BinMismatch(HypercrossError, ValueError):
    """Histogram bins do not match the supplied model masses."""


class ConfigError(HypercrossError, ValueError):
    """Invalid experiment or CLI configuration."""


class UnsupportedDimension(HypercrossError, ValueError):
    """The operation is only implemented for specific ambient dimensions."""
