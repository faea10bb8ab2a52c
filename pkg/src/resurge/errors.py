"""Exception hierarchy.

Every failure raised on purpose by the library derives from ResurgeError.
The CLI maps ``ConfigError`` subclasses to exit code 2 and
``ConvergenceError`` subclasses to exit code 3.
"""


class ResurgeError(Exception):
    pass


class ConfigError(ResurgeError):
    """Invalid input data (germ, path, configuration)."""


class ConvergenceError(ResurgeError):
    """A numerical procedure could not reach its target."""


class InternalError(ResurgeError):
    """A self-check failed; this points at a bug, not at bad input."""


# germs
class NotSimpleParabolic(ConfigError):
    pass


class NotRational(ConfigError):
    pass


# series
class TruncationOverflow(ConvergenceError):
    pass


class NonUnitLeadingTerm(ConfigError):
    pass


class ValTooLow(ConfigError):
    pass


class ZeroDivisor(ConfigError):
    pass


class InternalInconsistency(InternalError):
    pass


class OrderGainViolated(InternalError):
    pass


class ValCheckFailed(InternalError):
    pass


# Borel plane
class PoleOfGamma(ConfigError):
    pass


class InsufficientTerms(ConvergenceError):
    pass


class PrecisionBudgetExceeded(ConvergenceError):
    pass


class PathThroughOrigin(ConfigError):
    pass


class PathTooCloseToLattice(ConfigError):
    pass


class DivergentLaplace(ConfigError):
    pass


# residua
class ConvergenceNotDetected(ConvergenceError):
    pass


class QuadratureStalled(ConvergenceError):
    pass


class TailNotBounded(ConvergenceError):
    pass


class EndpointOnLattice(ConfigError):
    pass


class LoopTooClose(ConfigError):
    pass


# horn maps
class OrbitEscapesDomain(ConvergenceError):
    pass


class NoAsymptoticRegime(ConvergenceError):
    pass


class NewtonDiverged(ConvergenceError):
    pass


class NoiseFloorDominates(ConvergenceError):
    pass
