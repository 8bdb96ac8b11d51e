"""Exception and warning types shared across the package."""


class CoherthermError(Exception):
    """Base class for numerical errors raised by this package."""


# dynamics
class NonFiniteState(CoherthermError):
    pass


class NoTrajectoryFound(CoherthermError):
    pass


class CausticAtEndpoint(CoherthermError):
    pass


# semiclassics
class EmptyTrajectorySet(CoherthermError):
    pass


class CausticContribution(CoherthermError):
    pass


# oracle
class BoundaryLeak(CoherthermError):
    pass


class GridMismatch(CoherthermError):
    pass


# fluctuation
class DegenerateDenominator(CoherthermError):
    pass


class FitDiverged(CoherthermError):
    pass


class EmptyRegion(CoherthermError):
    pass


class NotAState(CoherthermError):
    pass


# purification
class AncillaTooSmall(CoherthermError):
    pass


class LengthMismatch(CoherthermError):
    pass


class DimensionMismatch(CoherthermError):
    pass


class TargetNotNormalized(CoherthermError):
    pass


class GridTooLarge(CoherthermError):
    pass


class NotUnitary(CoherthermError):
    pass


# opensystem
class NotHermitian(CoherthermError):
    pass


class StabilityViolation(CoherthermError):
    pass


class PositivityLoss(CoherthermError):
    pass


class AsymmetricCouplings(CoherthermError):
    pass


class CutoffTooSmall(CoherthermError):
    pass


class WindowTooCoarse(UserWarning):
    """Adjacent momentum seeds bracketed more than one root."""


class NoTrajectoryWarning(UserWarning):
    """A trajectory census came back empty for every endpoint pair."""
