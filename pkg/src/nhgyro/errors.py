"""Exception hierarchy shared by all modules."""


class NonholonomicError(Exception):
    """Base class for every error raised by nhgyro."""


class SingularChart(NonholonomicError):
    """The point lies outside the admitted region of the coordinate chart."""


class LinearSolveFailure(NonholonomicError):
    """A frame or metric block is numerically singular."""


class StepTooSmall(NonholonomicError):
    """A finite-difference step underflows relative to the evaluation point."""


class NonpositiveFactor(NonholonomicError):
    """A conformal factor was not strictly positive where it was sampled."""


class StepRejectionLimit(NonholonomicError):
    """The adaptive integrator could not find an acceptable step."""


class InvalidParams(NonholonomicError):
    """Physical parameters violate a model invariant."""


class OffSphere(NonholonomicError):
    """A Poisson vector does not have unit norm."""


class PoleSingular(NonholonomicError):
    """A Poisson vector sits at a pole of the Euler-angle chart."""


class DegenerateDenominator(NonholonomicError):
    """The Chaplygin denominator 1 - m r^2 (A Gamma).Gamma is not positive."""


class ChartExit(NonholonomicError):
    """A trajectory left the chart; ``trajectory`` holds the part computed so far."""

    def __init__(self, message, trajectory=None):
        super().__init__(message)
        self.trajectory = trajectory
