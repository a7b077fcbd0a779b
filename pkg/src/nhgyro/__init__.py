"""Almost-Poisson brackets for nonholonomic systems with gyroscopic terms."""
from .bracket import (
    BracketMatrix,
    GaugeForm,
    assemble_pi,
    assemble_pi_gauge,
    bracket_field,
    conformal_scale,
    jacobiator,
    jacobiator_tensor,
    pushforward,
    rank,
)
from .chart import ChartedSystem, StructureData, structure_functions, validate_adapted
from .dynamics import Trajectory, integrate, momentum_field, monitor_suite, velocity_field, xnh_momentum, xnh_velocity
from .errors import (
    ChartExit,
    DegenerateDenominator,
    InvalidParams,
    LinearSolveFailure,
    NonholonomicError,
    NonpositiveFactor,
    OffSphere,
    PoleSingular,
    SingularChart,
    StepRejectionLimit,
    StepTooSmall,
)
from .legendre import PhasePoint, VelocityPoint, constrained_hamiltonian, legendre_fwd, legendre_inv
from .routh import ExtendedBlocks, routh_reduce, theta_dot_recover

__version__ = "0.1.0"
