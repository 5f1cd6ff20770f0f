"""Double-power nonlinearities: thresholds, sign classification, tilde
transform, and ground states of the radial equation by shooting."""

from .nonlinearity import (
    TANGENT_TOL,
    Case,
    DomainError,
    DoublePowerParams,
    SignClass,
    TriplePowerParams,
    classify_triple,
    eta_crit,
    eval_F,
    eval_F_tilde,
    eval_f,
    eval_f_tilde,
    eval_triple,
    existence_holds,
    omega_crit,
    tangent_point,
    tilde_triple,
    triple_threshold,
    uniqueness_condition_holds,
)
from .shooting import (
    BracketFailure,
    GroundState,
    NoExistence,
    OutcomeKind,
    ScanReport,
    ShootingConfig,
    StateVector,
    TrajectoryOutcome,
    energy,
    find_ground_state,
    integrate_trajectory,
    series_start,
    uniqueness_scan,
)

__version__ = "0.1.0"
