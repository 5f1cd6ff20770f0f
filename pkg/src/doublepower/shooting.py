"""Ground states of ``u'' + (n-1)/r u' + f(u) = 0`` by shooting on ``u(0)``.

A trajectory started at height ``alpha`` with ``u'(0) = 0`` either turns
back while still positive (``alpha`` too small), crosses zero (``alpha`` too
large), or, at the ground-state height, decays to zero.  Bisection on this
dichotomy locates the ground state.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .integrator import IntegrationResult, dopri5
from .nonlinearity import (
    DomainError,
    DoublePowerParams,
    eval_F,
    eval_f,
    existence_holds,
    uniqueness_condition_holds,
)
from .roots import smallest_zero_of_F, zeros_of_f

__all__ = [
    "ShootingError",
    "NoExistence",
    "BracketFailure",
    "StateVector",
    "ShootingConfig",
    "OutcomeKind",
    "TrajectoryOutcome",
    "GroundState",
    "ScanReport",
    "series_start",
    "energy",
    "solve_radial",
    "integrate_trajectory",
    "shooting_interval",
    "find_ground_state",
    "uniqueness_scan",
    "count_transitions",
    "dissipation_excess",
    "ode_residuals",
]

#: Relative gap between the bracketing trajectories beyond which the
#: ground-state profile is no longer trusted.
PROFILE_AGREEMENT = 1e-3


class ShootingError(RuntimeError):
    pass


class NoExistence(ShootingError):
    """``omega >= omega_crit``: there is no ground state to find."""


class BracketFailure(ShootingError):
    """No undershoot/overshoot pair could be established or refined."""


@dataclass(frozen=True)
class StateVector:
    r: float
    u: float
    du: float

    def __post_init__(self) -> None:
        if not (self.r >= 0 and math.isfinite(self.r)):
            raise DomainError(f"require finite r >= 0, got {self.r!r}")
        if not (math.isfinite(self.u) and math.isfinite(self.du)):
            raise DomainError("u and du must be finite")


@dataclass(frozen=True)
class ShootingConfig:
    """Solver settings.  ``h0`` and ``r_max`` default to values derived from
    the parameters (see :meth:`start_offset` and :meth:`horizon`)."""

    n: int = 3
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    h0: Optional[float] = None
    r_max: Optional[float] = None
    alpha_tol: float = 1e-12
    conv_eps: float = 1e-8
    max_bisect: int = 200
    max_steps: int = 200_000
    probe_points: int = 32

    def __post_init__(self) -> None:
        if isinstance(self.n, bool) or not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise DomainError(f"n must be an integer >= 1, got {self.n!r}")
        for name in ("rel_tol", "abs_tol", "alpha_tol", "conv_eps"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise DomainError(f"{name} must be positive, got {v!r}")
        if self.h0 is not None and not 0 < self.h0 < 1:
            raise DomainError(f"h0 must lie in (0, 1), got {self.h0!r}")
        if self.r_max is not None and not self.r_max > (self.h0 or 0.0):
            raise DomainError(f"r_max must exceed h0, got {self.r_max!r}")
        if self.max_bisect < 1 or self.max_steps < 1 or self.probe_points < 2:
            raise DomainError("max_bisect, max_steps >= 1 and probe_points >= 2 required")

    def start_offset(self, dp: DoublePowerParams, alpha: float) -> float:
        if self.h0 is not None:
            return self.h0
        # Taylor remainder of the series start is O(|f f'| h**4)
        return min(1e-3, (self.abs_tol / (abs(eval_f(dp, alpha)) + 1)) ** 0.25)

    def horizon(self, dp: DoublePowerParams) -> float:
        # 40 e-foldings of the linearised tail exp(-sqrt(omega) r)
        return self.r_max if self.r_max is not None else 40 / math.sqrt(dp.omega)

    def resolved(self, dp: DoublePowerParams) -> dict:
        d = asdict(self)
        d["r_max"] = self.horizon(dp)
        if self.h0 is None:
            d["h0"] = "auto: min(1e-3, (abs_tol / (|f(alpha)| + 1))**0.25)"
        return d


class OutcomeKind(enum.Enum):
    CROSSED = "crossed"
    TURNED_BACK = "turned_back"
    CONVERGED = "converged"
    INCONCLUSIVE = "inconclusive"


@dataclass
class TrajectoryOutcome:
    kind: OutcomeKind
    alpha: float
    r_event: Optional[float] = None
    """Zero-crossing radius (crossed) or turning radius (turned back)."""
    u_event: Optional[float] = None
    reason: Optional[str] = None
    profile: Optional[np.ndarray] = None
    """``(r, u, du)`` rows; set for converged trajectories."""
    samples: np.ndarray = field(default_factory=lambda: np.empty((0, 3)))
    """``(r, u, du)`` at every accepted step, ending at the event if any."""


@dataclass
class GroundState:
    alpha: float
    profile: np.ndarray
    """``(r, u, du)`` rows starting at ``r = 0``; ``u`` positive and decreasing."""
    bracket: tuple[float, float]
    residuals: float
    """Max ``|u'' + (n-1)/r u' + f(u)|`` over the profile checkpoints."""
    bisections: int = 0


@dataclass
class ScanReport:
    grid: np.ndarray
    outcomes: list[TrajectoryOutcome]
    transitions: int

    @property
    def kinds(self) -> list[OutcomeKind]:
        return [o.kind for o in self.outcomes]


def series_start(dp: DoublePowerParams, n: int, alpha: float, h: float) -> StateVector:
    """State at ``r = h`` from the Taylor expansion about the regular centre."""
    if not alpha > 0:
        raise DomainError(f"require alpha > 0, got {alpha!r}")
    if not 0 < h < 1:
        raise DomainError(f"start offset must lie in (0, 1), got {h!r}")
    fa = eval_f(dp, alpha)
    return StateVector(h, alpha - fa * h * h / (2 * n), -fa * h / n)


def energy(dp: DoublePowerParams, s: StateVector) -> float:
    """``du**2/2 + F(u)``, with ``F`` extended evenly to ``u < 0``."""
    return 0.5 * s.du * s.du + eval_F(dp, abs(s.u))


def _radial_rhs(dp: DoublePowerParams, n: int):
    w, p, q = dp.omega, dp.p, dp.q
    damp = n - 1

    def rhs(r: float, y: tuple[float, ...]) -> tuple[float, float]:
        u, v = y
        # odd extension keeps stages that overshoot u = 0 well defined
        a = -u if u < 0 else u
        nl = a**p - a**q
        fu = -w * u + (nl if u >= 0 else -nl)
        return (v, -damp / r * v - fu)

    return rhs


def _event_u(r: float, y: tuple[float, ...]) -> float:
    return y[0]


def _event_du(r: float, y: tuple[float, ...]) -> float:
    return y[1]


def solve_radial(
    dp: DoublePowerParams, cfg: ShootingConfig, alpha: float, keep_dense: bool = False
) -> tuple[IntegrationResult, TrajectoryOutcome]:
    """Integrate from the series start and classify the trajectory."""
    h = cfg.start_offset(dp, alpha)
    s0 = series_start(dp, cfg.n, alpha, h)
    res = dopri5(
        _radial_rhs(dp, cfg.n),
        s0.r,
        (s0.u, s0.du),
        cfg.horizon(dp),
        rtol=cfg.rel_tol,
        atol=cfg.abs_tol,
        events=(_event_u, _event_du),
        max_steps=cfg.max_steps,
        keep_dense=keep_dense,
    )
    samples = np.column_stack([res.t, [y[0] for y in res.y], [y[1] for y in res.y]])
    out = TrajectoryOutcome(OutcomeKind.INCONCLUSIVE, alpha, samples=samples)

    if res.status == "event":
        idx = {i for i, _ in res.events}
        r_ev = res.events[0][1]
        u_ev, du_ev = res.y[-1]
        out.r_event, out.u_event = r_ev, u_ev
        if idx == {0, 1}:
            out.reason = "grazing: u and du vanish in the same step"
        elif 0 in idx:
            if du_ev < 0:
                out.kind = OutcomeKind.CROSSED
            else:
                out.reason = "zero reached with du >= 0"
        elif u_ev > 0:
            out.kind = OutcomeKind.TURNED_BACK
        else:
            out.reason = "du vanished with u <= 0"
    elif res.status == "t_end":
        u, du = res.y[-1]
        if 0 < u < cfg.conv_eps and abs(du) < cfg.conv_eps and du < 0:
            out.kind = OutcomeKind.CONVERGED
            out.profile = samples
        else:
            out.reason = f"reached r_max with u={u:.3g}, du={du:.3g}"
    else:
        out.reason = {
            "max_steps": "step budget exhausted",
            "nonfinite": "non-finite state",
            "step_underflow": "step size underflow",
        }[res.status]
    return res, out


def integrate_trajectory(
    dp: DoublePowerParams, cfg: ShootingConfig, alpha: float
) -> TrajectoryOutcome:
    return solve_radial(dp, cfg, alpha)[1]


def shooting_interval(dp: DoublePowerParams) -> tuple[float, float]:
    """Heights worth shooting from.

    With existence this is ``[u_F - eps, b2 - eps]``, where ``u_F`` is the
    smallest zero of ``F`` and ``b2`` the largest zero of ``f``.  The lower end
    sits just below ``u_F`` (``F < 0`` there, so the trajectory must turn
    back); for ``n = 1`` the ground state is exactly ``u_F``.  Without
    existence it is the open interval ``(0, b2)``.
    """
    try:
        _, b2 = zeros_of_f(dp)
    except DomainError as exc:
        raise BracketFailure(str(exc)) from exc
    if not existence_holds(dp):
        return 0.0, b2
    u_f = smallest_zero_of_F(dp)
    eps = 1e-6 * (b2 - u_f)
    return u_f - eps, b2 - eps


def _outcome(args: tuple[DoublePowerParams, ShootingConfig, float]) -> TrajectoryOutcome:
    return integrate_trajectory(*args)


def _run_all(
    dp: DoublePowerParams, cfg: ShootingConfig, alphas, workers: int
) -> list[TrajectoryOutcome]:
    jobs = [(dp, cfg, float(a)) for a in alphas]
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            return list(pool.map(_outcome, jobs, chunksize=4))
    return [_outcome(j) for j in jobs]


def count_transitions(kinds: list[OutcomeKind]) -> int:
    """Switches between turned-back and crossed, ignoring other outcomes."""
    seq = [k for k in kinds if k in (OutcomeKind.TURNED_BACK, OutcomeKind.CROSSED)]
    return sum(a != b for a, b in zip(seq, seq[1:]))


def uniqueness_scan(
    dp: DoublePowerParams,
    cfg: ShootingConfig,
    grid_size: int,
    workers: int = 1,
    record: Optional[list] = None,
) -> ScanReport:
    """Classify trajectories on a uniform ``alpha`` grid over the shooting interval."""
    if grid_size < 1:
        raise DomainError(f"grid_size must be >= 1, got {grid_size!r}")
    lo, hi = shooting_interval(dp)
    if lo == 0.0:
        grid = hi * np.arange(1, grid_size + 1) / (grid_size + 1)
    elif grid_size == 1:
        grid = np.array([0.5 * (lo + hi)])
    else:
        grid = np.linspace(lo, hi, grid_size)
    outcomes = _run_all(dp, cfg, grid, workers)
    if record is not None:
        record.extend(outcomes)
    return ScanReport(grid, outcomes, count_transitions([o.kind for o in outcomes]))


def find_ground_state(
    dp: DoublePowerParams, cfg: ShootingConfig, record: Optional[list] = None
) -> GroundState:
    """Locate the ground-state height by bisection on the shooting dichotomy."""
    if not existence_holds(dp):
        raise NoExistence("no existence: omega >= omega_crit")
    lo_end, hi_end = shooting_interval(dp)

    probes = np.geomspace(lo_end, hi_end, cfg.probe_points)
    probe_out = _run_all(dp, cfg, probes, 1)
    if record is not None:
        record.extend(probe_out)
    lo = hi = None
    for a, b in zip(probe_out, probe_out[1:]):
        if a.kind is OutcomeKind.TURNED_BACK and b.kind is OutcomeKind.CROSSED:
            lo, hi = a.alpha, b.alpha
            break
    if lo is None:
        kinds = ", ".join(o.kind.value for o in probe_out)
        raise BracketFailure(f"no turned-back/crossed pair on the probe grid: {kinds}")

    it = 0
    converged_at = None
    while hi - lo >= cfg.alpha_tol:
        if it >= cfg.max_bisect:
            raise BracketFailure(f"bracket width {hi - lo:.3g} after {it} bisections")
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            break
        it += 1
        o = integrate_trajectory(dp, cfg, mid)
        if record is not None:
            record.append(o)
        if o.kind is OutcomeKind.TURNED_BACK:
            lo = mid
        elif o.kind is OutcomeKind.CROSSED:
            hi = mid
        elif o.kind is OutcomeKind.CONVERGED:
            converged_at = mid
            break
        else:
            raise BracketFailure(f"inconclusive trajectory at alpha={mid!r}: {o.reason}")

    alpha = converged_at if converged_at is not None else 0.5 * (lo + hi)
    profile, sol = _trusted_profile(dp, cfg, alpha, lo, hi, record)
    return GroundState(
        alpha=alpha,
        profile=profile,
        bracket=(lo, hi),
        residuals=float(np.max(ode_residuals(dp, cfg.n, sol, profile[1:, 0]))),
        bisections=it,
    )


def _trusted_profile(dp, cfg, alpha, lo, hi, record):
    sol, mid = solve_radial(dp, cfg, alpha, keep_dense=True)
    sol_lo, o_lo = solve_radial(dp, cfg, lo, keep_dense=True)
    sol_hi, o_hi = solve_radial(dp, cfg, hi, keep_dense=True)
    if record is not None:
        record.extend([mid, o_lo, o_hi])
    r_end = min(sol.t[-1], sol_lo.t[-1], sol_hi.t[-1])
    rows = [(0.0, alpha, 0.0)]
    for r, u, du in mid.samples:
        if r > r_end or not (0 < u < rows[-1][1]) or du >= 0:
            break
        if abs(sol_hi(r)[0] - sol_lo(r)[0]) > PROFILE_AGREEMENT * u:
            break
        rows.append((r, u, du))
    if len(rows) < 3:
        raise BracketFailure(f"bracketing trajectories disagree immediately at alpha={alpha!r}")
    return np.asarray(rows), sol


def ode_residuals(
    dp: DoublePowerParams, n: int, sol: IntegrationResult, radii, checkpoints: int = 100
) -> np.ndarray:
    """``|u'' + (n-1)/r u' + f(u)|`` at evenly spaced radii inside ``radii``.

    ``u''`` is the derivative of the dense-output interpolant of ``u'``, so
    this measures how well the interpolated solution satisfies the ODE.
    """
    radii = np.asarray(radii, dtype=float)
    pts = np.linspace(radii[0], radii[-1], checkpoints)
    out = np.empty(checkpoints)
    for i, r in enumerate(pts):
        u, du = sol(r)
        d2u = sol.derivative(r)[1]
        out[i] = abs(d2u + (n - 1) / r * du + eval_f(dp, u))
    return out


def dissipation_excess(dp: DoublePowerParams, n: int, samples: np.ndarray) -> np.ndarray:
    """Per-step energy increase ``E(r_{k+1}) - E(r_k)``; non-positive for ``n >= 2``.

    For ``n = 1`` the energy is conserved and the drift ``E(r_k) - E(r_0)`` is
    returned instead.
    """
    e = np.array([0.5 * du * du + eval_F(dp, abs(u)) for _, u, du in samples])
    if n == 1:
        return e - e[0]
    return np.diff(e)
