"""Adaptive Dormand-Prince 5(4) integrator with dense output and events.

Written for small systems stored as tuples of floats; the radial ODE has
two components, where per-step Python overhead dominates and numpy arrays
would only add cost.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

__all__ = ["DenseStep", "IntegrationResult", "dopri5"]

State = tuple[float, ...]
Rhs = Callable[[float, State], State]
EventFn = Callable[[float, State], float]

# Dormand & Prince (1980) tableau, FSAL; dense output coefficients from
# Shampine (1986).
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
)
_B = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84)
_E = (-71 / 57600, 0.0, 71 / 16695, -71 / 1920, 17253 / 339200, -22 / 525, 1 / 40)
_P = (
    (1.0, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432),
    (0.0, 0.0, 0.0, 0.0),
    (0.0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799),
    (0.0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072),
    (0.0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632),
    (0.0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844),
    (0.0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423),
)

_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 10.0


@dataclass(frozen=True)
class DenseStep:
    """Quartic interpolant over one accepted step ``[t0, t0 + h]``."""

    t0: float
    h: float
    y0: State
    coeffs: tuple[tuple[float, float, float, float], ...]

    @property
    def t1(self) -> float:
        return self.t0 + self.h

    def at_theta(self, theta: float) -> State:
        h = self.h
        return tuple(
            y + h * theta * (c0 + theta * (c1 + theta * (c2 + theta * c3)))
            for y, (c0, c1, c2, c3) in zip(self.y0, self.coeffs)
        )

    def __call__(self, t: float) -> State:
        return self.at_theta((t - self.t0) / self.h)

    def derivative(self, t: float) -> State:
        """Derivative of the interpolant with respect to ``t``."""
        theta = (t - self.t0) / self.h
        return tuple(
            c0 + theta * (2 * c1 + theta * (3 * c2 + theta * 4 * c3))
            for c0, c1, c2, c3 in self.coeffs
        )


@dataclass
class IntegrationResult:
    t: list[float]
    y: list[State]
    status: str
    """One of ``"t_end"``, ``"event"``, ``"max_steps"``, ``"nonfinite"``, ``"step_underflow"``."""
    steps: list[DenseStep] = field(default_factory=list)
    events: list[tuple[int, float]] = field(default_factory=list)
    """``(event index, t)`` for every event that fired in the final step, by time."""
    nfev: int = 0

    def step_for(self, t: float) -> DenseStep:
        import bisect as _bisect

        starts = [s.t0 for s in self.steps]
        i = max(0, min(len(self.steps) - 1, _bisect.bisect_right(starts, t) - 1))
        return self.steps[i]

    def __call__(self, t: float) -> State:
        return self.step_for(t)(t)

    def derivative(self, t: float) -> State:
        return self.step_for(t).derivative(t)


def _norm(err: Sequence[float], y0: State, y1: State, rtol: float, atol: float) -> float:
    return max(
        abs(e) / (atol + rtol * max(abs(a), abs(b))) for e, a, b in zip(err, y0, y1)
    )


def _initial_step(rhs: Rhs, t0: float, y0: State, f0: State, rtol: float, atol: float) -> float:
    # Hairer, Norsett & Wanner, Solving ODEs I, sec. II.4
    scale = [atol + rtol * abs(v) for v in y0]
    d0 = math.sqrt(sum((v / s) ** 2 for v, s in zip(y0, scale)) / len(y0))
    d1 = math.sqrt(sum((v / s) ** 2 for v, s in zip(f0, scale)) / len(y0))
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    y1 = tuple(v + h0 * d for v, d in zip(y0, f0))
    f1 = rhs(t0 + h0, y1)
    d2 = math.sqrt(sum(((a - b) / s) ** 2 for a, b, s in zip(f1, f0, scale)) / len(y0)) / h0
    if d1 <= 1e-15 and d2 <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1 / 5)
    return min(100 * h0, h1)


def _locate(step: DenseStep, event: EventFn, g0: float, tol: float) -> float:
    lo, hi = 0.0, 1.0
    while (hi - lo) * step.h > tol:
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            break
        gm = event(step.t0 + mid * step.h, step.at_theta(mid))
        if gm == 0:
            return step.t0 + mid * step.h
        if (gm > 0) == (g0 > 0):
            lo = mid
        else:
            hi = mid
    return step.t0 + hi * step.h


def dopri5(
    rhs: Rhs,
    t0: float,
    y0: Sequence[float],
    t_end: float,
    rtol: float = 1e-10,
    atol: float = 1e-12,
    events: Sequence[EventFn] = (),
    max_steps: int = 100_000,
    h_init: float | None = None,
    keep_dense: bool = True,
) -> IntegrationResult:
    """Integrate ``y' = rhs(t, y)`` forward from ``t0`` towards ``t_end``.

    Every event is terminal.  A sign change of an event function between two
    accepted steps is localised by bisection on the interpolant; the result
    ends at the earliest event.  Accepted-step states are recorded in
    ``t``/``y``, with the event point appended when one fires.
    """
    y = tuple(float(v) for v in y0)
    t = float(t0)
    f = rhs(t, y)
    nfev = 1
    h = h_init if h_init is not None else _initial_step(rhs, t, y, f, rtol, atol)
    nfev += 1
    ts, ys, steps = [t], [y], []
    g_prev = [ev(t, y) for ev in events]
    dim = len(y)
    status = "t_end"
    rejected = False
    n_accepted = 0

    while t < t_end:
        if n_accepted >= max_steps:
            status = "max_steps"
            break
        h = min(h, t_end - t)
        if h <= 1e-14 * max(1.0, abs(t)):
            status = "step_underflow"
            break

        k = [f]
        for i in range(1, 6):
            ai = _A[i]
            yi = tuple(
                y[j] + h * sum(a * k[s][j] for s, a in enumerate(ai)) for j in range(dim)
            )
            k.append(rhs(t + _C[i] * h, yi))
        y_new = tuple(
            y[j] + h * sum(b * k[s][j] for s, b in enumerate(_B)) for j in range(dim)
        )
        f_new = rhs(t + h, y_new)
        k.append(f_new)
        nfev += 6

        if not all(math.isfinite(v) for v in y_new + f_new):
            status = "nonfinite"
            break

        err = [h * sum(e * k[s][j] for s, e in enumerate(_E)) for j in range(dim)]
        en = _norm(err, y, y_new, rtol, atol)

        if en > 1:
            h *= max(_MIN_FACTOR, _SAFETY * en ** -0.2)
            rejected = True
            continue

        coeffs = tuple(
            tuple(sum(k[s][j] * _P[s][m] for s in range(7)) for m in range(4))
            for j in range(dim)
        )
        step = DenseStep(t, h, y, coeffs)
        t_new = t + h

        fired = []
        g_new = [ev(t_new, y_new) for ev in events]
        for idx, (g0, g1) in enumerate(zip(g_prev, g_new)):
            if g0 != 0 and (g1 == 0 or (g0 > 0) != (g1 > 0)):
                fired.append((idx, _locate(step, events[idx], g0, 1e-14 * max(1.0, abs(t_new)))))

        if keep_dense or fired:
            steps.append(step)
        n_accepted += 1

        if fired:
            fired.sort(key=lambda e: e[1])
            t_ev = fired[0][1]
            ts.append(t_ev)
            ys.append(step(t_ev))
            status = "event"
            return IntegrationResult(ts, ys, status, steps, fired, nfev)

        t, y, f = t_new, y_new, f_new
        ts.append(t)
        ys.append(y)
        g_prev = g_new

        factor = _MAX_FACTOR if en == 0 else min(_MAX_FACTOR, _SAFETY * en ** -0.2)
        if rejected:
            factor = min(1.0, factor)
            rejected = False
        h *= factor

    return IntegrationResult(ts, ys, status, steps, [], nfev)
