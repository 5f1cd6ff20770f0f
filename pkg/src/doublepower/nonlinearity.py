"""Double- and triple-power nonlinearities.

The double-power function is ``f(u) = -omega*u + u**p - u**q`` with
``omega > 0`` and ``1 < p < q``.  The triple-power function
``f(u) = -a*u**p + b*u**q - c*u**r`` (``a, b, c > 0``, ``0 < p < q < r``)
contains it as the special case ``(omega, 1, 1, 1, p, q)``, and so does the
primitive ``F`` of a double-power ``f``.

Everything here is closed form: thresholds, the sign trichotomy and the
tilde transform ``f -> (u f')' f - u f'**2``, which maps triple-power
functions to triple-power functions.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction

__all__ = [
    "DomainError",
    "DoublePowerParams",
    "TriplePowerParams",
    "Case",
    "SignClass",
    "TANGENT_TOL",
    "eval_triple",
    "eval_f",
    "eval_F",
    "eval_f_tilde",
    "eval_F_tilde",
    "tilde_triple",
    "triple_threshold",
    "classify_triple",
    "tangent_point",
    "omega_crit",
    "eta_crit",
    "existence_holds",
    "uniqueness_condition_holds",
]

#: Half-width of the band on the relative margin classified as tangent.
TANGENT_TOL = 1e-9


class DomainError(ValueError):
    """Raised for arguments outside the domain of an operation."""


def _check_finite(**values: float) -> None:
    for name, v in values.items():
        if not math.isfinite(v):
            raise DomainError(f"{name} must be finite, got {v!r}")


@dataclass(frozen=True)
class DoublePowerParams:
    """``f(u) = -omega*u + u**p - u**q``."""

    omega: float
    p: float
    q: float

    def __post_init__(self) -> None:
        _check_finite(omega=self.omega, p=self.p, q=self.q)
        if not self.omega > 0:
            raise DomainError(f"require omega > 0, got omega={self.omega!r}")
        if not 1 < self.p:
            raise DomainError(f"require p > 1, got p={self.p!r}")
        if not self.p < self.q:
            raise DomainError(f"require p < q, got p={self.p!r}, q={self.q!r}")

    def as_triple(self) -> TriplePowerParams:
        """``f`` itself as a triple-power function."""
        return TriplePowerParams(self.omega, 1.0, 1.0, 1.0, self.p, self.q)

    def primitive_triple(self) -> TriplePowerParams:
        """``F(u) = integral of f over [0, u]`` as a triple-power function."""
        p, q = self.p, self.q
        return TriplePowerParams(
            self.omega / 2, 1 / (p + 1), 1 / (q + 1), 2.0, p + 1, q + 1
        )


@dataclass(frozen=True)
class TriplePowerParams:
    """``f(u) = -a*u**p + b*u**q - c*u**r``."""

    a: float
    b: float
    c: float
    p: float
    q: float
    r: float

    def __post_init__(self) -> None:
        _check_finite(a=self.a, b=self.b, c=self.c, p=self.p, q=self.q, r=self.r)
        if not (self.a > 0 and self.b > 0 and self.c > 0):
            raise DomainError(
                f"coefficients must be positive, got a={self.a!r}, b={self.b!r}, c={self.c!r}"
            )
        if not 0 < self.p < self.q < self.r:
            raise DomainError(
                f"require 0 < p < q < r, got p={self.p!r}, q={self.q!r}, r={self.r!r}"
            )

    def __call__(self, u: float) -> float:
        return eval_triple(self, u)


class Case(enum.Enum):
    """Sign pattern of a triple-power function on ``u > 0``."""

    POSITIVE_PART = "a"
    TANGENT = "b"
    STRICTLY_NEGATIVE = "c"


@dataclass(frozen=True)
class SignClass:
    case: Case
    margin: float
    """``(a - a_crit) / a_crit``; negative means ``f`` has a positive part."""
    a_crit: float


def eval_triple(tp: TriplePowerParams, u: float) -> float:
    if not (math.isfinite(u) and u >= 0):
        raise DomainError(f"require finite u >= 0, got {u!r}")
    return math.fsum((-tp.a * u**tp.p, tp.b * u**tp.q, -tp.c * u**tp.r))


def eval_f(dp: DoublePowerParams, u: float) -> float:
    if not (math.isfinite(u) and u >= 0):
        raise DomainError(f"require finite u >= 0, got {u!r}")
    return math.fsum((-dp.omega * u, u**dp.p, -(u**dp.q)))


def eval_F(dp: DoublePowerParams, u: float) -> float:
    if not (math.isfinite(u) and u >= 0):
        raise DomainError(f"require finite u >= 0, got {u!r}")
    p, q = dp.p, dp.q
    return math.fsum(
        (-0.5 * dp.omega * u * u, u ** (p + 1) / (p + 1), -(u ** (q + 1)) / (q + 1))
    )


def _require_positive(u: float) -> None:
    if not (math.isfinite(u) and u > 0):
        raise DomainError(f"require finite u > 0, got {u!r}")


def eval_f_tilde(dp: DoublePowerParams, u: float) -> float:
    """``(u f')' f - u f'**2`` for the double-power ``f``."""
    _require_positive(u)
    return eval_triple(tilde_triple(dp.as_triple()), u)


def eval_F_tilde(dp: DoublePowerParams, u: float) -> float:
    """``(u f)' F - u f**2``, the tilde transform applied to ``F``."""
    _require_positive(u)
    return eval_triple(tilde_triple(dp.primitive_triple()), u)


def tilde_triple(tp: TriplePowerParams) -> TriplePowerParams:
    """Coefficients of ``(u g')' g - u g'**2`` for the triple-power ``g``."""
    a, b, c, p, q, r = tp.a, tp.b, tp.c, tp.p, tp.q, tp.r
    if p + q <= 1:
        raise DomainError(f"tilde transform needs p + q > 1, got p + q = {p + q!r}")
    return TriplePowerParams(
        a * b * (q - p) ** 2,
        c * a * (r - p) ** 2,
        b * c * (r - q) ** 2,
        q + p - 1,
        r + p - 1,
        r + q - 1,
    )


def _check_exponents(p: float, q: float, r: float) -> None:
    _check_finite(p=p, q=q, r=r)
    if not p < q < r:
        raise DomainError(f"require p < q < r, got p={p!r}, q={q!r}, r={r!r}")


def _log_base(b: float, c: float, p: float, q: float, r: float) -> float:
    # log(b(q-p) / (c(r-p))); a single log keeps the error absolute when the
    # ratio is near 1, where the exponent (q-p)/(r-q) may be large
    ratio = (b * (q - p)) / (c * (r - p))
    if 0.5 < ratio < 2:
        # log1p of the exactly computed ratio - 1
        fb, fc, fp, fq, fr = map(Fraction, (b, c, p, q, r))
        den = fc * (fr - fp)
        return math.log1p(float((fb * (fq - fp) - den) / den))
    if 0 < ratio < math.inf:
        return math.log(ratio)
    return math.log(b) + math.log(q - p) - math.log(c) - math.log(r - p)


def _log_threshold(b: float, c: float, p: float, q: float, r: float) -> float:
    return (
        math.log(b) + math.log(r - q) - math.log(r - p)
        + (q - p) / (r - q) * _log_base(b, c, p, q, r)
    )


def _exp(x: float) -> float:
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


def triple_threshold(b: float, c: float, p: float, q: float, r: float) -> float:
    """Largest ``a`` for which ``-a*u**p + b*u**q - c*u**r`` reaches zero.

    This is ``max_{u>0} (b*u**(q-p) - c*u**(r-p))``, evaluated in log space;
    the result saturates to ``inf`` (or ``0``) outside the float range.
    """
    _check_exponents(p, q, r)
    if not (b > 0 and c > 0):
        raise DomainError(f"require b, c > 0, got b={b!r}, c={c!r}")
    return _exp(_log_threshold(b, c, p, q, r))


def tangent_point(tp: TriplePowerParams) -> float:
    """Maximiser of ``f(u) / u**p``; a double zero of ``f`` in the tangent case."""
    b, c, p, q, r = tp.b, tp.c, tp.p, tp.q, tp.r
    return _exp(_log_base(b, c, p, q, r) / (r - q))


def classify_triple(tp: TriplePowerParams, tangent_tol: float = TANGENT_TOL) -> SignClass:
    log_crit = _log_threshold(tp.b, tp.c, tp.p, tp.q, tp.r)
    log_ratio = math.log(tp.a) - log_crit
    # (a - a_crit) / a_crit without forming a_crit, which may not be representable
    margin = math.expm1(log_ratio) if log_ratio < 700 else math.inf
    if margin < -tangent_tol:
        case = Case.POSITIVE_PART
    elif margin > tangent_tol:
        case = Case.STRICTLY_NEGATIVE
    else:
        case = Case.TANGENT
    return SignClass(case, margin, _exp(log_crit))


def _check_double_exponents(p: float, q: float) -> None:
    _check_finite(p=p, q=q)
    if not 1 < p:
        raise DomainError(f"require p > 1, got p={p!r}")
    if not p < q:
        raise DomainError(f"require p < q, got p={p!r}, q={q!r}")


def omega_crit(p: float, q: float) -> float:
    """Supremum of ``omega`` for which ``F`` takes a positive value."""
    _check_double_exponents(p, q)
    scale = (p + 1) * (q - 1)
    # (p-1)(q+1) / ((p+1)(q-1)) == 1 - 2(q-p) / ((p+1)(q-1)); log1p keeps q ~ p accurate
    log_base = math.log1p(-2 * (q - p) / scale)
    return math.exp(
        math.log(2 * (q - p)) - math.log(scale) + (p - 1) / (q - p) * log_base
    )


def eta_crit(p: float, q: float) -> float:
    """Supremum of ``omega`` for which ``f`` takes a positive value."""
    _check_double_exponents(p, q)
    log_base = math.log1p(-(q - p) / (q - 1))
    return math.exp(math.log(q - p) - math.log(q - 1) + (p - 1) / (q - p) * log_base)


def existence_holds(dp: DoublePowerParams) -> bool:
    """Whether a positive decaying radial solution exists (``omega < omega_crit``)."""
    return dp.omega < omega_crit(dp.p, dp.q)


def uniqueness_condition_holds(dp: DoublePowerParams) -> bool:
    """Whether the tilde transform of ``f`` is negative on ``u > 0`` (``omega < eta_crit``)."""
    return dp.omega < eta_crit(dp.p, dp.q)
