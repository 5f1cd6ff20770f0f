"""Bracketing root finders and the positive zeros of ``f`` and ``F``."""

from __future__ import annotations

import math
from typing import Callable

from .nonlinearity import DomainError, DoublePowerParams, eta_crit, omega_crit

__all__ = ["bisect", "zeros_of_f", "smallest_zero_of_F"]


def bisect(
    fn: Callable[[float], float],
    lo: float,
    hi: float,
    xtol: float = 0.0,
    max_iter: int = 200,
) -> tuple[float, float]:
    """Shrink a sign-change bracket ``[lo, hi]`` of ``fn``.

    Returns the final bracket.  Stops once its width is ``<= xtol`` or the
    midpoint is no longer representable strictly inside it.
    """
    flo, fhi = fn(lo), fn(hi)
    if flo == 0:
        return lo, lo
    if fhi == 0:
        return hi, hi
    if (flo > 0) == (fhi > 0):
        raise ValueError(f"no sign change on [{lo!r}, {hi!r}]: {flo!r}, {fhi!r}")
    for _ in range(max_iter):
        if hi - lo <= xtol:
            break
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            break
        fm = fn(mid)
        if fm == 0:
            return mid, mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return lo, hi


def _two_term_peak(p: float, q: float, bp: float, bq: float) -> float:
    # maximiser of bp*u**(p-1) - bq*u**(q-1)
    return (bp * (p - 1) / (bq * (q - 1))) ** (1 / (q - p))


def zeros_of_f(dp: DoublePowerParams) -> tuple[float, float]:
    """Both positive zeros ``b1 < b2`` of ``f``.

    Bisects ``g(u) = f(u)/u = -omega + u**(p-1) - u**(q-1)`` on either side of
    its closed-form peak.  Raises ``DomainError`` when ``f`` has no positive
    part (``omega >= eta_crit``).
    """
    w, p, q = dp.omega, dp.p, dp.q
    if not w < eta_crit(p, q):
        raise DomainError("f has no positive zero: omega >= eta_crit(p, q)")

    def g(u: float) -> float:
        return math.fsum((-w, u ** (p - 1), -(u ** (q - 1))))

    peak = _two_term_peak(p, q, 1.0, 1.0)
    b1 = _mid(bisect(g, 0.0, peak))
    # g(1) = -omega < 0 and peak < 1
    b2 = _mid(bisect(g, peak, 1.0))
    return b1, b2


def smallest_zero_of_F(dp: DoublePowerParams) -> float:
    """Smallest positive zero of ``F``; requires ``omega < omega_crit``."""
    w, p, q = dp.omega, dp.p, dp.q
    if not w < omega_crit(p, q):
        raise DomainError("F has no positive zero: omega >= omega_crit(p, q)")

    def h(u: float) -> float:
        # F(u) / u**2
        return math.fsum((-0.5 * w, u ** (p - 1) / (p + 1), -(u ** (q - 1)) / (q + 1)))

    peak = _two_term_peak(p, q, 1 / (p + 1), 1 / (q + 1))
    return _mid(bisect(h, 0.0, peak))


def _mid(bracket: tuple[float, float]) -> float:
    return 0.5 * (bracket[0] + bracket[1])
