"""Embedded invariant suite behind ``doublepower selfcheck``."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .nonlinearity import (
    Case,
    DoublePowerParams,
    TriplePowerParams,
    classify_triple,
    eta_crit,
    omega_crit,
    tangent_point,
    tilde_triple,
    triple_threshold,
)
from .roots import smallest_zero_of_F
from .shooting import ShootingConfig, find_ground_state

__all__ = ["CheckResult", "random_triple", "term_scale", "run_selfcheck"]

#: Above this exponent (p-1)/(q-p), rounding of 1/(p+1) in the triple-power
#: form of F alone moves omega_crit by more than 1e-12 relative.
OMEGA_COND_MAX = 1e3

_FLIP = {
    Case.POSITIVE_PART: Case.STRICTLY_NEGATIVE,
    Case.TANGENT: Case.TANGENT,
    Case.STRICTLY_NEGATIVE: Case.POSITIVE_PART,
}


@dataclass
class CheckResult:
    name: str
    passed: bool
    cases: int
    detail: str = ""


def random_triple(rng: np.random.Generator, a: float | None = None) -> TriplePowerParams:
    """Random triple with ``p + q > 1`` (so its tilde transform is defined)."""
    b, c = 10 ** rng.uniform(-2, 2, size=2)
    p = rng.uniform(0.5, 5)
    q = p + rng.uniform(0.05, 5)
    r = q + max(rng.uniform(0.05, 5), (q - p) / 20)
    if a is None:
        a = triple_threshold(b, c, p, q, r) * 10 ** rng.uniform(-1.5, 1.5)
    return TriplePowerParams(float(a), float(b), float(c), float(p), float(q), float(r))


def term_scale(tp: TriplePowerParams, u: float) -> float:
    return tp.a * u**tp.p + tp.b * u**tp.q + tp.c * u**tp.r


def _check_thresholds(rng: np.random.Generator, cases: int) -> CheckResult:
    worst = 0.0
    bad = 0
    for _ in range(cases):
        p = rng.uniform(1.01, 20)
        q = rng.uniform(p, 20.01)
        w, e = omega_crit(p, q), eta_crit(p, q)
        w2 = 2 * triple_threshold(1 / (p + 1), 1 / (q + 1), 2, p + 1, q + 1)
        e2 = triple_threshold(1, 1, 1, p, q)
        worst = max(worst, abs(e - e2) / e)
        if (p - 1) / (q - p) <= OMEGA_COND_MAX:
            worst = max(worst, abs(w - w2) / w)
        bad += not 0 < w < e
    ok = bad == 0 and worst <= 1e-12
    return CheckResult("threshold consistency", ok, cases, f"max rel dev {worst:.2e}, order violations {bad}")


def _check_duality(rng: np.random.Generator, cases: int) -> CheckResult:
    bad = 0
    checked = 0
    while checked < cases:
        tp = random_triple(rng)
        sc = classify_triple(tp)
        if abs(sc.margin) <= 1e-6:
            continue
        checked += 1
        bad += classify_triple(tilde_triple(tp)).case is not _FLIP[sc.case]
    return CheckResult("tilde duality", bad == 0, cases, f"{bad} case mismatches")


def _check_tangency(rng: np.random.Generator, cases: int) -> CheckResult:
    worst = 0.0
    bad = 0
    i = 0
    while i < cases:
        if i == 0:
            tp = TriplePowerParams(0.25, 1, 1, 1, 2, 3)
        else:
            tmp = random_triple(rng, a=1.0)
            tp = TriplePowerParams(
                triple_threshold(tmp.b, tmp.c, tmp.p, tmp.q, tmp.r), tmp.b, tmp.c, tmp.p, tmp.q, tmp.r
            )
        u = tangent_point(tp)
        if not 1e-30 < u < 1e30:
            # f(u) would sit in the subnormal range
            continue
        i += 1
        tt = tilde_triple(tp)
        bad += classify_triple(tp).case is not Case.TANGENT
        bad += classify_triple(tt).case is not Case.TANGENT
        worst = max(worst, abs(tp(u)) / term_scale(tp, u), abs(tt(u)) / term_scale(tt, u))
    ok = bad == 0 and worst <= 1e-10
    return CheckResult("tangency collocation", ok, cases, f"max rel residual {worst:.2e}, misclassified {bad}")


def _check_n1_oracle() -> CheckResult:
    dp = DoublePowerParams(0.1, 3.0, 5.0)
    gs = find_ground_state(dp, ShootingConfig(n=1))
    dev = abs(gs.alpha - smallest_zero_of_F(dp))
    return CheckResult("n=1 shooting oracle", dev <= 1e-6, 1, f"|alpha - u_F| = {dev:.2e}")


def run_selfcheck(seed: int = 0, cases: int = 1000) -> list[CheckResult]:
    """Run every check; an empty list when ``cases == 0``."""
    if cases <= 0:
        return []
    rng = np.random.default_rng(seed)
    checks: list[Callable[[], CheckResult]] = [
        lambda: _check_thresholds(rng, cases),
        lambda: _check_duality(rng, cases),
        lambda: _check_tangency(rng, max(1, cases // 10)),
        _check_n1_oracle,
    ]
    results = []
    for check in checks:
        try:
            results.append(check())
        except Exception as exc:  # a crashing check is a failed check
            results.append(CheckResult(getattr(check, "__name__", "check"), False, 0, repr(exc)))
    return results
