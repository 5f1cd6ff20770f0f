"""Reference computations that share no code with the package."""

import math

import numpy as np
import sympy as sp
from scipy.integrate import solve_ivp

INVPHI = (math.sqrt(5) - 1) / 2

# n = 3 ground-state height for (omega, p, q) = (0.1, 3, 5), from DOP853 at
# rtol 1e-13 / atol 1e-15 and 45 bisections on the shooting dichotomy
# (see reference_outcome below).  Final bracket:
# [0.9188521282592877, 0.9188521282593003].
ALPHA_N3_REF = 0.918852128259294


def triple(a, b, c, p, q, r):
    return lambda u: -a * u**p + b * u**q - c * u**r


def golden_max(g, lo, hi, tol=1e-12, iters=400):
    """Golden-section search for the max of a unimodal g on [lo, hi]."""
    x1 = hi - INVPHI * (hi - lo)
    x2 = lo + INVPHI * (hi - lo)
    g1, g2 = g(x1), g(x2)
    for _ in range(iters):
        if hi - lo <= tol * max(1.0, abs(lo), abs(hi)):
            break
        if g1 < g2:
            lo, x1, g1 = x1, x2, g2
            x2 = lo + INVPHI * (hi - lo)
            g2 = g(x2)
        else:
            hi, x2, g2 = x2, x1, g1
            x1 = hi - INVPHI * (hi - lo)
            g1 = g(x1)
    x = 0.5 * (lo + hi)
    return x, g(x)


def max_two_term(b, c, p, q, r):
    """max_{u>0} b u^(q-p) - c u^(r-p) by golden section in t = log u."""
    g = lambda t: b * math.exp((q - p) * t) - c * math.exp((r - p) * t)
    # bracket: g increases up to its peak, so walk outwards until it drops
    lo, hi = -1.0, 1.0
    while g(lo) >= g(lo + 0.5):
        lo -= 1.0
    while g(hi) >= g(hi - 0.5):
        hi += 1.0
    t, v = golden_max(g, lo, hi, tol=1e-14)
    return v, math.exp(t)


def sampled_max_log(g, t_lo, t_hi, points=1000):
    """Max of g(t) over a uniform grid on [t_lo, t_hi], refined by golden
    section between the neighbours of the best grid point."""
    ts = np.linspace(t_lo, t_hi, points)
    vals = [g(float(t)) for t in ts]
    i = int(np.argmax(vals))
    lo, hi = float(ts[max(i - 1, 0)]), float(ts[min(i + 1, points - 1)])
    _, v = golden_max(g, lo, hi, tol=1e-15)
    return max(v, max(vals))


def sampled_max_scaled(fn, p_low, lo=1e-3, hi=1e3, points=1000):
    """Max of fn(u)/u**p_low over a log grid on [lo, hi] plus local
    refinement.  Its sign says whether fn has a positive value on u > 0 (for
    the unimodal ratios used here)."""
    g = lambda t: fn(math.exp(t)) / math.exp(p_low * t)
    return sampled_max_log(g, math.log(lo), math.log(hi), points)


def triple_scaled_max(a, b, c, p, q, r, lo, hi, points=1000):
    """Sampled max of (-a u^p + b u^q - c u^r) / u^p, computed in t = log u."""
    g = lambda t: -a + b * math.exp((q - p) * t) - c * math.exp((r - p) * t)
    return sampled_max_log(g, math.log(lo), math.log(hi), points)


def grid_has_positive(fn, lo, hi, points=1000):
    us = np.geomspace(lo, hi, points)
    return any(fn(u) > 0 for u in us)


def tilde_fd_terms(g, u, rel_h=1e-3):
    """The two products (u g')' g and u g'^2, with g', g'' from five-point
    central differences."""
    h = rel_h * u
    gm2, gm1, g0, gp1, gp2 = (g(u + k * h) for k in (-2, -1, 0, 1, 2))
    d1 = (gm2 - 8 * gm1 + 8 * gp1 - gp2) / (12 * h)
    d2 = (-gm2 + 16 * gm1 - 30 * g0 + 16 * gp1 - gp2) / (12 * h * h)
    return (d1 + u * d2) * g0, u * d1 * d1


def tilde_fd(g, u, rel_h=1e-3):
    """(u g')' g - u g'^2 by finite differences."""
    first, second = tilde_fd_terms(g, u, rel_h)
    return first - second


def tilde_fd_close(exact, g, u, rtol):
    """Whether exact matches the finite-difference value to rtol relative to
    the size of the products in the defining expression (they cancel, so
    the result itself can be far smaller)."""
    first, second = tilde_fd_terms(g, u)
    return abs(exact - (first - second)) <= rtol * (abs(first) + abs(second))


def symbolic_tilde(a, b, c, p, q, r):
    """Expand (u g')' g - u g'^2 symbolically; returns {exponent: coefficient}."""
    u = sp.symbols("u", positive=True)
    g = -sp.nsimplify(a) * u ** sp.nsimplify(p) + sp.nsimplify(b) * u ** sp.nsimplify(q) - sp.nsimplify(c) * u ** sp.nsimplify(r)
    gp = sp.diff(g, u)
    expr = sp.expand(sp.diff(u * gp, u) * g - u * gp**2)
    terms = {}
    for term in sp.Add.make_args(expr):
        coeff, power = term.as_coeff_exponent(u)
        terms[power] = terms.get(power, 0) + coeff
    return {k: v for k, v in terms.items() if v != 0}


def bisect_root(fn, lo, hi, tol=1e-14):
    flo = fn(lo)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fm = fn(mid)
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def smallest_F_zero(omega, p, q):
    """Smallest positive zero of F by bisection on F(u)/u^2 over (0, peak)."""
    h = lambda u: -omega / 2 + u ** (p - 1) / (p + 1) - u ** (q - 1) / (q + 1)
    us = np.linspace(1e-6, 1.0, 20001)
    i = next(k for k, u in enumerate(us) if h(u) > 0)
    return bisect_root(h, us[i - 1], us[i], tol=1e-15)


def F_positive_somewhere(omega, p, q):
    F = lambda u: -omega / 2 * u**2 + u ** (p + 1) / (p + 1) - u ** (q + 1) / (q + 1)
    return sampled_max_scaled(F, 2.0, 1e-3, 1e3) > 0


def omega_crit_by_bisection(p, q, tol=1e-13):
    """Largest omega for which F takes a positive value, by bisection on omega."""
    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if F_positive_somewhere(mid, p, q):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def reference_outcome(omega, p, q, n, alpha, r_max=200.0):
    """'T' (turns back), 'C' (crosses zero) or '?' by DOP853."""
    f = lambda u: -omega * u + math.copysign(abs(u) ** p, u) - math.copysign(abs(u) ** q, u)
    h = 1e-4
    y0 = [alpha - f(alpha) * h * h / (2 * n), -f(alpha) * h / n]
    ev_u = lambda r, y: y[0]
    ev_du = lambda r, y: y[1]
    ev_u.terminal = ev_du.terminal = True
    sol = solve_ivp(
        lambda r, y: [y[1], -(n - 1) / r * y[1] - f(y[0])],
        (h, r_max), y0, method="DOP853", rtol=1e-13, atol=1e-15, events=[ev_u, ev_du],
    )
    if sol.t_events[0].size:
        return "C"
    if sol.t_events[1].size:
        return "T"
    return "?"
