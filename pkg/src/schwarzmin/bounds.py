"""Height bounds and slope envelopes for the generating curve.

Two a priori estimates are implemented. The height bound integrates the
comparison envelope

    t(mu) = t0 + int_{x0}^{mu} dm / sqrt((R0/t0)^2 (m/x0)^{2(n-2)} - 1),

whose slope at the boundary sphere matches the orthogonality condition; its
limit h0 = t(inf) is finite exactly when n >= 4 and bounds the height of
the hypersurface. For n = 3 the integrand decays like 1/mu and the bound
degenerates (heights are unbounded in the flat comparison geometry).

The slope estimate is autonomous: for n = 3 the slope w = u'(t) of the
radial graph obeys w' >= -(a e^{-u} + 1/u... ) style inequalities that
integrate to w(t) >= -tan(a e^{-v} + c1), with constants a and c1 fixed by
the data on the boundary sphere. The initial slope 1/t0 is reproduced
exactly by construction of c1.

The radicand of the envelope integrand is strictly positive at the lower
endpoint (it equals x0^2/t0^2 there), so there is no genuine singularity;
it does degenerate as t0 -> R0, and the substitution mu = x0 cosh(sigma)
keeps the first segment well conditioned in that regime.
"""

import math

from scipy.integrate import quad

from .numerics.quadrature import quad_improper

__all__ = [
    "HeightBound",
    "TanBoundParams",
    "height_bound",
    "lower_envelope",
    "envelope_gap",
    "autonomous_constants",
    "tan_bound_params",
    "c1_constant",
    "tan_bound_slope",
]

_SIGMA_KNEE = math.acosh(10.0)


class HeightBound:
    """Upper height bound h0 with its quadrature error estimate.

    h0 is +inf with the divergent flag for n = 3; finite and > t0 for
    n >= 4.
    """

    def __init__(self, h0, quad_error, divergent, params):
        self.h0 = h0
        self.quad_error = quad_error
        self.divergent = divergent
        self.params = params

    @property
    def finite(self):
        return not self.divergent

    def __repr__(self):
        n, R0, t0 = self.params
        val = "inf" if self.divergent else f"{self.h0:.12g}"
        return f"HeightBound(h0={val}, n={n}, R0={R0:g}, t0={t0:g})"


class TanBoundParams:
    """Constants (a, c1) of the autonomous slope bound -tan(a e^-v + c1).

    shifted records whether a had to be perturbed away from a tangent pole.
    """

    def __init__(self, a, c1, shifted):
        self.a = a
        self.c1 = c1
        self.shifted = shifted

    def __repr__(self):
        return (f"TanBoundParams(a={self.a!r}, c1={self.c1!r}, "
                f"shifted={self.shifted})")


def _check_params(n, R0, t0):
    if n < 3 or int(n) != n:
        raise ValueError(f"n must be an integer >= 3, got {n}")
    if not 0.0 < t0 < R0:
        raise ValueError(f"need 0 < t0 < R0, got t0={t0}, R0={R0}")


def _sigma_integrand(n, R0, t0, x0):
    # envelope integrand after mu = x0 cosh(sigma); value x0 sinh(sigma) /
    # sqrt((R0/t0)^2 cosh^{2(n-2)}(sigma) - 1), zero at sigma = 0
    C2 = (R0 / t0) ** 2
    p = 2 * (n - 2)

    def f(sigma):
        ch = math.cosh(sigma)
        return x0 * math.sinh(sigma) / math.sqrt(C2 * ch ** p - 1.0)
    return f


def _mu_integrand(n, R0, t0, x0):
    C = (R0 / t0)
    p = n - 2

    def f(mu):
        r = C * (mu / x0) ** p
        return 1.0 / math.sqrt(r * r - 1.0)
    return f


def height_bound(n, R0, t0):
    """Comparison-envelope height bound h0(n, R0, t0)."""
    _check_params(n, R0, t0)
    x0 = math.sqrt(R0 * R0 - t0 * t0)
    head, e_head = quad(_sigma_integrand(n, R0, t0, x0), 0.0, _SIGMA_KNEE,
                        epsabs=1e-13, epsrel=1e-12, limit=200)
    tail = quad_improper(_mu_integrand(n, R0, t0, x0), 10.0 * x0,
                         rel_tol=1e-11)
    if tail.divergent:
        return HeightBound(math.inf, math.inf, True, (n, R0, t0))
    return HeightBound(t0 + head + tail.value, e_head + tail.error, False,
                       (n, R0, t0))


def lower_envelope(n, R0, t0, u_target):
    """Envelope height t at radius u_target (the truncated bound integral)."""
    _check_params(n, R0, t0)
    x0 = math.sqrt(R0 * R0 - t0 * t0)
    if u_target < x0:
        raise ValueError(f"u_target={u_target} below starting radius {x0}")
    if u_target == x0:
        return t0
    sig = math.acosh(u_target / x0)
    f = _sigma_integrand(n, R0, t0, x0)
    if sig <= _SIGMA_KNEE:
        val, _ = quad(f, 0.0, sig, epsabs=1e-13, epsrel=1e-12, limit=200)
        return t0 + val
    head, _ = quad(f, 0.0, _SIGMA_KNEE, epsabs=1e-13, epsrel=1e-12,
                   limit=200)
    # remaining range in sigma is at most ~ acosh(1e9/x0) = O(20): split in
    # unit blocks so quad never sees a hard exponential profile
    val = head
    lo = _SIGMA_KNEE
    while lo < sig:
        hi = min(lo + 1.0, sig)
        seg, _ = quad(f, lo, hi, epsabs=1e-13, epsrel=1e-12, limit=200)
        val += seg
        lo = hi
    return t0 + val


def envelope_gap(curve):
    """Pointwise domination margin of the envelope over a solved profile.

    Returns (min_gap, gaps) where gaps[i] = t_env(x_i) - t_i over the
    profile's ascending samples; domination means min_gap >= -tol. The
    envelope is evaluated incrementally, one quadrature segment per sample
    spacing.
    """
    metric = curve.metric
    n = metric.n
    R0 = metric.r0
    t0 = curve.initial.t0
    x0 = curve.initial.x0
    f = _sigma_integrand(n, R0, t0, x0)
    gaps = []
    t_env = t0
    sig_prev = 0.0
    for i in range(len(curve.t)):
        x = curve.x[i]
        if not math.isfinite(x):
            break
        ratio = x / x0
        sig = math.acosh(ratio) if ratio > 1.0 else 0.0
        if sig > sig_prev:
            seg, _ = quad(f, sig_prev, sig, epsabs=1e-13, epsrel=1e-11,
                          limit=200)
            t_env += seg
            sig_prev = sig
        gaps.append(t_env - curve.t[i])
    if not gaps:
        raise ValueError("profile has no finite samples")
    return min(gaps), gaps


def autonomous_constants(metric_kind, value, t0):
    """Constant a of the autonomous slope bound (n = 3 geometries only).

    metric_kind "schwarzschild" takes value = m and returns
    max(2m/3, 2m/(3 t0^2)); metric_kind "general" takes value = alpha >= 2
    (the decay exponent) and returns max(4/t0^{2 alpha - 3}, 4).
    """
    if t0 <= 0.0:
        raise ValueError(f"t0 must be positive, got {t0}")
    if metric_kind == "schwarzschild":
        m = value
        if m <= 0.0:
            raise ValueError(f"mass must be positive, got {m}")
        return max(2.0 * m / 3.0, 2.0 * m / (3.0 * t0 * t0))
    if metric_kind == "general":
        alpha = value
        if alpha < 2.0:
            raise ValueError(f"decay exponent must be >= 2, got {alpha}")
        return max(4.0 / t0 ** (2.0 * alpha - 3.0), 4.0)
    raise ValueError(f"unknown metric_kind {metric_kind!r}")


def _pole_distance(c):
    # distance from c to the nearest odd multiple of pi/2
    k = round((c - math.pi / 2.0) / math.pi)
    return abs(c - (math.pi / 2.0 + k * math.pi))


def tan_bound_params(a, R0, t0):
    """Pair (a, c1) with c1 = -arctan(1/t0) - a/sqrt(R0^2 - t0^2).

    If c1 lands within 1e-6 of a tangent pole, a is perturbed upward by 1%
    (at most five times) and the pair recomputed; the shifted flag records
    this. The initial-slope identity -tan(a e^{-ln x0} + c1) = 1/t0 is
    preserved by the shift since c1 is recomputed from the shifted a.
    """
    if a <= 0.0:
        raise ValueError(f"a must be positive, got {a}")
    if not 0.0 < t0 < R0:
        raise ValueError(f"need 0 < t0 < R0, got t0={t0}, R0={R0}")
    x0 = math.sqrt(R0 * R0 - t0 * t0)
    shifted = False
    for _ in range(6):
        c1 = -math.atan(1.0 / t0) - a / x0
        if _pole_distance(c1) > 1e-6:
            return TanBoundParams(a, c1, shifted)
        a *= 1.01
        shifted = True
    raise ValueError("could not shift a away from the tangent pole")


def c1_constant(a, R0, t0):
    """The constant c1, after any pole-avoiding shift of a."""
    return tan_bound_params(a, R0, t0).c1


def tan_bound_slope(a, c1, v_tilde):
    """Slope bound -tan(a e^{-v} + c1) of the comparison function."""
    arg = a * math.exp(-v_tilde) + c1
    if _pole_distance(arg) < 1e-9:
        raise ValueError(f"tangent argument {arg} too close to a pole")
    return -math.tan(arg)
