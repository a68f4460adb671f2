"""Curvature data along profile curves, flat and conformal.

Flat principal curvatures of the revolution hypersurface generated by
(t, x(t)): k1 = -x''/(1+x'^2)^{3/2} in the profile direction and
k_rot = 1/(x sqrt(1+x'^2)) with multiplicity n-2. Under the conformal
change gbar = e^{2h} delta with h = u(|y|^2) the curvatures transform as
kbar_i = e^{-h}(k_i - 2 u' <y,N>), and minimality of the solved curve is
exactly Hbar = 0; we evaluate that residual rather than assume it.

The total-curvature report (n = 3) integrates |A|^2 - H^2/2 against the
flat area element, and independently |A_gbar|^2 against the gbar area
element; the two agree identically for minimal surfaces, which makes the
pair a discretization cross-check. The ascending (graph) part uses quintic
Hermite panels with Gauss-Legendre nodes on the solver samples; past the
parametrization switch the integrand is evaluated on the far-field trace
in log radius, where the tangent angle form stays finite through the
vertical point.
"""

import math

import numpy as np

from .numerics.hermite import CurveInterpolant
from .profile import rhs
from . import bounds as _bounds
from .metrics import KIND_SCHWARZSCHILD

__all__ = [
    "CurvatureSample",
    "CurvatureReport",
    "flat_curvatures",
    "support_function",
    "conformal_curvatures",
    "curvature_samples",
    "total_curvature",
    "majorant_check",
]

TWO_PI = 2.0 * math.pi


class CurvatureSample:
    def __init__(self, t, x, xp, xpp, k1, k_rot, support, H, kbar, Hbar):
        self.t = t
        self.x = x
        self.xp = xp
        self.xpp = xpp
        self.k1 = k1
        self.k_rot = k_rot
        self.support = support
        self.H = H
        self.kbar = kbar
        self.Hbar = Hbar

    def __repr__(self):
        return (f"CurvatureSample(t={self.t:.6g}, k1={self.k1:.6g}, "
                f"k_rot={self.k_rot:.6g}, Hbar={self.Hbar:.3g})")


class CurvatureReport:
    """Total curvature of a solved n=3 profile, two ways.

    flat_total and conf_total are the two integral routes; partials is the
    cumulative flat integral at increasing t cutoffs over the ascending
    branch; tail_estimate bounds what lies beyond the integrated range.
    """

    def __init__(self, flat_total, conf_total, partials, cutoffs, converged,
                 tail_estimate):
        self.flat_total = flat_total
        self.conf_total = conf_total
        self.partials = partials
        self.cutoffs = cutoffs
        self.converged = converged
        self.tail_estimate = tail_estimate

    def __repr__(self):
        return (f"CurvatureReport(flat={self.flat_total:.9g}, "
                f"conf={self.conf_total:.9g}, converged={self.converged})")


def flat_curvatures(t, x, xp, xpp, n):
    """Principal curvatures (k1, k_rot) of the flat revolution surface."""
    if x <= 0.0:
        raise ValueError(f"radius must be positive, got x={x}")
    g = math.hypot(1.0, xp)
    k1 = -((xpp / g) / g) / g
    k_rot = 1.0 / (x * g)
    return k1, k_rot


def support_function(t, x, xp):
    """Flat support function <y, N> = (xp t - x)/sqrt(1 + xp^2)."""
    g = math.hypot(1.0, xp)
    return (xp * t - x) / g


def conformal_curvatures(metric, sample):
    """Curvature record at sample = (t, x, xp), with x'' from the ODE.

    kbar has n-1 entries: the profile curvature followed by the n-2 equal
    rotational ones.
    """
    t, x, xp = sample
    n = metric.n
    xpp = rhs(metric, t, x, xp)
    k1, k_rot = flat_curvatures(t, x, xp, xpp, n)
    supp = support_function(t, x, xp)
    s = x * x + t * t
    eh = math.exp(-metric.u(s))
    up = metric.uprime(s)
    shift = 2.0 * up * supp
    kbar = [eh * (k1 - shift)] + [eh * (k_rot - shift)] * (n - 2)
    H = k1 + (n - 2) * k_rot
    Hbar = eh * (H - 2.0 * (n - 1) * up * supp)
    return CurvatureSample(t, x, xp, xpp, k1, k_rot, supp, H, kbar, Hbar)


def curvature_samples(metric, curve):
    """Curvature records along a solved curve's ascending samples."""
    out = []
    for i in range(len(curve.t)):
        if not math.isfinite(curve.x[i]) or not math.isfinite(curve.xp[i]):
            break
        out.append(conformal_curvatures(
            metric, (curve.t[i], curve.x[i], curve.xp[i])))
    return out


def _graph_integrands(metric):
    # integrand pair (flat, conf) against dt, in the graph parametrization
    n = metric.n

    def fun(t, y):
        x, xp = y
        xpp = rhs(metric, t, x, xp)
        k1, k2 = flat_curvatures(t, x, xp, xpp, n)
        supp = support_function(t, x, xp)
        s = x * x + t * t
        up = metric.uprime(s)
        area = x * math.hypot(1.0, xp) * TWO_PI
        H = k1 + k2
        flat = (k1 * k1 + k2 * k2 - 0.5 * H * H) * area
        emh = math.exp(-metric.u(s))
        kb1 = emh * (k1 - 2.0 * up * supp)
        kb2 = emh * (k2 - 2.0 * up * supp)
        conf = (kb1 * kb1 + kb2 * kb2) / (emh * emh) * area
        return flat, conf
    return fun


def _far_point(metric, uu, t, q):
    # (flat, conf) integrands against du at a far-field point; tangent
    # angle form, finite through the vertical point
    n = metric.n
    x = math.exp(uu)
    g = math.hypot(q, x)
    sint = x / g
    cost = q / g
    s = x * x + t * t
    up = metric.uprime(s)
    kappa = -2.0 * (n - 1) * up * (t * sint - x * cost) \
        + (n - 2) * cost / x
    k1 = -kappa
    k2 = cost / x
    supp = t * sint - x * cost
    H = k1 + k2
    area = x * g * TWO_PI  # ds = g du
    flat = (k1 * k1 + k2 * k2 - 0.5 * H * H) * area
    emh = math.exp(-metric.u(s))
    kb1 = emh * (k1 - 2.0 * up * supp)
    kb2 = emh * (k2 - 2.0 * up * supp)
    conf = (kb1 * kb1 + kb2 * kb2) / (emh * emh) * area
    return flat, conf


def _far_rhs(metric, uu, t, q):
    # dq/du of the log-radius reduction, for Hermite panel data
    n = metric.n
    x = math.exp(uu)
    e2 = math.exp(-2.0 * uu)
    s = x * x + t * t
    u2 = metric.uprime(s) * x * x
    one = 1.0 + q * q * e2
    return (-(n - 3.0) * q - (n - 2.0) * q * q * q * e2
            + 2.0 * (n - 1.0) * u2 * (t - q) * one)


def total_curvature(metric, curve=None, *, t=None, x=None, xp=None,
                    xpp=None):
    """Total-curvature report for n = 3.

    Pass a solved curve (x'' is then reconstructed from the ODE, and the
    far-field trace past the parametrization switch is included), or raw
    sample arrays t/x/xp/xpp for diagnostics on synthetic profiles that do
    not solve the equation.
    """
    if metric.n != 3:
        raise ValueError("total curvature is defined for n = 3 surfaces")

    if curve is not None:
        t_sw = curve.parametrization_switch
        if t_sw is None:
            mask = np.ones(len(curve.t), dtype=bool)
        else:
            mask = curve.t <= t_sw
        tg = curve.t[mask]
        xg = curve.x[mask]
        pg = curve.xp[mask]
        cg = np.array([rhs(metric, tg[i], xg[i], pg[i])
                       for i in range(len(tg))])
        t0 = curve.initial.t0
    else:
        if any(v is None for v in (t, x, xp, xpp)):
            raise ValueError("need a curve or full t/x/xp/xpp arrays")
        tg = np.asarray(t, dtype=float)
        xg = np.asarray(x, dtype=float)
        pg = np.asarray(xp, dtype=float)
        cg = np.asarray(xpp, dtype=float)
        t0 = tg[0]
    if len(tg) < 3:
        raise ValueError("curve too short to assess convergence")

    fun = _graph_integrands(metric)
    interp = CurveInterpolant(
        tg, np.column_stack([xg, pg]), np.column_stack([pg, cg]),
        np.column_stack([cg, _third_derivative(metric, tg, xg, pg, cg)]))

    def flat_fun(s, y):
        return fun(s, y)[0]

    def conf_fun(s, y):
        return fun(s, y)[1]

    t_end = tg[-1]
    cutoffs = sorted({t_end} | {t_end * 10.0 ** (-j) for j in (1, 2, 3)
                               if t_end * 10.0 ** (-j) > t0 * (1.0 + 1e-12)})
    partials = [interp.integrate(flat_fun, s_hi=c) for c in cutoffs]
    flat_total = partials[-1]
    conf_total = interp.integrate(conf_fun)

    tail = math.inf
    if curve is not None and curve.far_field is not None:
        ff = curve.far_field
        u_arr = ff["u"]
        t_arr = ff["t"]
        q_arr = ff["q"]
        if len(u_arr) >= 2:
            f2 = np.array([_far_rhs(metric, u_arr[i], t_arr[i], q_arr[i])
                           for i in range(len(u_arr))])
            f2p = np.gradient(f2, u_arr)
            far = CurveInterpolant(
                u_arr, np.column_stack([t_arr, q_arr]),
                np.column_stack([q_arr, f2]), np.column_stack([f2, f2p]))
            flat_total += far.integrate(
                lambda uu, y: _far_point(metric, uu, y[0], y[1])[0])
            conf_total += far.integrate(
                lambda uu, y: _far_point(metric, uu, y[0], y[1])[1])
        fl = np.array([_far_point(metric, u_arr[i], t_arr[i], q_arr[i])[0]
                       for i in range(len(u_arr))])
        tail = _tail_power_estimate(u_arr, fl)
    elif len(cutoffs) >= 2:
        tail = partials[-1] - partials[-2]

    scale = max(abs(flat_total), 1e-300)
    converged = tail < 1e-4 * scale
    return CurvatureReport(flat_total, conf_total, partials, cutoffs,
                           converged, tail)


def _third_derivative(metric, t, x, p, c):
    # x''' from differentiating the right-hand side along the curve; used
    # only to sharpen the quintic panels for the slope channel
    n = metric.n
    out = np.empty(len(t))
    for i in range(len(t)):
        s = x[i] * x[i] + t[i] * t[i]
        up = metric.uprime(s)
        us = _usecond(metric, s)
        psi = p[i] * t[i] - x[i]
        G = -2.0 * (n - 1) * up * psi + (n - 2) / x[i]
        gt = -2.0 * (n - 1) * (us * 2.0 * t[i] * psi + up * p[i])
        gx = -2.0 * (n - 1) * (us * 2.0 * x[i] * psi - up) \
            - (n - 2) / (x[i] * x[i])
        gp = -2.0 * (n - 1) * up * t[i]
        one = 1.0 + p[i] * p[i]
        out[i] = one * (gt + gx * p[i] + gp * c[i]) + 2.0 * p[i] * c[i] * G
    return out


def _usecond(metric, s):
    if metric.usecond is not None:
        return metric.usecond(s)
    h = 1e-6 * s
    return (metric.uprime(s + h) - metric.uprime(s - h)) / (2.0 * h)


def _tail_power_estimate(u_arr, f_arr):
    # log-slope tail bound as in the improper quadrature driver
    if len(u_arr) < 4:
        return math.inf
    u_end = u_arr[-1]
    span = min(math.log(10.0), (u_end - u_arr[0]) / 2.0)
    i_mid = int(np.searchsorted(u_arr, u_end - span))
    i_mid = min(max(i_mid, 0), len(u_arr) - 2)
    f_end = abs(f_arr[-1])
    f_mid = abs(f_arr[i_mid])
    if f_end == 0.0:
        return 0.0
    if f_mid <= f_end:
        return math.inf
    p = math.log(f_mid / f_end) / (u_end - u_arr[i_mid])
    if p < 0.1:
        return math.inf
    return f_end / p


def majorant_check(curve, x_floor=1.0):
    """Sampled curvature majorants for n = 3 Schwarzschild curves.

    Returns (slack1_min, slack2_min): slack1 is the profile-curvature bound
    x'' <= [a (1+x'^2)^{1/2}/x^4 + 1/x] (1+x'^2) on samples with x > x_floor
    (meaningful for k = 1), slack2 the universal x x'' >= 1 + x'^2. Both
    minima should be >= -tolerance on solved curves; callers decide whether
    to assert (k = 1) or merely report (k > 1).
    """
    metric = curve.metric
    if metric.n != 3:
        raise ValueError("majorants are stated for n = 3")
    if metric.kind != "schwarzschild":
        raise ValueError("majorants need the schwarzschild family")
    m = metric.m
    t0 = curve.initial.t0
    a = _bounds.autonomous_constants("schwarzschild", m, t0)
    slack1 = math.inf
    slack2 = math.inf
    for i in range(len(curve.t)):
        x = curve.x[i]
        p = curve.xp[i]
        if not (math.isfinite(x) and math.isfinite(p)) or abs(p) > 1e50:
            break
        t = curve.t[i]
        c = rhs(metric, t, x, p)
        one = 1.0 + p * p
        slack2 = min(slack2, x * c - one)
        if x > x_floor:
            bound = (a * one ** 1.5 / x ** 4 + one / x)
            slack1 = min(slack1, bound - c)
    return slack1, slack2
