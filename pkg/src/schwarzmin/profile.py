"""Generating curves of rotationally symmetric free boundary minimal
hypersurfaces.

The curve (t, x(t)) solves

    x'' = [-2(n-1) u'(x^2+t^2) (x' t - x) + (n-2)/x] (1 + x'^2)

with initial data on the boundary sphere: x(t0) = sqrt(r0^2 - t0^2),
x'(t0) = x(t0)/t0, which is exactly orthogonal intersection. The slope is
strictly increasing (the support function Psi = t x' - x stays nonnegative,
so x'' > 0), and the solver follows the curve in two stages: as a graph over
t while the slope is moderate, then in logarithmic radius u = ln x with
q = dt/du once it steepens.

What happens in the far field depends on the metric and dimension, and all
outcomes are classified rather than assumed:

  - t reaches the height budget: "reached_tmax";
  - t converges while x runs to infinity (the hypersurface approaches a
    horizontal hyperplane): "blowup" with the extrapolated plane height
    t_star;
  - the radius budget is exhausted with t still moving: "reached_xmax".

For the Schwarzschild family the slope in fact blows up at finite radius:
the curve passes through a vertical tangent (recorded in `fold`) and t
decreases beyond it, so the hyperplane, when it exists, is approached from
above and t_star lies below the peak height sup_t. The `samples` arrays
cover the ascending branch, on which t is strictly increasing and every
invariant of the graph formulation holds; the raw far-field trace (including
the fold and beyond) is kept in `far_field`.
"""

import math

import numpy as np

from . import _kernels
from .metrics import ConformalMetric, KIND_CUSTOM

__all__ = [
    "InitialData",
    "Termination",
    "ProfileCurve",
    "initial_conditions",
    "rhs",
    "solve_profile",
    "psi_diagnostic",
    "PsiSeries",
    "convergence_to_sigma0",
    "log_log_slope",
]


class InitialData:
    """Starting point (t0, x0) and slope xp0 for the generating curve."""

    def __init__(self, t0, x0, xp0):
        self.t0 = float(t0)
        self.x0 = float(x0)
        self.xp0 = float(xp0)

    def __repr__(self):
        return f"InitialData(t0={self.t0!r}, x0={self.x0!r}, xp0={self.xp0!r})"


class Termination:
    """How a solve ended.

    kind is one of "reached_tmax", "blowup", "reached_xmax", "step_failure".
    blowup carries t_star (asymptotic plane height) and x_at_switch;
    step_failure carries t_fail.
    """

    def __init__(self, kind, t_star=None, x_at_switch=None, t_fail=None,
                 detail=None):
        self.kind = kind
        self.t_star = t_star
        self.x_at_switch = x_at_switch
        self.t_fail = t_fail
        self.detail = detail

    def __repr__(self):
        extra = ""
        if self.t_star is not None:
            extra = f", t_star={self.t_star:.9g}"
        if self.t_fail is not None:
            extra = f", t_fail={self.t_fail:.9g}"
        if self.detail:
            extra += f", {self.detail}"
        return f"Termination({self.kind}{extra})"


class ProfileCurve:
    def __init__(self, metric, initial, t, x, xp, log_x, termination,
                 parametrization_switch, x_at_switch, fold, sup_t, far_field,
                 richardson, backend):
        self.metric = metric
        self.initial = initial
        self.t = t
        self.x = x
        self.xp = xp
        self.log_x = log_x
        self.termination = termination
        self.parametrization_switch = parametrization_switch
        self.x_at_switch = x_at_switch
        self.fold = fold            # (t_peak, x_peak) or None
        self.sup_t = sup_t
        self.far_field = far_field  # dict(u=, t=, q=) or None
        self.richardson = richardson  # (t_star, t_star_tail, spread) or None
        self.backend = backend

    @property
    def samples(self):
        """Ascending-branch samples as an (N, 3) array of (t, x, x')."""
        return np.column_stack([self.t, self.x, self.xp])

    def __len__(self):
        return len(self.t)

    def __repr__(self):
        return (f"ProfileCurve({self.metric.label}, t0={self.initial.t0:g}, "
                f"{len(self.t)} samples, {self.termination!r})")


def initial_conditions(metric, t0):
    """Free-boundary data on the sphere of radius metric.r0.

    The curve leaves (t0, sqrt(r0^2-t0^2)) along the radial direction, which
    is the orthogonality condition; equivalently Psi(t0) = 0.
    """
    r0 = metric.r0
    if not 1e-6 * r0 < t0 < (1.0 - 1e-6) * r0:
        raise ValueError(
            f"t0 must lie in (0, r0) away from the degenerate ends; "
            f"got t0={t0} with r0={r0}")
    x0 = math.sqrt(r0 * r0 - t0 * t0)
    return InitialData(t0, x0, x0 / t0)


def rhs(metric, t, x, xp):
    """Second derivative x'' of the generating curve at (t, x, x')."""
    if x <= 0.0:
        raise ValueError(f"radius must be positive, got x={x}")
    n = metric.n
    s = x * x + t * t
    up = metric.uprime(s)
    return (-2.0 * (n - 1.0) * up * (xp * t - x) + (n - 2.0) / x) \
        * (1.0 + xp * xp)


def solve_profile(metric, t0=None, t_max=None, x_max=None, *, initial=None,
                  rel_tol=1e-10, abs_tol=1e-12, slope_switch=1e3,
                  max_step=math.inf, max_step_far=0.25, max_steps=2000000):
    """Integrate the generating curve and classify its global behavior.

    Either t0 (horizon initial data) or an explicit `initial` record must be
    given; the latter bypasses the free-boundary construction and exists for
    cross-checks against closed-form curves.
    """
    if initial is None:
        if t0 is None:
            raise ValueError("need t0 or explicit initial data")
        initial = initial_conditions(metric, t0)
    if t_max is None:
        t_max = 1e3 * metric.r0
    if x_max is None:
        x_max = 1e9 * metric.r0
    if t_max <= initial.t0:
        raise ValueError(f"t_max={t_max} must exceed t0={initial.t0}")
    if x_max <= initial.x0:
        raise ValueError(f"x_max={x_max} must exceed x0={initial.x0}")
    u_max = math.log(x_max)
    upf = metric.uprime if metric.kind_id == KIND_CUSTOM else None
    p1, p2 = metric.params

    (status1, status2, ts1, xs1, ps1, us2, ts2, qs2) = \
        _kernels.solve_profile_raw(
            metric.n, metric.kind_id, p1, p2,
            initial.t0, initial.x0, initial.xp0,
            t_max, u_max, slope_switch, rel_tol, abs_tol,
            max_step, max_step_far, max_steps, uprime=upf)

    K = _kernels
    switched = status1 == K.S1_SWITCH
    switch_t = ts1[-1] if switched else None
    x_at_switch = xs1[-1] if switched else None

    # fold: first sign change of q in the far field
    fold = None
    n_ascending = len(ts2)
    if switched:
        for i in range(len(qs2)):
            if qs2[i] <= 0.0:
                n_ascending = i
                if i > 0:
                    du = (us2[i] - us2[i - 1]) * qs2[i - 1] \
                        / (qs2[i - 1] - qs2[i])
                    u_peak = us2[i - 1] + du
                    t_peak = ts2[i - 1] + 0.5 * qs2[i - 1] * du
                else:
                    u_peak = us2[0]
                    t_peak = ts2[0]
                fold = (t_peak, math.exp(u_peak) if u_peak < 700 else
                        math.inf)
                break

    sup_t = max(ts1)
    if ts2:
        sup_t = max(sup_t, max(ts2))
    if fold is not None:
        sup_t = max(sup_t, fold[0])

    # far-field t convergence and plane-height extrapolation
    richardson = None
    t_converged = False
    if switched and len(us2) >= 2:
        t_end = ts2[-1]
        q_end = qs2[-1]
        scale = max(1.0, abs(t_end))
        stalled = status2 == K.S2_STALL
        if stalled or abs(q_end) <= 1e-5 * scale:
            t_converged = True
            n = metric.n
            if n >= 4:
                rho = 10.0 ** (-(n - 3.0))
                u_end = us2[-1]
                t_back = float(np.interp(u_end - math.log(10.0), us2, ts2))
                t_star = (t_end - rho * t_back) / (1.0 - rho)
                t_tail = t_end + q_end / (n - 3.0)
                richardson = (t_star, t_tail, abs(t_star - t_tail))
            else:
                richardson = (t_end, t_end, 0.0)

    if status1 == K.S1_STEPFAIL or status2 == K.S2_STEPFAIL:
        where = ts2[-1] if ts2 else ts1[-1]
        termination = Termination("step_failure", t_fail=where)
    elif status1 == K.S1_MAXSTEPS or status2 == K.S2_MAXSTEPS:
        where = ts2[-1] if ts2 else ts1[-1]
        termination = Termination("step_failure", t_fail=where,
                                  detail="step budget exhausted")
    elif status1 == K.S1_TMAX or status2 == K.S2_TMAX:
        termination = Termination("reached_tmax")
    elif status2 in (K.S2_UMAX, K.S2_STALL) and t_converged:
        termination = Termination("blowup", t_star=richardson[0],
                                  x_at_switch=x_at_switch)
    else:
        # radius budget exhausted with t still on the move (S1_XMAX, or
        # far-field run whose t has not settled, e.g. the post-fold descent)
        termination = Termination("reached_xmax")

    # ascending-branch samples: stage 1, then far-field samples before the
    # fold; drop the duplicated switch point and enforce strict monotonicity
    t_parts = [np.asarray(ts1)]
    x_parts = [np.asarray(xs1)]
    p_parts = [np.asarray(ps1)]
    with np.errstate(over="ignore"):
        lx_parts = [np.log(np.asarray(xs1))]
        if switched and n_ascending > 1:
            u_arr = np.asarray(us2[1:n_ascending])
            t_arr = np.asarray(ts2[1:n_ascending])
            q_arr = np.asarray(qs2[1:n_ascending])
            x_arr = np.exp(u_arr)
            t_parts.append(t_arr)
            x_parts.append(x_arr)
            p_parts.append(x_arr / q_arr)
            lx_parts.append(u_arr)
    t_all = np.concatenate(t_parts)
    x_all = np.concatenate(x_parts)
    p_all = np.concatenate(p_parts)
    lx_all = np.concatenate(lx_parts)
    keep = np.ones(len(t_all), dtype=bool)
    keep[1:] = np.diff(t_all) > 0.0
    # a non-increasing t can only appear vanishingly close to the fold
    keep = np.logical_and.accumulate(keep)

    far_field = None
    if switched:
        far_field = {"u": np.asarray(us2), "t": np.asarray(ts2),
                     "q": np.asarray(qs2)}

    # custom metrics carry Python closures, which only the Python twin runs
    backend = "python" if upf is not None else _kernels.backend_name()
    return ProfileCurve(
        metric, initial, t_all[keep], x_all[keep], p_all[keep], lx_all[keep],
        termination, switch_t, x_at_switch, fold, sup_t, far_field,
        richardson, backend)


class PsiSeries:
    def __init__(self, t, psi, psi_prime, min_psi, min_psi_prime):
        self.t = t
        self.psi = psi
        self.psi_prime = psi_prime
        self.min_psi = min_psi
        self.min_psi_prime = min_psi_prime


def psi_diagnostic(curve):
    """Support-function series Psi = t x' - x and Psi' = t x'' over samples.

    Psi(t0) = 0 is the free-boundary condition; Psi' > 0 pins the sign
    structure that makes the slope increase. Minima are taken over t > t0
    and over samples where the quantities are finite (far-field radii can
    overflow the x column; the underlying math is still sound there).
    """
    metric = curve.metric
    t = curve.t
    psi = np.empty(len(t))
    psip = np.empty(len(t))
    for i in range(len(t)):
        x = curve.x[i]
        xp = curve.xp[i]
        if not (math.isfinite(x) and math.isfinite(xp)):
            psi[i] = math.inf
            psip[i] = math.nan
            continue
        psi[i] = t[i] * xp - x
        psip[i] = t[i] * rhs(metric, t[i], x, xp)
    after = t > curve.initial.t0
    finite = np.isfinite(psi) & after
    finite_p = np.isfinite(psip) & after
    min_psi = float(np.min(psi[finite])) if np.any(finite) else math.nan
    min_psip = float(np.min(psip[finite_p])) if np.any(finite_p) else math.nan
    return PsiSeries(t, psi, psip, min_psi, min_psip)


def convergence_to_sigma0(metric, t0_list, t_max=None, x_max=None):
    """Total heights sup_t for a family of starting heights.

    Meant for n >= 4, where each hypersurface is bounded above; the table
    quantifies the collapse onto the totally geodesic slice as t0 -> 0.
    Returns a list of (t0, height) rows in the order given.
    """
    if metric.n < 4:
        raise ValueError("height table needs n >= 4 (bounded surfaces)")
    rows = []
    for t0 in t0_list:
        curve = solve_profile(metric, t0, t_max=t_max, x_max=x_max)
        rows.append((t0, curve.sup_t))
    return rows


def log_log_slope(curve):
    """Empirical d(ln x)/d(ln t) over the last decade of ascending samples.

    A growth-rate report, not an assertion: returns None when the ascending
    branch spans less than a factor e in x or t is not positive throughout.
    """
    t = curve.t
    lx = curve.log_x
    if len(t) < 2 or t[0] <= 0.0:
        return None
    span = lx[-1] - lx[0]
    if span < 1.0:
        return None
    lo = np.searchsorted(lx, lx[-1] - min(span, math.log(10.0)))
    if lo >= len(t) - 1:
        lo = len(t) - 2
    dlt = math.log(t[-1]) - math.log(t[lo])
    if dlt <= 0.0:
        return None
    return (lx[-1] - lx[lo]) / dlt
