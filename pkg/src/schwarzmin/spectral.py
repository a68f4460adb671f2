"""Stability of the rotationally symmetric slices and profile surfaces.

The horizon slice of the three-dimensional conformally flat exterior admits
a separation of variables: each Fourier mode l gives a radial eigenvalue
problem on [R0, R] with a Robin condition v'(R0) = v(R0)/(2 R0) at the
horizon and Dirichlet at the truncation radius. In the log radius rho =
ln r with v = sqrt(r) * phi the Robin end becomes an exact Neumann end and
the problem reads

    -phi'' + (l^2 - r^2 Q(r)) phi = lam * (r^2 e^{2f}) phi,

with Q the mode potential and e^{2f} the conformal factor of the slice.
Eigenvalues are unchanged by the substitution, so negative-mode counts can
be read off the transformed problem with the generic counter in
numerics.sl. The stabilized index is the total count over modes once the
per-mode counts stop moving in R.

For profile surfaces starting at height t0 > 0 the same reduction runs in
flat arclength along the curve: the mode potential is assembled from the
ambient scalar curvature, the surface Laplacian of the conformal exponent
and the flat second fundamental form, and the free-boundary end carries the
natural Robin condition sin(theta)/(2 x) of the Liouville substitution.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq

from . import metrics
from .numerics import eigen, hermite, ode, sl

THRESHOLD_311 = 3.0 / 16.0


def _check_k(k):
    if abs(k - 1.5) < 1e-12:
        raise ValueError("k = 3/2 collapses the conformal exponent 4k/(3-2k)")


# ------------------------------------------------------- closed forms

def scalar_curvature_factor(k, m, r):
    """48(k-1) m r^{3/k} / (k (2 r^{3/k} + m r^2)^2).

    The ambient scalar curvature is this times e^{-2f}; it vanishes
    identically for k = 1 and is positive for k > 1.
    """
    _check_k(k)
    rk = r ** (3.0 / k)
    den = 2.0 * rk + m * r * r
    return 48.0 * (k - 1.0) * m * rk / (k * den * den)


def potential_Q(k, m, r):
    """Mode potential 4(4k-3) m r^{3/k} / (k (2 r^{3/k} + m r^2)^2).

    Evaluated through two algebraically equal routes (single fraction vs.
    conformal-factor split); a disagreement beyond roundoff raises, since
    it would mean the closed forms were edited inconsistently.
    """
    _check_k(k)
    rk = r ** (3.0 / k)
    den = 2.0 * rk + m * r * r
    q1 = 4.0 * (4.0 * k - 3.0) * m * rk / (k * den * den)
    inner = 1.0 + 0.5 * m / r ** (3.0 / k - 2.0)
    q2 = ((3.0 - 2.0 * k) / k) * (m / rk) / (inner * inner) \
        + 24.0 * (k - 1.0) * m * rk / (k * den * den)
    if np.any(np.abs(q1 - q2) > 1e-11 * np.maximum(np.abs(q1), 1e-300)):
        raise FloatingPointError("mode potential routes disagree")
    return q1


def weight(k, m, r):
    """Conformal factor e^{2f} on the slice: (1 + m/(2 r^{3/k-2}))^{4k/(3-2k)}."""
    _check_k(k)
    return (1.0 + 0.5 * m / r ** (3.0 / k - 2.0)) ** (4.0 * k / (3.0 - 2.0 * k))


def a_lambda(k, m, l, lam, r):
    """Full radial coefficient 1/(4r^2) - l^2/r^2 + Q + lam * weight."""
    r2 = r * r
    return 0.25 / r2 - float(l * l) / r2 + potential_Q(k, m, r) \
        + lam * weight(k, m, r)


@dataclass
class PotentialProfile:
    k: float
    m: float
    grid: np.ndarray
    Q: np.ndarray
    Rg_flat_factor: np.ndarray
    weight: np.ndarray


def potential_profile(k, m, grid):
    grid = np.asarray(grid, dtype=float)
    return PotentialProfile(float(k), float(m), grid,
                            potential_Q(k, m, grid),
                            scalar_curvature_factor(k, m, grid),
                            weight(k, m, grid))


# ------------------------------------------------- pointwise criteria

def q_bound_check(k, m, r_grid):
    """Q(r) <= 3/(4 r^2) on the grid.

    Guaranteed for k in (1, 6/5]; the tiny tolerance absorbs the exact
    equality the k = 6/5 case attains at the horizon.
    """
    r = np.asarray(r_grid, dtype=float)
    return bool(np.all(potential_Q(k, m, r) * r * r
                       <= 0.75 * (1.0 + 1e-12)))


def condition_311_value(k, m, r):
    """4 m r^{3/k+2} / (2 r^{3/k} + m r^2)^2, the quantity capped at 3/16."""
    rk = r ** (3.0 / k)
    den = 2.0 * rk + m * r * r
    return 4.0 * m * rk * r * r / (den * den)


@dataclass
class Condition311:
    holds: bool
    sup_value: float
    r_at_sup: float
    threshold: float = THRESHOLD_311

    def __bool__(self):
        return self.holds


def condition_311(k, m, r_grid=None):
    """Whether the mass expression stays below 3/16 on the exterior.

    The only stationary point of the expression on the ray is the horizon
    radius itself, where the value is exactly 1/2 for every (k, m), so with
    the default grid anchored at R0 this always reports False; the returned
    object records the sup and where it sits. Pointwise smallness away from
    the horizon (condition_311_value) is still meaningful.
    """
    if k <= 1.0:
        raise ValueError(f"k must exceed 1, got {k}")
    _check_k(k)
    r0 = metrics.horizon_radius(3, k, m)
    if r_grid is None:
        r_grid = np.geomspace(r0, 1e6 * r0, 241)
    r = np.asarray(r_grid, dtype=float)
    vals = condition_311_value(k, m, r)
    i = int(np.argmax(vals))
    best_r, best = float(r[i]), float(vals[i])

    a = 3.0 / k

    def dlog(rr):
        rk = rr ** a
        return (a + 2.0) / rr - (4.0 * a * rk / rr + 4.0 * m * rr) \
            / (2.0 * rk + m * rr * rr)

    lo, hi = float(r[0]), float(r[-1])
    # interior stationary point only if the slope actually changes sign
    if dlog(lo) * dlog(hi) < 0.0:
        rc = brentq(dlog, lo, hi)
        vc = float(condition_311_value(k, m, rc))
        if vc > best:
            best, best_r = vc, float(rc)
    return Condition311(best <= THRESHOLD_311, best, best_r)


# ------------------------------------------------- mode eigenproblems

def _rho_problem(k, m, l):
    ll = float(l * l)

    def pot(rho):
        r = np.exp(rho)
        return ll - r * r * potential_Q(k, m, r)

    def wgt(rho):
        r = np.exp(rho)
        return r * r * weight(k, m, r)

    return pot, wgt


def mode_negative_count(k, m, l, R, n_grid=2048):
    """Negative-eigenvalue count of the l-th mode problem on [R0, R]."""
    _check_k(k)
    if l < 0 or l != int(l):
        raise ValueError(f"mode index must be a nonnegative integer, got {l}")
    r0 = metrics.horizon_radius(3, k, m)
    if R <= r0:
        raise ValueError(f"truncation radius {R} inside the horizon {r0}")
    pot, wgt = _rho_problem(k, m, int(l))
    res = sl.sl_negative_count(pot, wgt, math.log(r0), math.log(R),
                               n_grid=n_grid, bc_left="neumann",
                               bc_right="dirichlet")
    if not res.converged:
        raise RuntimeError(
            f"mode count (l={l}, R={R}) unstable under grid refinement: "
            f"{res.history}")
    return res


def ground_state(k, m, l, R, n_grid=8192):
    """Smallest eigenvalue and its eigenfunction v(r) as a cubic spline."""
    _check_k(k)
    r0 = metrics.horizon_radius(3, k, m)
    pot, wgt = _rho_problem(k, m, int(l))
    rho_full = np.linspace(math.log(r0), math.log(R), n_grid + 1)
    d, e, b, nodes = sl.discretize(pot, wgt, rho_full[0], rho_full[-1],
                                   n_grid, bc_left="neumann",
                                   bc_right="dirichlet")
    lam, phi = eigen.eigenpair(d, e, b, 0)
    phi_full = np.concatenate([phi, [0.0]])
    r_full = np.exp(rho_full)
    v_full = np.sqrt(r_full) * phi_full
    return float(lam), CubicSpline(r_full, v_full)


def identity_residual(k, m, l, R, n_grid=16384):
    """Integration-by-parts defect of the computed ground mode.

    For a true eigenpair, int (v')^2 dr + v(R0)^2/(2 R0) - int A_lam v^2 dr
    vanishes; the relative size of the defect for the discrete pair is a
    direct measure of discretization quality. Evaluated in the log radius,
    where (v')^2 dr = (phi/2 + phi_rho)^2 drho and v^2 dr = r^2 phi^2 drho.
    """
    _check_k(k)
    r0 = metrics.horizon_radius(3, k, m)
    pot, wgt = _rho_problem(k, m, int(l))
    rho_full = np.linspace(math.log(r0), math.log(R), n_grid + 1)
    d, e, b, _ = sl.discretize(pot, wgt, rho_full[0], rho_full[-1],
                               n_grid, bc_left="neumann",
                               bc_right="dirichlet")
    lam, phi = eigen.eigenpair(d, e, b, 0)
    phi_full = np.concatenate([phi, [0.0]])
    dphi = np.gradient(phi_full, rho_full)
    r = np.exp(rho_full)
    kinetic = np.trapezoid((0.5 * phi_full + dphi) ** 2, rho_full)
    boundary = r0 * phi_full[0] ** 2 / (2.0 * r0)
    coeff = a_lambda(k, m, l, lam, r)
    bulk = np.trapezoid(coeff * r * r * phi_full ** 2, rho_full)
    scale = max(abs(kinetic) + abs(boundary), abs(bulk))
    return abs(kinetic + boundary - bulk) / scale


def rayleigh_quotient(k, m, test_fn, R, n_grid=8192):
    """Radial quadratic form over the weighted norm for a trial function.

    The horizon boundary term of the second fundamental form vanishes
    (totally geodesic), leaving the Robin contribution v(R0)^2/(2 R0). A
    negative value certifies at least one negative mode independently of
    the eigensolver. test_fn must vanish at r = R; its derivative is taken
    from test_fn.derivative() when available, else by differencing.
    """
    _check_k(k)
    r0 = metrics.horizon_radius(3, k, m)
    if R <= r0:
        raise ValueError(f"truncation radius {R} inside the horizon {r0}")
    r = np.exp(np.linspace(math.log(r0), math.log(R), n_grid + 1))
    v = np.asarray(test_fn(r), dtype=float)
    vmax = float(np.max(np.abs(v)))
    if vmax <= 0.0:
        raise ValueError("zero-norm test function")
    if abs(float(v[-1])) > 1e-8 * vmax:
        raise ValueError("test function must vanish at the outer radius")
    if hasattr(test_fn, "derivative"):
        vp = np.asarray(test_fn.derivative()(r), dtype=float)
    else:
        vp = np.gradient(v, r)
    num = np.trapezoid(vp * vp, r) \
        - np.trapezoid((0.25 / (r * r) + potential_Q(k, m, r)) * v * v, r) \
        + v[0] * v[0] / (2.0 * r0)
    den = np.trapezoid(weight(k, m, r) * v * v, r)
    if den <= 0.0:
        raise ValueError("zero-norm test function")
    return float(num / den)


# ------------------------------------------------- comparison floors

def riccati_f(m, rho, alpha):
    """(1/(2 rho)) (1 - alpha (2/(1 + (2 rho/m)^alpha) - 1)); f(m/2) = 1/m."""
    t = (2.0 * rho / m) ** alpha
    return (1.0 - alpha * (2.0 / (1.0 + t) - 1.0)) / (2.0 * rho)


def riccati_floor(k, m, l, r, alpha0=None):
    """Comparison function g(r) = a0 f(a0 r), a0 = m/(2 R0).

    Solves g' + g^2 = (alpha0^2 - 1)/(4 r^2) with g(R0) = 1/(2 R0), where
    alpha0^2 = 4 l^2 - 3 unless overridden.
    """
    if alpha0 is None:
        if l < 1:
            raise ValueError("l = 0 puts the comparison exponent on the "
                             "imaginary axis")
        alpha0 = math.sqrt(4.0 * l * l - 3.0)
    r0 = metrics.horizon_radius(3, k, m)
    a0 = m / (2.0 * r0)
    return a0 * riccati_f(m, a0 * r, alpha0)


def riccati_residual(k, m, l, r, alpha0=None, step=1e-6):
    """|g' + g^2 - (alpha0^2 - 1)/(4 r^2)| with g' by central differences."""
    if alpha0 is None:
        if l < 1:
            raise ValueError("l = 0 puts the comparison exponent on the "
                             "imaginary axis")
        alpha0 = math.sqrt(4.0 * l * l - 3.0)
    h = step * r
    g = riccati_floor(k, m, l, r, alpha0)
    gp = (riccati_floor(k, m, l, r + h, alpha0)
          - riccati_floor(k, m, l, r - h, alpha0)) / (2.0 * h)
    return abs(gp + g * g - (alpha0 * alpha0 - 1.0) / (4.0 * r * r))


# ---------------------------------------------------- index reports

@dataclass
class IndexReport:
    k: float
    m: float
    R_sequence: list
    counts: dict                 # (R, l) -> negative-mode count
    index: int
    l_max: int
    condition_311: bool
    supported_by_theory: bool
    note: str
    smallest: dict = field(default_factory=dict)
    identity_residual: float = None
    t0: float = None

    def per_mode(self):
        rows = []
        for (R, l) in sorted(self.counts, key=lambda key: (key[1], key[0])):
            rows.append({"l": l, "R": R, "count": self.counts[(R, l)],
                         "smallest": self.smallest.get((R, l))})
        return rows


def _theory_flags(k, m):
    if abs(k - 1.0) < 1e-12:
        return False, False, ("classical exterior: index one is known, but "
                              "k = 1 sits outside the (1, 6/5] hypothesis")
    cond = bool(condition_311(k, m)) if k > 1.0 else False
    if 1.0 < k <= 1.2 + 1e-12:
        return cond, True, "k in (1, 6/5]"
    if cond:
        return cond, True, "mass condition holds on the sampled exterior"
    return cond, False, ("outside (1, 6/5]; the mass expression reaches 1/2 "
                         "at the horizon, so the 3/16 cap fails")


def _stabilized_index(counts, R_list, l_list):
    for l in l_list:
        tail = [counts[(R, l)] for R in R_list[-2:]]
        if tail[0] != tail[1]:
            raise RuntimeError(
                f"mode l={l} count not stabilized across the last two "
                f"truncations: {tail}")
    return sum(counts[(R_list[-1], l)] for l in l_list)


def morse_index_sigma0(k, m, R_list=None, l_max=3, n_grid=2048):
    """Stabilized negative-mode total for the horizon slice.

    Counts per (R, l) must agree across the last two truncation radii, and
    modes l >= 1 are expected to contribute nothing under the theory flags;
    the index is the l-sum at the largest R. The ground mode's
    integration-by-parts defect is attached as a discretization diagnostic.
    """
    _check_k(k)
    if l_max < 3:
        raise ValueError(f"l_max must be at least 3, got {l_max}")
    r0 = metrics.horizon_radius(3, k, m)
    if R_list is None:
        R_list = [10.0 * r0, 100.0 * r0, 1000.0 * r0]
    R_list = [float(R) for R in R_list]
    if len(R_list) < 2 or any(b <= a for a, b in zip(R_list, R_list[1:])):
        raise ValueError("R_list must be increasing with at least 2 entries")
    if R_list[0] <= r0:
        raise ValueError("truncation radii must exceed the horizon radius")

    cond, supported, note = _theory_flags(k, m)
    counts, smallest = {}, {}
    for l in range(l_max + 1):
        for R in R_list:
            res = mode_negative_count(k, m, l, R, n_grid=n_grid)
            counts[(R, l)] = res.count
            smallest[(R, l)] = res.smallest
    index = _stabilized_index(counts, R_list, range(l_max + 1))
    resid = identity_residual(k, m, 0, R_list[-1])
    return IndexReport(float(k), float(m), R_list, counts, index, l_max,
                       cond, supported, note, smallest, resid)


# ------------------------------------------- profile-surface index

def _profile_kappa(metric, t, x, th):
    s = t * t + x * x
    up = metric.uprime(s)
    return -4.0 * up * (t * math.sin(th) - x * math.cos(th)) \
        + math.cos(th) / x


def _profile_kappa_sigma(metric, t, x, th, kap):
    sn, cs = math.sin(th), math.cos(th)
    s = t * t + x * x
    up = metric.uprime(s)
    us = metric.usecond(s)
    sup = t * sn - x * cs
    dk_dt = -8.0 * us * t * sup - 4.0 * up * sn
    dk_dx = -8.0 * us * x * sup + 4.0 * up * cs - cs / (x * x)
    dk_dth = -4.0 * up * (t * cs + x * sn) - sn / x
    return dk_dt * cs + dk_dx * sn + dk_dth * kap


def _arclength_curve(metric, t0, x0, x_stop, rel_tol=1e-10, abs_tol=1e-12):
    """Integrate (t, x, theta) by arclength out to x = x_stop.

    The starting direction is radial (free-boundary contact), and x is
    strictly increasing along the curve, so the stopping event is clean.
    """
    th0 = math.atan2(x0, t0)

    def rhs(sig, y):
        t, x, th = y
        if x <= 0.0:
            raise ValueError("profile crossed the axis")
        return (math.cos(th), math.sin(th), _profile_kappa(metric, t, x, th))

    res = ode.integrate(rhs, 0.0, (t0, x0, th0), 4.0 * x_stop + 100.0,
                        rel_tol=rel_tol, abs_tol=abs_tol,
                        event=lambda sig, y: y[1] - x_stop)
    if res.status != "event":
        raise RuntimeError(f"arclength integration ended with {res.status} "
                           f"before reaching x = {x_stop}")
    sig = np.array(res.ts)
    ys = np.array(res.ys)
    t, x, th = ys[:, 0], ys[:, 1], ys[:, 2]
    kap = np.array([_profile_kappa(metric, *y) for y in ys])
    kap_s = np.array([_profile_kappa_sigma(metric, y[0], y[1], y[2], kk)
                      for y, kk in zip(ys, kap)])
    cs, sn = np.cos(th), np.sin(th)
    values = np.column_stack([t, x, th])
    derivs = np.column_stack([cs, sn, kap])
    seconds = np.column_stack([-sn * kap, cs * kap, kap_s])
    return hermite.CurveInterpolant(sig, values, derivs, seconds)


def _profile_mode_potential(metric, interp, l):
    """Liouville-form mode potential along the curve, vectorized in sigma."""
    u_p = np.vectorize(metric.uprime)
    u_s = np.vectorize(metric.usecond)
    ll = float(l * l)

    def pot(sig):
        t, x, th = interp.eval_many(sig)
        cs, sn = np.cos(th), np.sin(th)
        s = t * t + x * x
        up = u_p(s)
        us = u_s(s)
        kap = -4.0 * up * (t * sn - x * cs) + cs / x
        k1 = -kap
        k2 = cs / x
        a2 = k1 * k1 + k2 * k2
        hh = k1 + k2
        s_sig = 2.0 * (x * sn + t * cs)
        s_sig2 = 2.0 * (1.0 + kap * (x * cs - t * sn))
        f_sig = up * s_sig
        f_sig2 = us * s_sig * s_sig + up * s_sig2
        lap_f = f_sig2 + (sn / x) * f_sig
        rbar = -24.0 * up - 16.0 * s * us - 8.0 * s * up * up
        w_pot = 0.5 * rbar + lap_f + a2 - 0.75 * hh * hh
        return ll / (x * x) - 0.25 * (sn / x) ** 2 \
            + 0.5 * (cs * kap / x) - w_pot

    return pot


def _profile_weight(metric, interp):
    u_f = np.vectorize(metric.u)

    def wgt(sig):
        t, x, _ = interp.eval_many(sig)
        return np.exp(2.0 * u_f(t * t + x * x))

    return wgt


def _sigma_at_radius(interp, R):
    xs = interp.values[:, 1]
    if R >= xs[-1]:
        return float(interp.nodes[-1])
    j = int(np.searchsorted(xs, R)) - 1
    j = max(0, min(j, len(xs) - 2))
    return brentq(lambda sig: interp.eval_many([sig])[1][0] - R,
                  interp.nodes[j], interp.nodes[j + 1], xtol=1e-13)


def morse_index_profile(metric, curve, l_max=3, R_list=None, n_grid=2048):
    """Stabilized negative-mode total for a profile surface.

    Re-integrates the curve in flat arclength from its free-boundary foot,
    assembles the mode potentials there, and counts with the natural Robin
    condition sin(theta_0)/(2 x_0) = 1/(2 R0) at the foot and Dirichlet at
    each truncation radius. The boundary condition at the foot is an
    assumption (the curved-contact analog is not pinned down); reports
    carry the same theory flags as the slice computation.
    """
    if metric.n != 3:
        raise ValueError(f"profile index needs n = 3, got n = {metric.n}")
    if l_max < 3:
        raise ValueError(f"l_max must be at least 3, got {l_max}")
    t0, x0 = curve.initial.t0, curve.initial.x0
    r0 = metric.r0
    if R_list is None:
        R_list = [10.0 * r0, 100.0 * r0, 1000.0 * r0]
    R_list = [float(R) for R in R_list]
    if len(R_list) < 2 or any(b <= a for a, b in zip(R_list, R_list[1:])):
        raise ValueError("R_list must be increasing with at least 2 entries")
    if R_list[0] <= x0:
        raise ValueError("truncation radii must exceed the starting radius")

    interp = _arclength_curve(metric, t0, x0, R_list[-1])
    sigma_r = {R: _sigma_at_radius(interp, R) for R in R_list}
    robin = math.sin(math.atan2(x0, t0)) / (2.0 * x0)
    wgt = _profile_weight(metric, interp)

    if metric.kind == "schwarzschild":
        cond, supported, note = _theory_flags(metric.k, metric.m)
        km = (metric.k, metric.m)
    else:
        cond, supported, note = False, False, (
            "outside the exterior family the theory flags describe")
        km = (None, None)

    counts, smallest = {}, {}
    for l in range(l_max + 1):
        pot = _profile_mode_potential(metric, interp, l)
        for R in R_list:
            res = sl.sl_negative_count(pot, wgt, 0.0, sigma_r[R],
                                       n_grid=n_grid,
                                       bc_left=("robin", robin),
                                       bc_right="dirichlet")
            if not res.converged:
                raise RuntimeError(
                    f"profile mode count (l={l}, R={R}) unstable: "
                    f"{res.history}")
            counts[(R, l)] = res.count
            smallest[(R, l)] = res.smallest
    index = _stabilized_index(counts, R_list, range(l_max + 1))
    return IndexReport(km[0], km[1], R_list, counts, index, l_max,
                       cond, supported, note, smallest, None, float(t0))


# ------------------------------------------------------- diagnostics

def catenoid_index(T=20.0, n_grid=4096):
    """Negative-mode count of the classical catenoid in Liouville form.

    The axial mode potential in arclength is (-sigma^2/4 - 3/2) /
    (1 + sigma^2)^2 with unit weight; on a long symmetric interval with
    Dirichlet ends the count is one.
    """
    def pot(sig):
        one = 1.0 + sig * sig
        return -(0.25 * sig * sig + 1.5) / (one * one)

    return sl.sl_negative_count(pot, 1.0, -T, T, n_grid=n_grid)
