"""Pure-Python kernel twin.

Same algorithms, same expression order, same libm entry points as the
compiled twin in _core.pyx, so that both produce bit-identical floats on the
same machine. Any edit here must be mirrored there (test_kernels_parity
enforces it on the built extension).

Contents: the two-stage profile integration (graph over height, then
log-radius far field) with an embedded Dormand-Prince 5(4) pair, and the
Sturm negative-pivot counter for generalized tridiagonal pencils.
"""

from math import exp, fabs, isfinite, log, sqrt

BACKEND = "python"

# stage-1 status
S1_TMAX = 0
S1_SWITCH = 1
S1_STEPFAIL = 2
S1_MAXSTEPS = 3
S1_XMAX = 4
# stage-2 status
S2_NOTRUN = 0
S2_TMAX = 1
S2_UMAX = 2
S2_STALL = 3
S2_STEPFAIL = 4
S2_MAXSTEPS = 5

# metric kind ids (mirror metrics.py)
_FLAT = 0
_SCHWARZSCHILD = 1
_CYLINDER = 2
_BETA = 3
_CUSTOM = 4

# Dormand-Prince 5(4) coefficients
_A21 = 1.0 / 5.0
_A31 = 3.0 / 40.0
_A32 = 9.0 / 40.0
_A41 = 44.0 / 45.0
_A42 = -56.0 / 15.0
_A43 = 32.0 / 9.0
_A51 = 19372.0 / 6561.0
_A52 = -25360.0 / 2187.0
_A53 = 64448.0 / 6561.0
_A54 = -212.0 / 729.0
_A61 = 9017.0 / 3168.0
_A62 = -355.0 / 33.0
_A63 = 46732.0 / 5247.0
_A64 = 49.0 / 176.0
_A65 = -5103.0 / 18656.0
_B1 = 35.0 / 384.0
_B3 = 500.0 / 1113.0
_B4 = 125.0 / 192.0
_B5 = -2187.0 / 6784.0
_B6 = 11.0 / 84.0
_E1 = 71.0 / 57600.0
_E3 = -71.0 / 16695.0
_E4 = 71.0 / 1920.0
_E5 = -17253.0 / 339200.0
_E6 = 22.0 / 525.0
_E7 = -1.0 / 40.0


def _uprime(kind, p1, p2, s, upf):
    # p1, p2: (m, n/(2k)) for schwarzschild, (beta, -) for beta
    if kind == _SCHWARZSCHILD:
        return -p1 / (2.0 * exp(p2 * log(s)) + p1 * s)
    if kind == _CYLINDER:
        return -0.5 / s
    if kind == _BETA:
        return -p1 / (1.0 + s)
    if kind == _FLAT:
        return 0.0
    return upf(s)


def _u2(kind, p1, p2, u, sig, e2, upf):
    # u'(s) * x^2 without forming x^2; sig = 1 + t^2 e^{-2u}, s = e^{2u} sig
    if kind == _SCHWARZSCHILD:
        w = (2.0 * p2 - 2.0) * u
        sige = exp(p2 * log(sig))
        if w >= 0.0:
            ew = exp(-w)
            return -(p1 * ew) / (2.0 * sige + p1 * sig * ew)
        return -p1 / (2.0 * exp(w) * sige + p1 * sig)
    if kind == _CYLINDER:
        return -0.5 / sig
    if kind == _BETA:
        return -p1 / (e2 + sig)
    if kind == _FLAT:
        return 0.0
    x2 = exp(2.0 * u)
    return upf(x2 * sig) * x2


def _rhs1(n, kind, p1, p2, t, x, p, upf):
    # graph parametrization: returns d(x')/dt, i.e. x''
    s = x * x + t * t
    up = _uprime(kind, p1, p2, s, upf)
    return (-2.0 * (n - 1.0) * up * (p * t - x) + (n - 2.0) / x) * (1.0 + p * p)


def _rhs2(n, kind, p1, p2, u, t, q, upf):
    # log-radius parametrization: returns dq/du with q = dt/du
    e2 = exp(-2.0 * u)
    sig = 1.0 + t * t * e2
    u2 = _u2(kind, p1, p2, u, sig, e2, upf)
    one = 1.0 + q * q * e2
    return (-(n - 3.0) * q - (n - 2.0) * q * q * q * e2
            + 2.0 * (n - 1.0) * u2 * (t - q) * one)


def solve_profile_raw(n, kind, p1, p2, t0, x0, xp0, t_max, u_max,
                      slope_switch, rel_tol, abs_tol, max_step, max_step_far,
                      max_steps, uprime=None):
    """Two-stage integration of the generating-curve ODE.

    Stage 1 integrates (x, x') over t until the slope reaches slope_switch,
    then stage 2 integrates (t, q = dt/d ln x) over u = ln x. Budgets: t_max
    in both stages, u_max (log-radius) in stage 2, exp(u_max) as the stage-1
    radius cap when representable.

    Returns (status1, status2, ts1, xs1, ps1, us2, ts2, qs2); the stage lists
    include their initial points. No classification happens here.
    """
    n = float(n)
    ts1 = [t0]
    xs1 = [x0]
    ps1 = [xp0]
    us2 = []
    ts2 = []
    qs2 = []
    x_cap = exp(u_max) if u_max < 700.0 else float("inf")

    status1 = -1
    status2 = S2_NOTRUN
    steps = 0
    t = t0
    x = x0
    p = xp0
    tm_scale = fabs(t_max)
    if tm_scale < 1.0:
        tm_scale = 1.0
    t_hit = t_max - 1e-12 * tm_scale
    h = max_step if max_step < 1e-3 else 1e-3
    if t + h > t_max:
        h = t_max - t
    while True:
        if p >= slope_switch:
            status1 = S1_SWITCH
            break
        if t >= t_hit:
            status1 = S1_TMAX
            break
        if x >= x_cap:
            status1 = S1_XMAX
            break
        if steps >= max_steps:
            status1 = S1_MAXSTEPS
            break
        scale = fabs(t)
        if scale < 1.0:
            scale = 1.0
        if h < 1e-14 * scale:
            status1 = S1_STEPFAIL
            break
        steps += 1

        k1x = p
        k1p = _rhs1(n, kind, p1, p2, t, x, p, uprime)
        x2 = x + h * (_A21 * k1x)
        p2_ = p + h * (_A21 * k1p)
        k2x = p2_
        k2p = _rhs1(n, kind, p1, p2, t + 0.2 * h, x2, p2_, uprime)
        x3 = x + h * (_A31 * k1x + _A32 * k2x)
        p3 = p + h * (_A31 * k1p + _A32 * k2p)
        k3x = p3
        k3p = _rhs1(n, kind, p1, p2, t + 0.3 * h, x3, p3, uprime)
        x4 = x + h * (_A41 * k1x + _A42 * k2x + _A43 * k3x)
        p4 = p + h * (_A41 * k1p + _A42 * k2p + _A43 * k3p)
        k4x = p4
        k4p = _rhs1(n, kind, p1, p2, t + 0.8 * h, x4, p4, uprime)
        x5 = x + h * (_A51 * k1x + _A52 * k2x + _A53 * k3x + _A54 * k4x)
        p5 = p + h * (_A51 * k1p + _A52 * k2p + _A53 * k3p + _A54 * k4p)
        k5x = p5
        k5p = _rhs1(n, kind, p1, p2, t + (8.0 / 9.0) * h, x5, p5, uprime)
        x6 = x + h * (_A61 * k1x + _A62 * k2x + _A63 * k3x + _A64 * k4x
                      + _A65 * k5x)
        p6 = p + h * (_A61 * k1p + _A62 * k2p + _A63 * k3p + _A64 * k4p
                      + _A65 * k5p)
        k6x = p6
        k6p = _rhs1(n, kind, p1, p2, t + h, x6, p6, uprime)
        xn = x + h * (_B1 * k1x + _B3 * k3x + _B4 * k4x + _B5 * k5x
                      + _B6 * k6x)
        pn = p + h * (_B1 * k1p + _B3 * k3p + _B4 * k4p + _B5 * k5p
                      + _B6 * k6p)
        tn = t + h
        k7x = pn
        k7p = _rhs1(n, kind, p1, p2, tn, xn, pn, uprime) \
            if isfinite(xn) and xn > 0.0 and isfinite(pn) else float("nan")

        ex = h * (_E1 * k1x + _E3 * k3x + _E4 * k4x + _E5 * k5x + _E6 * k6x
                  + _E7 * k7x)
        ep = h * (_E1 * k1p + _E3 * k3p + _E4 * k4p + _E5 * k5p + _E6 * k6p
                  + _E7 * k7p)
        scx = fabs(xn)
        if fabs(x) > scx:
            scx = fabs(x)
        scx = abs_tol + rel_tol * scx
        scp = fabs(pn)
        if fabs(p) > scp:
            scp = fabs(p)
        scp = abs_tol + rel_tol * scp
        err = sqrt(0.5 * ((ex / scx) * (ex / scx) + (ep / scp) * (ep / scp)))
        if err != err:
            err = float("inf")

        if err <= 1.0 and isfinite(xn) and isfinite(pn) and xn > 0.0:
            t = tn
            x = xn
            p = pn
            ts1.append(t)
            xs1.append(x)
            ps1.append(p)
            fac = 5.0 if err == 0.0 else 0.9 * err ** -0.2
            if fac > 5.0:
                fac = 5.0
            if fac < 0.2:
                fac = 0.2
            h = h * fac
            if h > max_step:
                h = max_step
            if t + h > t_max:
                h = t_max - t
        else:
            fac = 0.2 if err == float("inf") else 0.9 * err ** -0.2
            if fac > 1.0:
                fac = 1.0
            if fac < 0.2:
                fac = 0.2
            h = h * fac

    if status1 != S1_SWITCH:
        return status1, status2, ts1, xs1, ps1, us2, ts2, qs2

    # stage 2: u = ln x, q = dt/du
    u = log(x)
    q = x / p
    us2.append(u)
    ts2.append(t)
    qs2.append(q)
    h = max_step_far if max_step_far < 1e-3 else 1e-3
    while True:
        if t >= t_hit:
            status2 = S2_TMAX
            break
        if u >= u_max - 1e-12:
            status2 = S2_UMAX
            break
        if steps >= max_steps:
            status2 = S2_MAXSTEPS
            break
        scale = fabs(t)
        if scale < 1.0:
            scale = 1.0
        if fabs(q) < 1e-15 * scale:
            status2 = S2_STALL
            break
        uscale = fabs(u)
        if uscale < 1.0:
            uscale = 1.0
        if h < 1e-14 * uscale:
            status2 = S2_STEPFAIL
            break
        steps += 1

        if u + h > u_max:
            h = u_max - u
        if q > 0.0:
            hcap = 1.05 * (t_max - t) / q
            if hcap < h:
                h = hcap if hcap > 1e-8 else 1e-8

        k1t = q
        k1q = _rhs2(n, kind, p1, p2, u, t, q, uprime)
        t2 = t + h * (_A21 * k1t)
        q2 = q + h * (_A21 * k1q)
        k2t = q2
        k2q = _rhs2(n, kind, p1, p2, u + 0.2 * h, t2, q2, uprime)
        t3 = t + h * (_A31 * k1t + _A32 * k2t)
        q3 = q + h * (_A31 * k1q + _A32 * k2q)
        k3t = q3
        k3q = _rhs2(n, kind, p1, p2, u + 0.3 * h, t3, q3, uprime)
        t4 = t + h * (_A41 * k1t + _A42 * k2t + _A43 * k3t)
        q4 = q + h * (_A41 * k1q + _A42 * k2q + _A43 * k3q)
        k4t = q4
        k4q = _rhs2(n, kind, p1, p2, u + 0.8 * h, t4, q4, uprime)
        t5 = t + h * (_A51 * k1t + _A52 * k2t + _A53 * k3t + _A54 * k4t)
        q5 = q + h * (_A51 * k1q + _A52 * k2q + _A53 * k3q + _A54 * k4q)
        k5t = q5
        k5q = _rhs2(n, kind, p1, p2, u + (8.0 / 9.0) * h, t5, q5, uprime)
        t6 = t + h * (_A61 * k1t + _A62 * k2t + _A63 * k3t + _A64 * k4t
                      + _A65 * k5t)
        q6 = q + h * (_A61 * k1q + _A62 * k2q + _A63 * k3q + _A64 * k4q
                      + _A65 * k5q)
        k6t = q6
        k6q = _rhs2(n, kind, p1, p2, u + h, t6, q6, uprime)
        tn = t + h * (_B1 * k1t + _B3 * k3t + _B4 * k4t + _B5 * k5t
                      + _B6 * k6t)
        qn = q + h * (_B1 * k1q + _B3 * k3q + _B4 * k4q + _B5 * k5q
                      + _B6 * k6q)
        un = u + h
        k7t = qn
        k7q = _rhs2(n, kind, p1, p2, un, tn, qn, uprime) \
            if isfinite(tn) and isfinite(qn) else float("nan")

        et = h * (_E1 * k1t + _E3 * k3t + _E4 * k4t + _E5 * k5t + _E6 * k6t
                  + _E7 * k7t)
        eq = h * (_E1 * k1q + _E3 * k3q + _E4 * k4q + _E5 * k5q + _E6 * k6q
                  + _E7 * k7q)
        sct = fabs(tn)
        if fabs(t) > sct:
            sct = fabs(t)
        sct = abs_tol + rel_tol * sct
        scq = fabs(qn)
        if fabs(q) > scq:
            scq = fabs(q)
        scq = abs_tol + rel_tol * scq
        err = sqrt(0.5 * ((et / sct) * (et / sct) + (eq / scq) * (eq / scq)))
        if err != err:
            err = float("inf")

        if err <= 1.0 and isfinite(tn) and isfinite(qn):
            u = un
            t = tn
            q = qn
            us2.append(u)
            ts2.append(t)
            qs2.append(q)
            fac = 5.0 if err == 0.0 else 0.9 * err ** -0.2
            if fac > 5.0:
                fac = 5.0
            if fac < 0.2:
                fac = 0.2
            h = h * fac
            if h > max_step_far:
                h = max_step_far
        else:
            fac = 0.2 if err == float("inf") else 0.9 * err ** -0.2
            if fac > 1.0:
                fac = 1.0
            if fac < 0.2:
                fac = 0.2
            h = h * fac

    return status1, status2, ts1, xs1, ps1, us2, ts2, qs2


def sturm_negative_count(d, e, b, shift):
    """Negative pivots of LDL^T for tridiag(d, e) - shift*diag(b).

    Equals the number of pencil eigenvalues strictly below shift. e has
    length len(d) - 1; a vanishing pivot is nudged to 1e-300.
    """
    count = 0
    piv = d[0] - shift * b[0]
    if piv == 0.0:
        piv = 1e-300
    if piv < 0.0:
        count += 1
    for j in range(1, len(d)):
        off = e[j - 1]
        piv = (d[j] - shift * b[j]) - (off * off) / piv
        if piv == 0.0:
            piv = 1e-300
        if piv < 0.0:
            count += 1
    return count
