# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, cpow=True
# cpow makes `err ** -0.2` call libm pow(), the same entry point CPython's
# float power uses for a positive base; the default (complex cpow) is off
# by an ulp and the twins would drift apart.
"""Compiled kernel twin.

Line-for-line transliteration of _core_py.py: same expression order, same
libm entry points, no fast-math, so both backends produce bit-identical
floats on the same machine. The custom-metric branch (Python closures) is
not compiled; the dispatcher in __init__ routes those to the Python twin.
"""

from libc.math cimport exp, fabs, isfinite, log, sqrt, INFINITY, NAN

BACKEND = "compiled"

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
cdef int _FLAT = 0
cdef int _SCHWARZSCHILD = 1
cdef int _CYLINDER = 2
cdef int _BETA = 3

# Dormand-Prince 5(4) coefficients
cdef double _A21 = 1.0 / 5.0
cdef double _A31 = 3.0 / 40.0
cdef double _A32 = 9.0 / 40.0
cdef double _A41 = 44.0 / 45.0
cdef double _A42 = -56.0 / 15.0
cdef double _A43 = 32.0 / 9.0
cdef double _A51 = 19372.0 / 6561.0
cdef double _A52 = -25360.0 / 2187.0
cdef double _A53 = 64448.0 / 6561.0
cdef double _A54 = -212.0 / 729.0
cdef double _A61 = 9017.0 / 3168.0
cdef double _A62 = -355.0 / 33.0
cdef double _A63 = 46732.0 / 5247.0
cdef double _A64 = 49.0 / 176.0
cdef double _A65 = -5103.0 / 18656.0
cdef double _B1 = 35.0 / 384.0
cdef double _B3 = 500.0 / 1113.0
cdef double _B4 = 125.0 / 192.0
cdef double _B5 = -2187.0 / 6784.0
cdef double _B6 = 11.0 / 84.0
cdef double _E1 = 71.0 / 57600.0
cdef double _E3 = -71.0 / 16695.0
cdef double _E4 = 71.0 / 1920.0
cdef double _E5 = -17253.0 / 339200.0
cdef double _E6 = 22.0 / 525.0
cdef double _E7 = -1.0 / 40.0


cdef inline double _uprime(int kind, double p1, double p2, double s) nogil:
    # p1, p2: (m, n/(2k)) for schwarzschild, (beta, -) for beta
    if kind == _SCHWARZSCHILD:
        return -p1 / (2.0 * exp(p2 * log(s)) + p1 * s)
    if kind == _CYLINDER:
        return -0.5 / s
    if kind == _BETA:
        return -p1 / (1.0 + s)
    return 0.0


cdef inline double _u2(int kind, double p1, double p2, double u, double sig,
                       double e2) nogil:
    # u'(s) * x^2 without forming x^2; sig = 1 + t^2 e^{-2u}, s = e^{2u} sig
    cdef double w, sige, ew
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
    return 0.0


cdef inline double _rhs1(double n, int kind, double p1, double p2, double t,
                         double x, double p) nogil:
    # graph parametrization: returns d(x')/dt, i.e. x''
    cdef double s = x * x + t * t
    cdef double up = _uprime(kind, p1, p2, s)
    return (-2.0 * (n - 1.0) * up * (p * t - x) + (n - 2.0) / x) * (1.0 + p * p)


cdef inline double _rhs2(double n, int kind, double p1, double p2, double u,
                         double t, double q) nogil:
    # log-radius parametrization: returns dq/du with q = dt/du
    cdef double e2 = exp(-2.0 * u)
    cdef double sig = 1.0 + t * t * e2
    cdef double u2 = _u2(kind, p1, p2, u, sig, e2)
    cdef double one = 1.0 + q * q * e2
    return (-(n - 3.0) * q - (n - 2.0) * q * q * q * e2
            + 2.0 * (n - 1.0) * u2 * (t - q) * one)


def solve_profile_raw(double n, int kind, double p1, double p2, double t0,
                      double x0, double xp0, double t_max, double u_max,
                      double slope_switch, double rel_tol, double abs_tol,
                      double max_step, double max_step_far, long max_steps):
    """Two-stage integration of the generating-curve ODE (compiled twin)."""
    ts1 = [t0]
    xs1 = [x0]
    ps1 = [xp0]
    us2 = []
    ts2 = []
    qs2 = []
    cdef double x_cap = exp(u_max) if u_max < 700.0 else INFINITY

    cdef int status1 = -1
    cdef int status2 = S2_NOTRUN
    cdef long steps = 0
    cdef double t = t0
    cdef double x = x0
    cdef double p = xp0
    cdef double tm_scale = fabs(t_max)
    if tm_scale < 1.0:
        tm_scale = 1.0
    cdef double t_hit = t_max - 1e-12 * tm_scale
    cdef double h = max_step if max_step < 1e-3 else 1e-3
    if t + h > t_max:
        h = t_max - t

    cdef double scale, uscale, hcap
    cdef double k1x, k1p, k2x, k2p, k3x, k3p, k4x, k4p, k5x, k5p, k6x, k6p
    cdef double k7x, k7p
    cdef double x2, p2_, x3, p3, x4, p4, x5, p5, x6, p6, xn, pn, tn
    cdef double ex, ep, scx, scp, err, fac
    cdef double u, q, un, qn
    cdef double k1t, k1q, k2t, k2q, k3t, k3q, k4t, k4q, k5t, k5q, k6t, k6q
    cdef double k7t, k7q
    cdef double t2, q2, t3, q3, t4, q4, t5, q5, t6, q6
    cdef double et, eq, sct, scq

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
        k1p = _rhs1(n, kind, p1, p2, t, x, p)
        x2 = x + h * (_A21 * k1x)
        p2_ = p + h * (_A21 * k1p)
        k2x = p2_
        k2p = _rhs1(n, kind, p1, p2, t + 0.2 * h, x2, p2_)
        x3 = x + h * (_A31 * k1x + _A32 * k2x)
        p3 = p + h * (_A31 * k1p + _A32 * k2p)
        k3x = p3
        k3p = _rhs1(n, kind, p1, p2, t + 0.3 * h, x3, p3)
        x4 = x + h * (_A41 * k1x + _A42 * k2x + _A43 * k3x)
        p4 = p + h * (_A41 * k1p + _A42 * k2p + _A43 * k3p)
        k4x = p4
        k4p = _rhs1(n, kind, p1, p2, t + 0.8 * h, x4, p4)
        x5 = x + h * (_A51 * k1x + _A52 * k2x + _A53 * k3x + _A54 * k4x)
        p5 = p + h * (_A51 * k1p + _A52 * k2p + _A53 * k3p + _A54 * k4p)
        k5x = p5
        k5p = _rhs1(n, kind, p1, p2, t + (8.0 / 9.0) * h, x5, p5)
        x6 = x + h * (_A61 * k1x + _A62 * k2x + _A63 * k3x + _A64 * k4x
                      + _A65 * k5x)
        p6 = p + h * (_A61 * k1p + _A62 * k2p + _A63 * k3p + _A64 * k4p
                      + _A65 * k5p)
        k6x = p6
        k6p = _rhs1(n, kind, p1, p2, t + h, x6, p6)
        xn = x + h * (_B1 * k1x + _B3 * k3x + _B4 * k4x + _B5 * k5x
                      + _B6 * k6x)
        pn = p + h * (_B1 * k1p + _B3 * k3p + _B4 * k4p + _B5 * k5p
                      + _B6 * k6p)
        tn = t + h
        if isfinite(xn) and xn > 0.0 and isfinite(pn):
            k7p = _rhs1(n, kind, p1, p2, tn, xn, pn)
        else:
            k7p = NAN
        k7x = pn

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
            err = INFINITY

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
            fac = 0.2 if err == INFINITY else 0.9 * err ** -0.2
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
        k1q = _rhs2(n, kind, p1, p2, u, t, q)
        t2 = t + h * (_A21 * k1t)
        q2 = q + h * (_A21 * k1q)
        k2t = q2
        k2q = _rhs2(n, kind, p1, p2, u + 0.2 * h, t2, q2)
        t3 = t + h * (_A31 * k1t + _A32 * k2t)
        q3 = q + h * (_A31 * k1q + _A32 * k2q)
        k3t = q3
        k3q = _rhs2(n, kind, p1, p2, u + 0.3 * h, t3, q3)
        t4 = t + h * (_A41 * k1t + _A42 * k2t + _A43 * k3t)
        q4 = q + h * (_A41 * k1q + _A42 * k2q + _A43 * k3q)
        k4t = q4
        k4q = _rhs2(n, kind, p1, p2, u + 0.8 * h, t4, q4)
        t5 = t + h * (_A51 * k1t + _A52 * k2t + _A53 * k3t + _A54 * k4t)
        q5 = q + h * (_A51 * k1q + _A52 * k2q + _A53 * k3q + _A54 * k4q)
        k5t = q5
        k5q = _rhs2(n, kind, p1, p2, u + (8.0 / 9.0) * h, t5, q5)
        t6 = t + h * (_A61 * k1t + _A62 * k2t + _A63 * k3t + _A64 * k4t
                      + _A65 * k5t)
        q6 = q + h * (_A61 * k1q + _A62 * k2q + _A63 * k3q + _A64 * k4q
                      + _A65 * k5q)
        k6t = q6
        k6q = _rhs2(n, kind, p1, p2, u + h, t6, q6)
        tn = t + h * (_B1 * k1t + _B3 * k3t + _B4 * k4t + _B5 * k5t
                      + _B6 * k6t)
        qn = q + h * (_B1 * k1q + _B3 * k3q + _B4 * k4q + _B5 * k5q
                      + _B6 * k6q)
        un = u + h
        if isfinite(tn) and isfinite(qn):
            k7q = _rhs2(n, kind, p1, p2, un, tn, qn)
        else:
            k7q = NAN
        k7t = qn

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
            err = INFINITY

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
            fac = 0.2 if err == INFINITY else 0.9 * err ** -0.2
            if fac > 1.0:
                fac = 1.0
            if fac < 0.2:
                fac = 0.2
            h = h * fac

    return status1, status2, ts1, xs1, ps1, us2, ts2, qs2


def sturm_negative_count(double[::1] d, double[::1] e, double[::1] b,
                         double shift):
    """Negative pivots of LDL^T for tridiag(d, e) - shift*diag(b)."""
    cdef long count = 0
    cdef long j
    cdef double off
    cdef double piv = d[0] - shift * b[0]
    if piv == 0.0:
        piv = 1e-300
    if piv < 0.0:
        count += 1
    for j in range(1, d.shape[0]):
        off = e[j - 1]
        piv = (d[j] - shift * b[j]) - (off * off) / piv
        if piv == 0.0:
            piv = 1e-300
        if piv < 0.0:
            count += 1
    return count
