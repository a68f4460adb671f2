"""Small adaptive Dormand-Prince 5(4) driver for low-dimensional systems.

This is the general-purpose integrator used by the comparison bounds, the
curvature re-parametrization and the oracle-style cross-checks. The profile
solver itself does not go through here: it has a dedicated kernel (see
_kernels) whose two-stage structure and bit-reproducibility requirements do
not fit a generic driver.

States are tuples of floats. The right-hand side receives (t, y) and returns
a sequence of derivatives. One optional terminal event g(t, y) is supported;
the crossing is localized by bisecting the step size of a single embedded
step from the last accepted point.
"""

from math import fabs, isfinite, sqrt

_A = (
    (1.0 / 5.0,),
    (3.0 / 40.0, 9.0 / 40.0),
    (44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0),
    (19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0),
    (9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0,
     -5103.0 / 18656.0),
)
_C = (0.2, 0.3, 0.8, 8.0 / 9.0, 1.0)
_B = (35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0,
      11.0 / 84.0)
_E = (71.0 / 57600.0, 0.0, -71.0 / 16695.0, 71.0 / 1920.0,
      -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0)


class OdeResult:
    def __init__(self, ts, ys, status, event_t=None, event_y=None,
                 n_steps=0):
        self.ts = ts
        self.ys = ys
        self.status = status  # "reached_end" | "event" | "step_failure" | "max_steps"
        self.event_t = event_t
        self.event_y = event_y
        self.n_steps = n_steps

    @property
    def t(self):
        return self.ts[-1]

    @property
    def y(self):
        return self.ys[-1]


def _stages(f, t, y, h):
    dim = len(y)
    k = [tuple(f(t, y))]
    for stage, row in enumerate(_A):
        yi = tuple(
            y[j] + h * sum(row[m] * k[m][j] for m in range(len(row)))
            for j in range(dim))
        k.append(tuple(f(t + _C[stage] * h, yi)))
    ynew = tuple(
        y[j] + h * sum(_B[m] * k[m][j] for m in range(6)) for j in range(dim))
    k.append(tuple(f(t + h, ynew)))
    return k, ynew


def _step_once(f, t, y, h):
    """Single 5th-order step without error control (event localization)."""
    _, ynew = _stages(f, t, y, h)
    return ynew


def integrate(f, t0, y0, t_end, rel_tol=1e-10, abs_tol=1e-12, max_step=None,
              max_steps=1000000, event=None, first_step=None):
    """Integrate y' = f(t, y) from t0 to t_end (t_end > t0).

    Returns accepted-step samples. If event is given, integration stops at
    its first sign change relative to the starting sign and the localized
    crossing is appended as the final sample.
    """
    if t_end <= t0:
        raise ValueError(f"t_end must exceed t0 ({t_end} <= {t0})")
    y = tuple(float(v) for v in y0)
    t = t0
    ts = [t]
    ys = [y]
    hmax = max_step if max_step is not None else t_end - t0
    h = first_step if first_step is not None else min(1e-3, hmax)
    ev_sign = None
    if event is not None:
        g0 = event(t, y)
        ev_sign = 1.0 if g0 >= 0.0 else -1.0
    steps = 0
    end_scale = max(1.0, fabs(t_end))
    while t < t_end - 1e-12 * end_scale:
        if steps >= max_steps:
            return OdeResult(ts, ys, "max_steps", n_steps=steps)
        if h < 1e-14 * max(1.0, fabs(t)):
            return OdeResult(ts, ys, "step_failure", n_steps=steps)
        if t + h > t_end:
            h = t_end - t
        steps += 1
        try:
            k, ynew = _stages(f, t, y, h)
        except (ValueError, ZeroDivisionError, OverflowError):
            h *= 0.2
            continue
        err = 0.0
        bad = False
        for j in range(len(y)):
            if not isfinite(ynew[j]):
                bad = True
                break
            ej = h * sum(_E[m] * k[m][j] for m in range(7))
            sc = abs_tol + rel_tol * max(fabs(y[j]), fabs(ynew[j]))
            err += (ej / sc) ** 2
        err = sqrt(err / len(y)) if not bad else float("inf")
        if err != err:
            err = float("inf")
        if err > 1.0:
            fac = 0.2 if err == float("inf") else max(0.2, 0.9 * err ** -0.2)
            h *= min(1.0, fac)
            continue
        tnew = t + h
        if event is not None:
            g = event(tnew, ynew)
            gs = 1.0 if g >= 0.0 else -1.0
            if gs != ev_sign:
                lo, hi = 0.0, h
                for _ in range(80):
                    mid = 0.5 * (lo + hi)
                    ymid = _step_once(f, t, y, mid)
                    gm = event(t + mid, ymid)
                    if (1.0 if gm >= 0.0 else -1.0) == ev_sign:
                        lo = mid
                    else:
                        hi = mid
                    if hi - lo < 1e-15 * max(1.0, fabs(t)):
                        break
                yev = _step_once(f, t, y, hi)
                ts.append(t + hi)
                ys.append(yev)
                return OdeResult(ts, ys, "event", event_t=t + hi,
                                 event_y=yev, n_steps=steps)
        t = tnew
        y = ynew
        ts.append(t)
        ys.append(y)
        fac = 5.0 if err == 0.0 else min(5.0, max(0.2, 0.9 * err ** -0.2))
        h = min(hmax, h * fac)
    return OdeResult(ts, ys, "reached_end", n_steps=steps)
