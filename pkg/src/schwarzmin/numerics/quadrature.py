"""Improper integrals over [a, inf) for integrands with power-law tails.

The driver splits the ray into decades, integrates each compact decade with
scipy's adaptive Gauss-Kronrod panels, and watches the tail: the local
power-law exponent is estimated from the integrand itself at decade
endpoints, giving both a stopping criterion (remaining tail below tolerance)
and a divergence verdict (exponent <= 1 with non-shrinking decade sums).
Nothing here knows about the calling geometry; it is plain 1-d quadrature.
"""

from math import fabs, inf, isfinite, log

from scipy.integrate import quad


class ImproperResult:
    def __init__(self, value, error, divergent, tail_power, decades):
        self.value = value
        self.error = error          # accumulated panel error + tail bound
        self.divergent = divergent
        self.tail_power = tail_power
        self.decades = decades      # list of per-decade contributions

    def __repr__(self):
        if self.divergent:
            return f"ImproperResult(divergent, p~{self.tail_power:.3g})"
        return (f"ImproperResult({self.value!r}, err={self.error:.3g}, "
                f"p~{self.tail_power:.3g})")


def quad_improper(f, a, rel_tol=1e-10, max_decades=60, min_decades=3):
    """Integrate f over [a, inf).

    f must be positive and eventually decay like a power mu^-p. For p > 1
    the value converges and the reported error includes the analytic bound
    f(B)*B/(p-1) for the untouched tail beyond the last decade B. For p <= 1
    the integral is flagged divergent and value is +inf.
    """
    if a <= 0:
        raise ValueError(f"lower endpoint must be positive, got {a}")
    total = 0.0
    err_acc = 0.0
    decades = []
    lo = a
    tail_p = inf
    for j in range(max_decades):
        hi = lo * 10.0
        val, err = quad(f, lo, hi, limit=200, epsabs=0.0, epsrel=1e-12)
        total += val
        err_acc += fabs(err)
        decades.append(val)
        f_hi = f(hi)
        f_lo = f(lo)
        if f_hi > 0.0 and f_lo > 0.0:
            tail_p = -log(f_hi / f_lo) / log(10.0)
        lo = hi
        if j + 1 < min_decades:
            continue
        if tail_p > 1.01 and isfinite(tail_p):
            tail_bound = f_hi * hi / (tail_p - 1.0)
            if tail_bound < rel_tol * max(fabs(total), 1e-300):
                return ImproperResult(total, err_acc + tail_bound, False,
                                      tail_p, decades)
        # divergence: flat exponent and decade sums refusing to shrink
        if tail_p <= 1.01 and len(decades) >= 3:
            d1, d2, d3 = decades[-3], decades[-2], decades[-1]
            if d3 > 0.9 * d2 > 0.0 and d2 > 0.9 * d1 > 0.0:
                return ImproperResult(inf, inf, True, tail_p, decades)
    # budget exhausted: report with the best tail information available
    if tail_p > 1.01 and isfinite(tail_p):
        tail_bound = f(lo) * lo / (tail_p - 1.0)
        return ImproperResult(total, err_acc + tail_bound, False, tail_p,
                              decades)
    return ImproperResult(inf, inf, True, tail_p, decades)


def quad_compact(f, a, b):
    """Thin wrapper over scipy's adaptive panels for finite intervals."""
    val, err = quad(f, a, b, limit=200, epsabs=0.0, epsrel=1e-12)
    return val, err
