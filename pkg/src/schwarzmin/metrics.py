"""Radial conformally flat metrics on the exterior of a centered ball.

Every metric here is e^{2u(s)} * (euclidean), with s = |x|^2 the squared
distance from the puncture. Working in s rather than r keeps square roots out
of the profile ODE right-hand side.

The generalized Schwarzschild family is parametrized by dimension n, exponent
parameter k (n != 2k) and mass m; its boundary sphere radius

    R0 = (m/2)^(k/(n-2k))

is the minimal sphere of the metric. The cylinder and the bounded-factor
"beta" family have no distinguished sphere, so their constructors take the
boundary radius as an argument (it only enters through initial data for
profile solves, never through the metric itself).
"""

import math

__all__ = [
    "ConformalMetric",
    "schwarzschild_metric",
    "cylinder_metric",
    "beta_metric",
    "flat_metric",
    "custom_metric",
    "horizon_radius",
    "validate_hypotheses",
    "HypothesisReport",
    "KIND_FLAT",
    "KIND_SCHWARZSCHILD",
    "KIND_CYLINDER",
    "KIND_BETA",
    "KIND_CUSTOM",
]

# kernel dispatch ids, shared with _kernels
KIND_FLAT = 0
KIND_SCHWARZSCHILD = 1
KIND_CYLINDER = 2
KIND_BETA = 3
KIND_CUSTOM = 4


class ConformalMetric:
    """Immutable bundle of the conformal exponent and its first two s-derivatives.

    Attributes
    ----------
    kind : str
        One of "schwarzschild", "cylinder", "beta", "flat", "custom".
    n : int
        Ambient dimension (>= 3).
    r0 : float
        Boundary sphere radius used for free-boundary initial data.
    decay : (c, alpha) or None
        Certificate for -u'(s) <= c * s^(-alpha/2), i.e. c/r^alpha.
    kind_id, params : kernel dispatch data; params is (p1, p2) with meaning
        depending on kind (schwarzschild: (m, n/(2k)); beta: (beta, 0)).
    """

    def __init__(self, kind, n, u, uprime, usecond, r0, decay, label,
                 kind_id=KIND_CUSTOM, params=(0.0, 0.0), k=None, m=None):
        if n < 3:
            raise ValueError(f"dimension n must be >= 3, got {n}")
        if r0 <= 0:
            raise ValueError(f"boundary radius must be positive, got {r0}")
        self.kind = kind
        self.n = int(n)
        self.u = u
        self.uprime = uprime
        self.usecond = usecond
        self.r0 = float(r0)
        self.decay = decay
        self.label = label
        self.kind_id = kind_id
        self.params = (float(params[0]), float(params[1]))
        self.k = k
        self.m = m

    def __repr__(self):
        return f"ConformalMetric({self.label})"


def horizon_radius(n, k, m):
    """Radius of the minimal sphere, (m/2)^(k/(n-2k))."""
    if m <= 0:
        raise ValueError(f"mass must be positive, got {m}")
    if n == 2 * k:
        raise ValueError(f"n = 2k is excluded (n={n}, k={k})")
    try:
        r0 = (m / 2.0) ** (k / (n - 2.0 * k))
    except OverflowError:
        r0 = math.inf
    # k close to n/2 sends the exponent to +-inf; the power then leaves
    # double range (overflow, or silent underflow to 0) and no downstream
    # computation is meaningful
    if not 0.0 < r0 < math.inf:
        raise ValueError(
            f"horizon radius (m/2)^(k/(n-2k)) is not representable for "
            f"n={n}, k={k}, m={m}")
    return r0


def schwarzschild_metric(n, k=1.0, m=2.0):
    """Generalized Schwarzschild exterior in dimension n.

    u(s)  = (2k/(n-2k)) * ln(1 + (m/2) * s^(1 - n/(2k)))
    u'(s) = -m / (2 s^(n/(2k)) + m s)
    u''(s) = m (2 e s^(e-1) + m) / (2 s^e + m s)^2,  e = n/(2k)

    The derivative forms are hand-reduced from u; tests check them against
    symbolic differentiation and centered finite differences.
    """
    if n < 3:
        raise ValueError(f"dimension n must be >= 3, got {n}")
    if k < 1:
        raise ValueError(f"exponent parameter k must be >= 1, got {k}")
    if n == 2 * k:
        raise ValueError(f"n = 2k is excluded (n={n}, k={k})")
    if m <= 0:
        raise ValueError(f"mass must be positive, got {m}")
    n = int(n)
    k = float(k)
    m = float(m)
    e = n / (2.0 * k)
    w = 2.0 * k / (n - 2.0 * k)

    def u(s):
        return w * math.log(1.0 + (m / 2.0) * s ** (1.0 - e))

    def uprime(s):
        return -m / (2.0 * s ** e + m * s)

    def usecond(s):
        den = 2.0 * s ** e + m * s
        return m * (2.0 * e * s ** (e - 1.0) + m) / (den * den)

    r0 = horizon_radius(n, k, m)
    # -u'(s) = m/(2 s^e + m s) <= m/(m s) = 1/s, so (c, alpha) = (1, 2)
    return ConformalMetric(
        "schwarzschild", n, u, uprime, usecond, r0, (1.0, 2.0),
        f"schwarzschild(n={n}, k={k:g}, m={m:g})",
        kind_id=KIND_SCHWARZSCHILD, params=(m, e), k=k, m=m)


def cylinder_metric(r0=1.0):
    """Round cylinder over the 2-sphere, as a conformal metric on R^3 minus 0.

    u(s) = -ln(s)/2. Every centered sphere is minimal, so the boundary
    radius is the caller's choice (default 1).
    """

    def u(s):
        return -0.5 * math.log(s)

    def uprime(s):
        return -0.5 / s

    def usecond(s):
        return 0.5 / (s * s)

    return ConformalMetric(
        "cylinder", 3, u, uprime, usecond, r0, (0.5, 2.0),
        f"cylinder(r0={r0:g})", kind_id=KIND_CYLINDER)


def beta_metric(beta, n=3, r0=1.0):
    """Complete metric with u(s) = -beta*ln(1+s), beta in (0, 1/2]."""
    if not 0.0 < beta <= 0.5:
        raise ValueError(f"beta must lie in (0, 1/2], got {beta}")
    beta = float(beta)

    def u(s):
        return -beta * math.log(1.0 + s)

    def uprime(s):
        return -beta / (1.0 + s)

    def usecond(s):
        return beta / ((1.0 + s) * (1.0 + s))

    return ConformalMetric(
        "beta", n, u, uprime, usecond, r0, (beta, 2.0),
        f"beta(beta={beta:g}, n={n})", kind_id=KIND_BETA, params=(beta, 0.0))


def flat_metric(n=3, r0=1.0):
    """Euclidean metric (u = 0). Exists mostly for catenoid cross-checks."""

    def zero(s):
        return 0.0

    return ConformalMetric("flat", n, zero, zero, zero, r0, (0.0, 2.0),
                           f"flat(n={n})", kind_id=KIND_FLAT)


def custom_metric(u, uprime, n, r0=1.0, usecond=None, decay=None,
                  label="custom"):
    """Wrap user-supplied u(s), u'(s) closures.

    usecond is optional; operations that need it (the stability machinery)
    raise if it is absent. decay, when given, is a (c, alpha) certificate
    checked by validate_hypotheses.
    """
    return ConformalMetric("custom", n, u, uprime, usecond, r0, decay, label)


class HypothesisReport:
    def __init__(self, passed, violations, checked_decay):
        self.passed = passed
        self.violations = violations      # list of (r, what, value)
        self.checked_decay = checked_decay

    def __bool__(self):
        return self.passed

    def __repr__(self):
        state = "pass" if self.passed else f"fail({len(self.violations)})"
        return f"HypothesisReport({state}, decay_checked={self.checked_decay})"


def validate_hypotheses(metric, r_min, r_max, samples=200):
    """Sample u' < 0 and the decay certificate on [r_min, r_max].

    Sampling is logarithmic in r. Custom metrics without a certificate get
    only the negativity check. Report-based: never raises on violation.
    """
    if r_min <= 0 or r_max <= r_min:
        raise ValueError(f"need 0 < r_min < r_max, got [{r_min}, {r_max}]")
    violations = []
    has_decay = metric.decay is not None
    log_lo = math.log(r_min)
    log_hi = math.log(r_max)
    for i in range(samples):
        r = math.exp(log_lo + (log_hi - log_lo) * i / (samples - 1))
        s = r * r
        up = metric.uprime(s)
        if not up < 0.0:
            # flat metric (u' == 0) is reported, matching the strict hypothesis
            violations.append((r, "uprime_sign", up))
            continue
        h = 1e-6 * s
        fd = (metric.u(s + h) - metric.u(s - h)) / (2.0 * h)
        if abs(fd - up) > 1e-6 * max(1.0, abs(up)):
            violations.append((r, "derivative", fd - up))
            continue
        if has_decay:
            c, alpha = metric.decay
            bound = c * r ** (-alpha)
            if -up > bound * (1.0 + 1e-12):
                violations.append((r, "decay", -up - bound))
    return HypothesisReport(not violations, violations, has_decay)
