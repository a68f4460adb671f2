"""Quintic Hermite interpolation on sample panels, plus Gauss panels.

Adaptive solvers hand back samples with values, first and second derivatives
at irregular nodes. A quintic Hermite piece matches all six endpoint
quantities, keeping interpolation error at the integrator's own order; the
7-point Gauss rule then integrates smooth functionals of the interpolant to
effectively machine precision per panel.
"""

import numpy as np

# 7-point Gauss-Legendre on [0, 1]
_nodes, _weights = np.polynomial.legendre.leggauss(7)
GL7_NODES = 0.5 * (_nodes + 1.0)
GL7_WEIGHTS = 0.5 * _weights


def quintic_coeffs(h, y0, p0, c0, y1, p1, c1):
    """Coefficients a0..a5 in y(tau) = sum a_i tau^i, tau = (s - s0)/h.

    Matches value y, derivative p and second derivative c at both ends
    (derivatives with respect to s, hence the h scalings).
    """
    a0 = y0
    a1 = h * p0
    a2 = 0.5 * h * h * c0
    r0 = y1 - a0 - a1 - a2
    r1 = h * p1 - a1 - 2.0 * a2
    r2 = h * h * c1 - 2.0 * a2
    a3 = 10.0 * r0 - 4.0 * r1 + 0.5 * r2
    a4 = -15.0 * r0 + 7.0 * r1 - r2
    a5 = 6.0 * r0 - 3.0 * r1 + 0.5 * r2
    return a0, a1, a2, a3, a4, a5


def quintic_eval(a, tau):
    a0, a1, a2, a3, a4, a5 = a
    return a0 + tau * (a1 + tau * (a2 + tau * (a3 + tau * (a4 + tau * a5))))


def quintic_eval_deriv(a, tau, h):
    """d/ds of the piece at tau (chain rule through tau = (s-s0)/h)."""
    _, a1, a2, a3, a4, a5 = a
    d = a1 + tau * (2.0 * a2 + tau * (3.0 * a3 + tau * (4.0 * a4
                                                        + tau * 5.0 * a5)))
    return d / h


class CurveInterpolant:
    """Piecewise-quintic vector interpolant over solver samples.

    nodes: increasing parameter values, shape (N,)
    values, derivs, seconds: shape (N, dim) arrays of y, dy/ds, d2y/ds2.
    """

    def __init__(self, nodes, values, derivs, seconds):
        nodes = np.asarray(nodes, dtype=float)
        if nodes.ndim != 1 or len(nodes) < 2:
            raise ValueError("need at least two nodes")
        if np.any(np.diff(nodes) <= 0):
            raise ValueError("nodes must be strictly increasing")
        self.nodes = nodes
        self.values = np.asarray(values, dtype=float)
        self.derivs = np.asarray(derivs, dtype=float)
        self.seconds = np.asarray(seconds, dtype=float)
        self.dim = self.values.shape[1]

    def panel_coeffs(self, i):
        h = self.nodes[i + 1] - self.nodes[i]
        return h, [
            quintic_coeffs(h, self.values[i, j], self.derivs[i, j],
                           self.seconds[i, j], self.values[i + 1, j],
                           self.derivs[i + 1, j], self.seconds[i + 1, j])
            for j in range(self.dim)
        ]

    def __call__(self, s):
        i = int(np.clip(np.searchsorted(self.nodes, s) - 1, 0,
                        len(self.nodes) - 2))
        h = self.nodes[i + 1] - self.nodes[i]
        tau = (s - self.nodes[i]) / h
        _, coeffs = self.panel_coeffs(i)
        return np.array([quintic_eval(a, tau) for a in coeffs])

    def eval_many(self, s):
        """Channel values at an array of parameters; list of dim arrays."""
        s = np.asarray(s, dtype=float)
        i = np.clip(np.searchsorted(self.nodes, s) - 1, 0,
                    len(self.nodes) - 2)
        h = self.nodes[i + 1] - self.nodes[i]
        tau = (s - self.nodes[i]) / h
        out = []
        for j in range(self.dim):
            a0 = self.values[i, j]
            a1 = h * self.derivs[i, j]
            a2 = 0.5 * h * h * self.seconds[i, j]
            r0 = self.values[i + 1, j] - a0 - a1 - a2
            r1 = h * self.derivs[i + 1, j] - a1 - 2.0 * a2
            r2 = h * h * self.seconds[i + 1, j] - 2.0 * a2
            a3 = 10.0 * r0 - 4.0 * r1 + 0.5 * r2
            a4 = -15.0 * r0 + 7.0 * r1 - r2
            a5 = 6.0 * r0 - 3.0 * r1 + 0.5 * r2
            out.append(a0 + tau * (a1 + tau * (a2 + tau * (
                a3 + tau * (a4 + tau * a5)))))
        return out

    def integrate(self, fun, s_hi=None):
        """Integral of fun(s, y_vector) over the nodes' range via GL7 panels.

        s_hi, when given, truncates the integration (partial last panel).
        """
        total = 0.0
        for i in range(len(self.nodes) - 1):
            s0, s1 = self.nodes[i], self.nodes[i + 1]
            if s_hi is not None and s0 >= s_hi:
                break
            frac = 1.0
            if s_hi is not None and s1 > s_hi:
                frac = (s_hi - s0) / (s1 - s0)
            h, coeffs = self.panel_coeffs(i)
            for tau, w in zip(GL7_NODES * frac, GL7_WEIGHTS * frac):
                y = [quintic_eval(a, tau) for a in coeffs]
                total += w * h * fun(s0 + tau * h, y)
        return total
