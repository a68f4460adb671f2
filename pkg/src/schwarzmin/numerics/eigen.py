"""Counting and locating eigenvalues of tridiagonal pencils A v = lam B v.

A is symmetric tridiagonal (diagonal d, off-diagonal e), B positive diagonal
(b). Counts come from the Sturm pivot sequence (kernel-backed); locations
from bisection on the count. Eigenvectors, when needed, come from scipy on
the symmetrized ordinary problem B^{-1/2} A B^{-1/2}, which stays
tridiagonal because B is diagonal.
"""

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .. import _kernels


def count_below(d, e, b, shift):
    """Number of pencil eigenvalues strictly below shift."""
    d = np.ascontiguousarray(d, dtype=float)
    e = np.ascontiguousarray(e, dtype=float)
    b = np.ascontiguousarray(b, dtype=float)
    # a nudged pivot can overflow to +-inf; the sign logic stays correct
    with np.errstate(over="ignore"):
        return _kernels.sturm_negative_count(d, e, b, shift)


def _gershgorin(d, e, b):
    d = np.asarray(d, dtype=float)
    e = np.asarray(e, dtype=float)
    b = np.asarray(b, dtype=float)
    pad = np.concatenate(([0.0], np.abs(e), [0.0]))
    radius = pad[:-1] + pad[1:]
    lo = np.min((d - radius) / b)
    hi = np.max((d + radius) / b)
    return lo, hi


def kth_eigenvalue(d, e, b, k=0, tol=1e-12, max_iter=200):
    """k-th smallest pencil eigenvalue by bisection on the Sturm count."""
    lo, hi = _gershgorin(d, e, b)
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if count_below(d, e, b, mid) >= k + 1:
            hi = mid
        else:
            lo = mid
        # the Gershgorin span scales like 1/h^2, so the stop test must
        # use the current bracket's own scale, not the initial one
        if hi - lo < tol * max(1.0, abs(lo), abs(hi)):
            break
    return 0.5 * (lo + hi)


def eigenpair(d, e, b, k=0):
    """k-th smallest eigenvalue and B-normalized eigenvector via scipy.

    Cross-route to the Sturm bisection: used for residual diagnostics and
    Rayleigh quotients, not for mode counting.
    """
    d = np.asarray(d, dtype=float)
    e = np.asarray(e, dtype=float)
    b = np.asarray(b, dtype=float)
    rb = 1.0 / np.sqrt(b)
    dd = d * rb * rb
    ee = e * rb[:-1] * rb[1:]
    vals, vecs = eigh_tridiagonal(dd, ee, select="i",
                                  select_range=(k, k))
    v = vecs[:, 0] * rb
    norm = np.sqrt(np.sum(b * v * v))
    return vals[0], v / norm
