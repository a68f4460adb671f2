"""Counting negative modes of -v'' + P(x) v = lam w(x) v on an interval.

Second-order central differences turn the problem into a symmetric
tridiagonal pencil, and the Sturm pivot count (see .eigen) gives the number
of eigenvalues below zero exactly for the discrete problem. Robin ends are
reduced with a ghost node and the boundary row is halved, which keeps the
pencil symmetric and the count trustworthy. The grid is doubled until the
count stops moving: counts converge at far coarser grids than the
eigenvalues themselves, so this is cheap.

Boundary conditions: "dirichlet", "neumann", or ("robin", sigma) with the
convention v'(lo) = sigma*v(lo) on the left and v'(hi) = -sigma*v(hi) on
the right, so positive sigma always adds +sigma*v^2 to the quadratic form.
"""

from dataclasses import dataclass

import numpy as np

from . import eigen


@dataclass
class EigenCount:
    count: int
    smallest: float
    n_grid: int
    converged: bool
    history: list


def _sample(f, x):
    if callable(f):
        vals = np.asarray(f(x), dtype=float)
    else:
        vals = np.asarray(f, dtype=float)
    out = np.empty_like(x)
    out[:] = vals
    return out


def _bc_sigma(bc, name):
    """None for a Dirichlet end, else the Robin coefficient."""
    if bc == "dirichlet":
        return None
    if bc == "neumann":
        return 0.0
    if isinstance(bc, tuple) and len(bc) == 2 and bc[0] == "robin":
        return float(bc[1])
    raise ValueError(
        f"{name} must be 'dirichlet', 'neumann' or ('robin', sigma), "
        f"got {bc!r}")


def discretize(potential, weight, lo, hi, n,
               bc_left="dirichlet", bc_right="dirichlet"):
    """Pencil rows (d, e, b) and the retained grid nodes.

    potential and weight are vectorized callables (or plain numbers) sampled
    on the n+1 uniform nodes of [lo, hi].
    """
    if hi <= lo:
        raise ValueError(f"need hi > lo, got [{lo}, {hi}]")
    if n < 8:
        raise ValueError(f"grid too coarse: n = {n}")
    h = (hi - lo) / n
    x = lo + h * np.arange(n + 1)
    pvals = _sample(potential, x)
    wvals = _sample(weight, x)
    if np.any(wvals <= 0.0):
        raise ValueError("weight must be positive on the grid")
    inv_h2 = 1.0 / (h * h)
    d = 2.0 * inv_h2 + pvals
    b = wvals.copy()
    sig_l = _bc_sigma(bc_left, "bc_left")
    sig_r = _bc_sigma(bc_right, "bc_right")
    i0, i1 = 0, n + 1
    if sig_l is None:
        i0 = 1
    else:
        d[0] = (1.0 + h * sig_l) * inv_h2 + 0.5 * pvals[0]
        b[0] = 0.5 * wvals[0]
    if sig_r is None:
        i1 = n
    else:
        d[n] = (1.0 + h * sig_r) * inv_h2 + 0.5 * pvals[n]
        b[n] = 0.5 * wvals[n]
    d = d[i0:i1]
    b = b[i0:i1]
    e = np.full(len(d) - 1, -inv_h2)
    return d, e, b, x[i0:i1]


def sl_negative_count(potential, weight, lo, hi, n_grid=2048,
                      bc_left="dirichlet", bc_right="dirichlet",
                      max_doublings=5):
    """Count eigenvalues below zero; also report the smallest one.

    Runs on at least two grids (n_grid and 2*n_grid) and keeps doubling
    while the count moves. converged means the last two grids agreed;
    count and smallest come from the finest grid reached.
    """
    history = []
    converged = False
    d = e = b = None
    cnt = 0
    n = int(n_grid)
    for n in [int(n_grid) * (1 << j) for j in range(max_doublings + 1)]:
        d, e, b, _ = discretize(potential, weight, lo, hi, n,
                                bc_left, bc_right)
        cnt = eigen.count_below(d, e, b, 0.0)
        history.append((n, cnt))
        if len(history) >= 2 and history[-2][1] == cnt:
            converged = True
            break
    smallest = eigen.kth_eigenvalue(d, e, b, 0)
    return EigenCount(int(cnt), float(smallest), int(n), converged, history)
