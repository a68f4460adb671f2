"""Shared numerical machinery: adaptive RK integration, improper quadrature,
quintic Hermite resampling, and tridiagonal pencil eigen-counting."""

from . import eigen, hermite, ode, quadrature, sl

__all__ = ["ode", "quadrature", "eigen", "hermite", "sl"]
