"""Kernel backend selection.

Prefers the compiled extension when importable, falls back to the Python
twin. Both expose the same functions with bit-identical results; the
selection only changes speed. set_backend exists for tests and benchmarks.
"""

from . import _core_py

try:  # pragma: no cover - depends on whether the extension was built
    from . import _core as _core_c
except ImportError:  # pragma: no cover
    _core_c = None

_active = _core_c if _core_c is not None else _core_py

# status constants are backend-independent; re-export from the Python twin
S1_TMAX = _core_py.S1_TMAX
S1_SWITCH = _core_py.S1_SWITCH
S1_STEPFAIL = _core_py.S1_STEPFAIL
S1_MAXSTEPS = _core_py.S1_MAXSTEPS
S1_XMAX = _core_py.S1_XMAX
S2_NOTRUN = _core_py.S2_NOTRUN
S2_TMAX = _core_py.S2_TMAX
S2_UMAX = _core_py.S2_UMAX
S2_STALL = _core_py.S2_STALL
S2_STEPFAIL = _core_py.S2_STEPFAIL
S2_MAXSTEPS = _core_py.S2_MAXSTEPS


def backend_name():
    return _active.BACKEND


def compiled_available():
    return _core_c is not None


def get_backend(name):
    """Return the kernel module for "python" or "compiled" (tests, benchmarks)."""
    if name == "python":
        return _core_py
    if name == "compiled":
        if _core_c is None:
            raise RuntimeError("compiled kernel not built")
        return _core_c
    raise ValueError(f"unknown backend {name!r}")


def solve_profile_raw(n, kind, p1, p2, t0, x0, xp0, t_max, u_max,
                      slope_switch, rel_tol, abs_tol, max_step, max_step_far,
                      max_steps, uprime=None):
    if uprime is not None:
        # custom metrics carry Python closures; only the Python twin can call them
        return _core_py.solve_profile_raw(
            n, kind, p1, p2, t0, x0, xp0, t_max, u_max, slope_switch,
            rel_tol, abs_tol, max_step, max_step_far, max_steps, uprime)
    return _active.solve_profile_raw(
        n, kind, p1, p2, t0, x0, xp0, t_max, u_max, slope_switch,
        rel_tol, abs_tol, max_step, max_step_far, max_steps)


def sturm_negative_count(d, e, b, shift):
    return _active.sturm_negative_count(d, e, b, shift)
