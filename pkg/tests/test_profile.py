"""Profile solver tests.

Reference constants come from tests/oracles/profile_reference.py, which
integrates the same curve in arclength parametrization with scipy DOP853
(different formulation, different integrator).
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from schwarzmin import (
    InitialData,
    schwarzschild_metric,
    flat_metric,
    custom_metric,
    initial_conditions,
    solve_profile,
    psi_diagnostic,
    convergence_to_sigma0,
)
from schwarzmin.profile import rhs, log_log_slope

# frozen oracle values (m=2, k=1, r0=1)
FOLD_T = {3: 0.7976377012132133, 4: 0.6391506526193919, 5: 0.5907613914371039}
FOLD_X = {3: 2.304174100351894, 4: 1.503534543894003, 5: 1.274324203087028}
T_STAR = {4: -0.08414034679385908, 5: 0.2997231168728216}
GRAPH_N4 = (1.1218521256579546, 4.168702364757151)   # x, x' at t=0.6
GRAPH_N3 = (1.3708118303592958, 3.9569003567098893)  # x, x' at t=0.7
HEIGHTS_N4 = {0.1: 0.12982986484277934, 0.3: 0.38764281719202637,
              0.5: 0.6391506526193919, 0.7: 0.8762840141829504,
              0.9: 1.0717699415369997}
TSTAR_N4 = {0.1: -0.0005918822718498776, 0.3: -0.016628903023379656,
            0.5: -0.08414034679385908, 0.7: -0.2728872519653969,
            0.9: -0.8359576990542446}


def test_initial_conditions_orthogonal():
    m = schwarzschild_metric(3, 1.0, 2.0)
    ic = initial_conditions(m, 0.6)
    assert ic.x0 == pytest.approx(0.8)
    # Psi(t0) = t0 x'(t0) - x(t0) = 0 exactly encodes orthogonality
    assert ic.t0 * ic.xp0 - ic.x0 == pytest.approx(0.0, abs=1e-15)


@pytest.mark.parametrize("bad", [0.0, 1.0, -0.3, 2.0, 1e-9])
def test_initial_conditions_rejects_degenerate(bad):
    m = schwarzschild_metric(3, 1.0, 2.0)
    with pytest.raises(ValueError):
        initial_conditions(m, bad)


def test_rhs_rejects_nonpositive_radius():
    m = schwarzschild_metric(3, 1.0, 2.0)
    with pytest.raises(ValueError):
        rhs(m, 0.5, 0.0, 1.0)
    with pytest.raises(ValueError):
        rhs(m, 0.5, -1.0, 1.0)


def test_solve_validates_budgets():
    m = schwarzschild_metric(3, 1.0, 2.0)
    with pytest.raises(ValueError):
        solve_profile(m, 0.5, t_max=0.3)
    with pytest.raises(ValueError):
        solve_profile(m, 0.5, x_max=0.5)
    with pytest.raises(ValueError):
        solve_profile(m)


def test_graph_regime_n4():
    m = schwarzschild_metric(4, 1.0, 2.0)
    c = solve_profile(m, 0.5, t_max=0.6)
    assert c.termination.kind == "reached_tmax"
    assert c.t[-1] == pytest.approx(0.6, abs=1e-12)
    assert c.x[-1] == pytest.approx(GRAPH_N4[0], abs=1e-9)
    assert c.xp[-1] == pytest.approx(GRAPH_N4[1], abs=1e-8)


def test_graph_regime_n3():
    m = schwarzschild_metric(3, 1.0, 2.0)
    c = solve_profile(m, 0.5, t_max=0.7)
    assert c.x[-1] == pytest.approx(GRAPH_N3[0], abs=1e-9)
    assert c.xp[-1] == pytest.approx(GRAPH_N3[1], abs=1e-8)


@pytest.mark.parametrize("n", [3, 4, 5])
def test_fold_location(n):
    m = schwarzschild_metric(n, 1.0, 2.0)
    c = solve_profile(m, 0.5)
    assert c.fold is not None
    t_peak, x_peak = c.fold
    assert t_peak == pytest.approx(FOLD_T[n], abs=1e-6)
    assert x_peak == pytest.approx(FOLD_X[n], rel=1e-4)
    assert c.sup_t == pytest.approx(FOLD_T[n], abs=1e-6)
    # the switch to log-radius happens strictly before the fold
    assert c.parametrization_switch is not None
    assert c.parametrization_switch < t_peak
    assert c.x_at_switch < x_peak


@pytest.mark.parametrize("n", [4, 5])
def test_blowup_height(n):
    m = schwarzschild_metric(n, 1.0, 2.0)
    c = solve_profile(m, 0.5)
    assert c.termination.kind == "blowup"
    assert c.termination.t_star == pytest.approx(T_STAR[n], abs=5e-8)
    # extrapolation and tail formula must agree with each other too
    t_star, t_tail, spread = c.richardson
    assert spread < 1e-8
    # plane height sits below the peak: approach is from above
    assert t_star < c.sup_t


def test_n3_exhausts_radius_budget():
    # after the vertical tangent the n=3 curve descends like -c ln x and
    # never settles, so the radius budget is the honest endpoint
    m = schwarzschild_metric(3, 1.0, 2.0)
    c = solve_profile(m, 0.5)
    assert c.termination.kind == "reached_xmax"
    ff = c.far_field
    assert ff is not None
    assert ff["t"][-1] < 0.0 and ff["q"][-1] < 0.0


def test_samples_strictly_increasing_and_consistent():
    m = schwarzschild_metric(4, 1.0, 2.0)
    c = solve_profile(m, 0.5)
    assert np.all(np.diff(c.t) > 0.0)
    assert np.all(c.x > 0.0)
    finite = np.isfinite(c.x)
    assert np.allclose(np.log(c.x[finite]), c.log_x[finite], atol=1e-12)
    assert len(c.samples) == len(c.t)


def test_catenoid_against_cosh():
    fl = flat_metric(3)
    c = solve_profile(fl, initial=InitialData(0.0, 1.0, 0.0), t_max=3.0)
    assert c.termination.kind == "reached_tmax"
    assert c.t[0] == 0.0 and c.t[-1] == pytest.approx(3.0, abs=1e-12)
    err = np.max(np.abs(c.x - np.cosh(c.t)))
    assert err < 1e-8
    errp = np.max(np.abs(c.xp - np.sinh(c.t)))
    assert errp < 1e-8


def test_catenoid_psi():
    fl = flat_metric(3)
    c = solve_profile(fl, initial=InitialData(0.0, 1.0, 0.0), t_max=3.0)
    ps = psi_diagnostic(c)
    # Psi = t sinh t - cosh t, Psi(0) = -1
    assert ps.psi[0] == pytest.approx(-1.0, abs=1e-12)
    ref = c.t * np.sinh(c.t) - np.cosh(c.t)
    assert np.max(np.abs(ps.psi - ref)) < 1e-7


def test_psi_free_boundary_and_sign():
    m = schwarzschild_metric(4, 1.0, 2.0)
    c = solve_profile(m, 0.5)
    ps = psi_diagnostic(c)
    assert ps.psi[0] == pytest.approx(0.0, abs=1e-14)
    assert ps.min_psi > 0.0
    assert ps.min_psi_prime > 0.0


def test_convergence_table_decreasing():
    m = schwarzschild_metric(4, 1.0, 2.0)
    fracs = [0.5, 0.3, 0.1, 0.05, 0.01]
    rows = convergence_to_sigma0(m, fracs)
    hs = [h for _, h in rows]
    assert all(a > b for a, b in zip(hs, hs[1:]))
    assert hs[-1] < 0.02
    for (t0, h), f in zip(rows, fracs):
        if f in HEIGHTS_N4:
            assert h == pytest.approx(HEIGHTS_N4[f], abs=1e-6)


def test_convergence_table_needs_n4():
    m = schwarzschild_metric(3, 1.0, 2.0)
    with pytest.raises(ValueError):
        convergence_to_sigma0(m, [0.5, 0.3])


def test_heights_and_tstar_sweep_n4():
    m = schwarzschild_metric(4, 1.0, 2.0)
    for f0, href in HEIGHTS_N4.items():
        c = solve_profile(m, f0)
        assert c.sup_t == pytest.approx(href, abs=1e-6)
        assert c.termination.kind == "blowup"
        assert c.termination.t_star == pytest.approx(TSTAR_N4[f0], abs=5e-8)


def test_custom_metric_matches_builtin():
    ms = schwarzschild_metric(3, 1.0, 2.0)
    cu = custom_metric(u=ms.u, uprime=ms.uprime, n=3, r0=ms.r0)
    a = solve_profile(ms, 0.5)
    b = solve_profile(cu, 0.5)
    assert b.fold[0] == pytest.approx(a.fold[0], rel=1e-12)
    assert b.termination.kind == a.termination.kind


def test_deterministic_rerun():
    m = schwarzschild_metric(4, 1.0, 2.0)
    a = solve_profile(m, 0.5)
    b = solve_profile(m, 0.5)
    assert np.array_equal(a.t, b.t)
    assert np.array_equal(a.x, b.x)
    assert a.termination.t_star == b.termination.t_star


def test_log_log_slope_catenoid():
    # x ~ e^t: d ln x / d ln t = t over the last decade, so the report is
    # large and positive; for the flat plane through t0 it would be ~1
    fl = flat_metric(3)
    c = solve_profile(fl, initial=InitialData(0.1, 1.0, 0.0), t_max=8.0)
    g = log_log_slope(c)
    assert g is not None and g > 3.0


@settings(max_examples=25, deadline=None)
@given(
    n=st.integers(min_value=3, max_value=6),
    mass=st.floats(min_value=0.5, max_value=8.0),
    frac=st.floats(min_value=0.05, max_value=0.95),
)
def test_invariants_random_schwarzschild(n, mass, frac):
    m = schwarzschild_metric(n, 1.0, mass)
    c = solve_profile(m, frac * m.r0, t_max=50.0 * m.r0,
                      x_max=1e6 * m.r0, rel_tol=1e-9)
    assert c.termination.kind in ("reached_tmax", "blowup", "reached_xmax")
    assert np.all(np.diff(c.t) > 0.0)
    ps = psi_diagnostic(c)
    assert ps.psi[0] == pytest.approx(0.0, abs=1e-13)
    assert ps.min_psi > -1e-12
    assert c.sup_t >= c.t[-1] - 1e-12


@settings(max_examples=10, deadline=None)
@given(
    kk=st.floats(min_value=1.0, max_value=1.4),
    frac=st.floats(min_value=0.1, max_value=0.9),
)
def test_invariants_n3_subextremal_k(kk, frac):
    m = schwarzschild_metric(3, kk, 2.0)
    c = solve_profile(m, frac * m.r0, t_max=50.0 * m.r0,
                      x_max=1e6 * m.r0, rel_tol=1e-9)
    assert c.termination.kind != "step_failure"
    assert np.all(np.diff(c.t) > 0.0)
