"""Mode potentials, negative-mode counts, and the stabilized index.

Reference counts and eigenvalues marked "shooting oracle" were frozen from
tests/oracles/sl_shooting.py (independent Prufer-angle integration).
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from schwarzmin import metrics, profile, spectral
from schwarzmin.numerics import sl


R0_M2 = 1.0  # horizon radius is (m/2)^(k/(3-2k)) = 1 whenever m = 2


# ------------------------------------------------------- closed forms

def test_scalar_factor_vanishes_at_k1():
    for m, r in [(0.5, 1.0), (2.0, 3.7), (8.0, 100.0)]:
        assert spectral.scalar_curvature_factor(1.0, m, r) == 0.0


def test_scalar_factor_worked_value():
    # 48 * 0.2 * 2 / (1.2 * 16) = 1
    assert spectral.scalar_curvature_factor(1.2, 2.0, 1.0) == pytest.approx(
        1.0, rel=1e-14)


def test_scalar_factor_positive_above_k1():
    r = np.geomspace(1.0, 1e4, 50)
    assert np.all(spectral.scalar_curvature_factor(1.1, 2.0, r) > 0.0)


def test_k_three_halves_rejected():
    for fn in (lambda: spectral.scalar_curvature_factor(1.5, 2.0, 1.0),
               lambda: spectral.potential_Q(1.5, 2.0, 1.0),
               lambda: spectral.weight(1.5, 2.0, 1.0)):
        with pytest.raises(ValueError):
            fn()


def test_potential_q_worked_value():
    assert spectral.potential_Q(1.0, 2.0, 1.0) == 0.5


def test_potential_q_two_routes_agree():
    for k in (1.0, 1.1, 1.2, 1.4):
        r0 = metrics.horizon_radius(3, k, 2.0)
        r = np.geomspace(r0, 1e4 * r0, 200)
        rk = r ** (3.0 / k)
        den = 2.0 * rk + 2.0 * r * r
        single = 4.0 * (4.0 * k - 3.0) * 2.0 * rk / (k * den * den)
        assert spectral.potential_Q(k, 2.0, r) == pytest.approx(
            single, rel=1e-12)


def test_potential_q_times_r2_decays():
    r = np.array([1e2, 1e3, 1e4])
    for k in (1.0, 1.1, 1.2):
        # slowest case (k = 6/5) decays like r^(-1/2): 0.1 per two decades
        vals = spectral.potential_Q(k, 2.0, r) * r * r
        assert vals[0] > vals[1] > vals[2]
        assert vals[2] < 0.2 * vals[0]
        assert vals[2] < 0.05


def test_weight_k1_is_quartic():
    for r in (0.5, 1.0, 2.0, 4.0):
        assert spectral.weight(1.0, 2.0, r) == (1.0 + 1.0 / r) ** 4


def test_weight_exceeds_one():
    r = np.geomspace(1.0, 1e5, 40)
    for k in (1.0, 1.1, 1.2):
        assert np.all(spectral.weight(k, 2.0, r) > 1.0)


def test_potential_profile_invariants():
    grid = np.geomspace(1.0, 1e3, 80)
    prof = spectral.potential_profile(1.1, 2.0, grid)
    assert np.all(prof.Q > 0.0)
    assert np.all(prof.Rg_flat_factor > 0.0)
    assert np.all(prof.weight > 1.0)
    flat = spectral.potential_profile(1.0, 2.0, grid)
    assert np.all(flat.Rg_flat_factor == 0.0)


# --------------------------------------------------------- the bound

def test_q_bound_holds_in_theorem_window():
    for k in (1.05, 1.1, 1.2):
        r0 = metrics.horizon_radius(3, k, 2.0)
        grid = np.geomspace(r0, 1e4 * r0, 400)
        assert spectral.q_bound_check(k, 2.0, grid)


def test_q_bound_equality_edge_at_k_six_fifths():
    # Q r^2 attains 3/4 exactly at the horizon for k = 6/5
    val = spectral.potential_Q(1.2, 2.0, R0_M2) * R0_M2 * R0_M2
    assert val == pytest.approx(0.75, rel=1e-14)


def test_q_bound_false_path():
    # large k, small mass: Q r^2 starts at (4k-3)/(2k) > 3/4
    k, m = 5.0, 1e-3
    r0 = metrics.horizon_radius(3, k, m)
    grid = np.geomspace(r0, 1e4 * r0, 200)
    assert not spectral.q_bound_check(k, m, grid)


@settings(max_examples=80, deadline=None)
@given(st.floats(min_value=1e-150, max_value=1e150),
       st.floats(min_value=1e-150, max_value=1e150))
def test_symmetric_product_bound(a, b):
    # 2ab/(a+b)^2 <= 1/2, the algebra behind the 3/(4r^2) cap
    assert 2.0 * a * b / ((a + b) * (a + b)) <= 0.5 * (1.0 + 1e-15)


@settings(max_examples=40, deadline=None)
@given(st.floats(min_value=1.0001, max_value=1.2),
       st.floats(min_value=0.5, max_value=8.0),
       st.floats(min_value=0.0, max_value=8.0))
def test_q_bound_property(k, m, log_off):
    r = metrics.horizon_radius(3, k, m) * math.exp(log_off)
    val = spectral.potential_Q(k, m, r) * r * r
    assert val <= 0.75 * (1.0 + 1e-12)


def test_condition_311_sup_sits_at_horizon():
    cond = spectral.condition_311(1.1, 2.0)
    assert not cond
    assert not bool(cond)
    assert cond.sup_value == pytest.approx(0.5, rel=1e-12)
    assert cond.r_at_sup == pytest.approx(R0_M2, rel=1e-12)


def test_condition_311_pointwise_large_mass():
    # far from the horizon the expression collapses with the mass
    assert spectral.condition_311_value(2.0, 1e6, 1.0) < 1e-2


def test_condition_311_rejects_k1():
    with pytest.raises(ValueError):
        spectral.condition_311(1.0, 2.0)


# ------------------------------------------------------------- A_lam

def test_a_lambda_worked_value():
    assert spectral.a_lambda(1.0, 2.0, 0, -1.0, 1.0) == -15.25


def test_a_lambda_nonpositive_for_l_ge_1():
    r = np.geomspace(R0_M2, 1e4, 300)
    for l in (1, 2, 3):
        vals = spectral.a_lambda(1.1, 2.0, l, 0.0, r)
        assert np.all(vals <= 1e-15)


def test_a_lambda_positive_for_l0():
    r = np.geomspace(R0_M2, 1e4, 300)
    assert np.all(spectral.a_lambda(1.1, 2.0, 0, 0.0, r) > 0.0)


# -------------------------------------------------------- mode counts

def test_mode_counts_vanish_for_l_ge_1():
    for l in (1, 2, 3):
        res = spectral.mode_negative_count(1.1, 2.0, l, 100.0)
        assert res.count == 0
        assert res.smallest > 0.0


def test_mode_count_one_for_l0():
    for R in (10.0, 100.0, 1000.0):
        res = spectral.mode_negative_count(1.1, 2.0, 0, R)
        assert res.count == 1
        assert res.smallest < 0.0


def test_mode_count_transform_consistency():
    # same problem straight in r (Robin ghost) vs in log radius (Neumann)
    k, m, R = 1.1, 2.0, 100.0

    def pot_r(r):
        return -(0.25 / (r * r) + spectral.potential_Q(k, m, r))

    def wgt_r(r):
        return spectral.weight(k, m, r)

    direct = sl.sl_negative_count(pot_r, wgt_r, R0_M2, R, n_grid=4096,
                                  bc_left=("robin", 1.0 / (2.0 * R0_M2)),
                                  bc_right="dirichlet")
    transformed = spectral.mode_negative_count(k, m, 0, R, n_grid=4096)
    assert direct.count == transformed.count == 1
    assert direct.smallest == pytest.approx(transformed.smallest, rel=5e-3)


def test_mode_flat_problem_matches_shooting_oracle():
    # Q stripped out, unit weight: count 0, smallest 5.785e-4
    res = sl.sl_negative_count(lambda r: -0.25 / (r * r), 1.0, 1.0, 100.0,
                               n_grid=4096,
                               bc_left=("robin", 0.5),
                               bc_right="dirichlet")
    assert res.count == 0
    assert res.smallest == pytest.approx(0.0005785329896857928, abs=1e-8)


def test_mode_count_validation():
    with pytest.raises(ValueError):
        spectral.mode_negative_count(1.1, 2.0, -1, 100.0)
    with pytest.raises(ValueError):
        spectral.mode_negative_count(1.1, 2.0, 0.5, 100.0)
    with pytest.raises(ValueError):
        spectral.mode_negative_count(1.1, 2.0, 0, 0.5)


# ---------------------------------------------------------- the index

def test_morse_index_sigma0():
    rep = spectral.morse_index_sigma0(1.1, 2.0)
    assert rep.index == 1
    assert rep.supported_by_theory
    assert not rep.condition_311
    assert rep.identity_residual < 1e-6
    # per-mode counts non-decreasing in R, and l >= 1 contribute nothing
    for l in range(rep.l_max + 1):
        seq = [rep.counts[(R, l)] for R in rep.R_sequence]
        assert all(b >= a for a, b in zip(seq, seq[1:]))
        if l >= 1:
            assert seq[-1] == 0
    rows = rep.per_mode()
    assert len(rows) == 4 * len(rep.R_sequence)
    assert rows[0]["l"] == 0 and rows[-1]["l"] == rep.l_max


def test_morse_index_sigma0_classical_flagged():
    rep = spectral.morse_index_sigma0(1.0, 2.0)
    assert rep.index == 1
    assert not rep.supported_by_theory
    assert "classical" in rep.note
    assert rep.identity_residual < 1e-6


def test_morse_index_sigma0_validation():
    with pytest.raises(ValueError):
        spectral.morse_index_sigma0(1.1, 2.0, l_max=2)
    with pytest.raises(ValueError):
        spectral.morse_index_sigma0(1.1, 2.0, R_list=[100.0, 10.0])
    with pytest.raises(ValueError):
        spectral.morse_index_sigma0(1.1, 2.0, R_list=[100.0])


def test_identity_residual_small_for_k1():
    assert spectral.identity_residual(1.0, 2.0, 0, 100.0) < 1e-6


# ----------------------------------------------------------- rayleigh

def test_rayleigh_matches_ground_state():
    lam, v = spectral.ground_state(1.1, 2.0, 0, 100.0, n_grid=16384)
    assert lam < 0.0
    q = spectral.rayleigh_quotient(1.1, 2.0, v, 100.0, n_grid=16384)
    assert q == pytest.approx(lam, abs=1e-6)


class _CosineCutoff:
    """1 on [r0, r_knee], cosine rolloff to 0 at R."""

    def __init__(self, r_knee, R):
        self.r_knee = r_knee
        self.R = R

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        tau = np.clip((r - self.r_knee) / (self.R - self.r_knee), 0.0, 1.0)
        return np.cos(0.5 * math.pi * tau)

    def derivative(self):
        def dv(r):
            r = np.asarray(r, dtype=float)
            span = self.R - self.r_knee
            tau = (r - self.r_knee) / span
            inside = (tau > 0.0) & (tau < 1.0)
            out = np.zeros_like(r)
            out[inside] = -0.5 * math.pi / span * np.sin(
                0.5 * math.pi * tau[inside])
            return out
        return dv


def test_rayleigh_cutoff_is_negative():
    fn = _CosineCutoff(100.0, 1000.0)
    assert spectral.rayleigh_quotient(1.1, 2.0, fn, 1000.0) < 0.0


def test_rayleigh_min_max():
    smallest = spectral.mode_negative_count(1.1, 2.0, 0, 1000.0).smallest
    for fn in (_CosineCutoff(100.0, 1000.0), _CosineCutoff(5.0, 1000.0),
               lambda r: np.sin(math.pi * np.log(r) / math.log(1000.0))):
        q = spectral.rayleigh_quotient(1.1, 2.0, fn, 1000.0)
        assert q >= smallest - 1e-6


def test_rayleigh_validation():
    with pytest.raises(ValueError):
        spectral.rayleigh_quotient(1.1, 2.0, lambda r: np.ones_like(r),
                                   100.0)
    with pytest.raises(ValueError):
        spectral.rayleigh_quotient(1.1, 2.0, lambda r: np.zeros_like(r),
                                   100.0)


# ------------------------------------------------------------ riccati

def test_riccati_anchor_at_horizon():
    assert spectral.riccati_floor(1.1, 2.0, 1, R0_M2) == 0.5
    r0 = metrics.horizon_radius(3, 1.1, 0.8)
    assert spectral.riccati_floor(1.1, 0.8, 1, r0) == pytest.approx(
        1.0 / (2.0 * r0), rel=1e-14)


def test_riccati_identity_residual():
    for l in (1, 2):
        for r in (1.5, 3.0, 10.0):
            assert spectral.riccati_residual(1.1, 2.0, l, r) < 1e-8


def test_riccati_f_midpoint_value():
    for alpha in (1.0, 3.0, 5.0):
        for m in (0.8, 2.0, 5.0):
            assert spectral.riccati_f(m, m / 2.0, alpha) == pytest.approx(
                1.0 / m, rel=1e-15)


def test_riccati_rejects_l0():
    with pytest.raises(ValueError):
        spectral.riccati_floor(1.1, 2.0, 0, 2.0)
    with pytest.raises(ValueError):
        spectral.riccati_residual(1.1, 2.0, 0, 2.0)


# ----------------------------------------------------- profile index

def test_morse_index_profile_small_t0():
    met = metrics.schwarzschild_metric(3, 1.1, 2.0)
    curve = profile.solve_profile(met, t0=1e-3)
    rep = spectral.morse_index_profile(met, curve)
    assert rep.index == 1
    assert rep.t0 == 1e-3
    for l in (1, 2, 3):
        assert rep.counts[(rep.R_sequence[-1], l)] == 0
    # ground mode matches the slice problem in the t0 -> 0 limit
    slice_res = spectral.mode_negative_count(1.1, 2.0, 0, 100.0)
    assert rep.smallest[(100.0, 0)] == pytest.approx(slice_res.smallest,
                                                     rel=1e-3)


def test_morse_index_profile_validation():
    met4 = metrics.schwarzschild_metric(4, 1.0, 2.0)
    curve4 = profile.solve_profile(met4, t0=0.3)
    with pytest.raises(ValueError):
        spectral.morse_index_profile(met4, curve4)
    met = metrics.schwarzschild_metric(3, 1.1, 2.0)
    curve = profile.solve_profile(met, t0=0.3)
    with pytest.raises(ValueError):
        spectral.morse_index_profile(met, curve, l_max=1)
    with pytest.raises(ValueError):
        spectral.morse_index_profile(met, curve, R_list=[100.0, 10.0])


def test_catenoid_index_is_one():
    res = spectral.catenoid_index()
    assert res.count == 1
    assert res.converged
    assert res.smallest < 0.0
    wider = spectral.catenoid_index(T=40.0, n_grid=8192)
    assert wider.count == 1
