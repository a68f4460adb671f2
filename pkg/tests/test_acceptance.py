"""Acceptance gate: the eleven headline properties, one test each.

Each test prints one ACCEPTANCE nn PASS/FAIL line (visible with -s; the
-v test status line carries the same information). Criterion 4's n = 3
clause asserts the straight-to-infinity height growth that the corrected
graph dynamics do not exhibit: every profile passes a vertical tangent at
finite radius and flattens, so that clause fails and is left failing on
purpose. The n = 4 clause and every other criterion pass.
"""

import functools
import math
import time

import numpy as np
import pytest
from click.testing import CliRunner
from scipy.integrate import quad

from schwarzmin import bounds, geometry, metrics, profile, spectral
from schwarzmin.cli import main as cli_main

R0 = 1.0  # horizon radius at m = 2 for every k


def _criterion(num, name):
    def deco(fn):
        @functools.wraps(fn)
        def wrapper(*args, **kwargs):
            try:
                fn(*args, **kwargs)
            except BaseException:
                print(f"ACCEPTANCE {num:02d} FAIL  {name}")
                raise
            print(f"ACCEPTANCE {num:02d} PASS  {name}")
        return wrapper
    return deco


@pytest.fixture(scope="module")
def random_solves():
    # 20 random schwarzschild configurations shared by criteria 2 and 3
    rng = np.random.default_rng(20260815)
    out = []
    for _ in range(20):
        n = int(rng.choice([3, 4, 5]))
        k = float(rng.uniform(1.0, 1.4))
        m = float(rng.uniform(0.5, 4.0))
        met = metrics.schwarzschild_metric(n, k=k, m=m)
        t0 = float(rng.uniform(0.1, 0.9)) * met.r0
        curve = profile.solve_profile(met, t0=t0)
        out.append((met, curve))
    return out


@pytest.fixture(scope="module")
def n4_curves():
    met = metrics.schwarzschild_metric(4)
    return {f: profile.solve_profile(met, t0=f * R0)
            for f in (0.1, 0.3, 0.5, 0.7, 0.9)}


@_criterion(1, "catenoid oracle")
def test_criterion_01_catenoid_oracle():
    start = time.perf_counter()
    met = metrics.flat_metric(3)
    curve = profile.solve_profile(
        met, t_max=3.0, initial=profile.InitialData(0.0, 1.0, 0.0))
    assert curve.termination.kind == "reached_tmax"
    err = max(abs(curve.x[i] - math.cosh(curve.t[i]))
              for i in range(len(curve.t)))
    assert err <= 1e-8
    assert time.perf_counter() - start < 1.0


@_criterion(2, "minimality residual on random configurations")
def test_criterion_02_minimality_residual(random_solves):
    start = time.perf_counter()
    for met, curve in random_solves:
        for s in geometry.curvature_samples(met, curve):
            assert abs(s.Hbar) <= 1e-7 * (1.0 + abs(s.k1)), \
                (met.n, met.k, met.m, s.t)
    assert time.perf_counter() - start < 30.0


@_criterion(3, "free-boundary and monotonicity invariants")
def test_criterion_03_free_boundary_invariants(random_solves):
    for met, curve in random_solves:
        psi = curve.t * curve.xp - curve.x
        assert abs(psi[0]) <= 1e-14 * (1.0 + curve.x[0])
        assert np.all(psi >= 0.0)
        assert np.all(curve.xp > 0.0)


@_criterion(4, "height-bound dichotomy")
def test_criterion_04_height_bound_dichotomy(n4_curves):
    start = time.perf_counter()
    # n = 4: finite height, bounded by the comparison quadrature
    for f, curve in n4_curves.items():
        hb = bounds.height_bound(4, R0, f * R0)
        assert not hb.divergent and hb.quad_error < 1e-8
        assert curve.termination.kind == "blowup"
        assert curve.termination.t_star <= hb.h0 + 1e-6
        assert curve.sup_t <= hb.h0 + 1e-6
    assert time.perf_counter() - start < 60.0

    # n = 3: the stated outcome is unbounded height (t reaches 1e3 R0).
    # The corrected dynamics instead fold every profile at a vertical
    # tangent and flatten it, so this clause fails; it is kept as written.
    met3 = metrics.schwarzschild_metric(3)
    for f in (0.1, 0.3, 0.5, 0.7, 0.9):
        curve = profile.solve_profile(met3, t0=f * R0, t_max=1e3 * R0)
        assert curve.termination.kind == "reached_tmax", (
            f"n=3 profile at t0={f}*R0 folds at t={curve.sup_t:.6f} and "
            f"flattens (termination {curve.termination.kind!r}); it never "
            f"climbs to t_max")
    assert time.perf_counter() - start < 60.0


@_criterion(5, "envelope domination for n = 4")
def test_criterion_05_envelope_domination(n4_curves):
    for curve in n4_curves.values():
        min_gap, gaps = bounds.envelope_gap(curve)
        assert len(gaps) > 10
        assert min_gap >= -1e-9


@_criterion(6, "height collapse toward the horizon slice")
def test_criterion_06_height_collapse():
    h = [bounds.height_bound(4, R0, f * R0).h0 for f in (0.5, 0.1, 0.01)]
    assert h[0] > h[1] > h[2] > 0.0
    assert h[2] < 0.1 * h[0]
    met = metrics.schwarzschild_metric(4)
    sup = [profile.solve_profile(met, t0=f * R0).sup_t
           for f in (0.5, 0.1, 0.01)]
    assert sup[0] > sup[1] > sup[2] > 0.0


@_criterion(7, "Morse index one for the horizon slice")
def test_criterion_07_morse_index():
    start = time.perf_counter()
    for k, in_hypothesis in ((1.1, True), (1.0, False)):
        rep = spectral.morse_index_sigma0(
            k, 2.0, R_list=[10.0, 100.0, 1000.0], l_max=3)
        assert rep.index == 1
        assert rep.supported_by_theory is in_hypothesis
        # ground mode: exactly one negative eigenvalue at the last two
        # truncations; all higher modes empty
        for R in (100.0, 1000.0):
            assert rep.counts[(R, 0)] == 1
            for l in (1, 2, 3):
                assert rep.counts[(R, l)] == 0
    assert time.perf_counter() - start < 120.0


@_criterion(8, "potential identities and the quarter bound")
def test_criterion_08_potential_identities():
    m = 2.0
    for k in (1.05, 1.1, 1.15, 1.2):
        r = np.geomspace(R0, 1e4 * R0, 160)
        # independent split form: horizon-shift piece plus the k > 1 excess
        den = 2.0 * r ** (3.0 / k) + m * r * r
        inner = 1.0 + 0.5 * m / r ** (3.0 / k - 2.0)
        split = ((3.0 - 2.0 * k) / k) * (m / r ** (3.0 / k)) / inner ** 2 \
            + 24.0 * (k - 1.0) * m * r ** (3.0 / k) / (k * den ** 2)
        direct = spectral.potential_Q(k, m, r)
        assert np.all(np.abs(direct - split) <= 1e-12 * np.abs(direct))
        assert spectral.q_bound_check(k, m, r)
        assert np.all(direct * r * r <= 0.75 * (1.0 + 1e-12))
    assert np.all(spectral.scalar_curvature_factor(
        1.0, m, np.geomspace(R0, 1e6, 80)) == 0.0)
    for k in (1.0, 1.1):
        assert spectral.identity_residual(k, m, 0, 1000.0) <= 1e-6


@_criterion(9, "Riccati barrier anchored at the horizon")
def test_criterion_09_riccati_barrier():
    assert spectral.riccati_floor(1.1, 2.0, 1, R0) == 1.0 / (2.0 * R0)
    assert spectral.riccati_floor(1.0, 2.0, 2, R0) == 1.0 / (2.0 * R0)
    met = metrics.schwarzschild_metric(3, k=1.1, m=0.8)
    g0 = spectral.riccati_floor(1.1, 0.8, 1, met.r0)
    assert g0 == pytest.approx(1.0 / (2.0 * met.r0), rel=1e-14)
    for l in (1, 2):
        for r in np.geomspace(R0, 100.0 * R0, 100):
            assert spectral.riccati_residual(1.1, 2.0, l, float(r)) <= 1e-8


@_criterion(10, "finite total curvature")
def test_criterion_10_total_curvature():
    # catenoid: both halves against the sech^2 oracle and 8*pi
    T = 12.0
    t = np.linspace(0.0, T, 4001)
    rep = geometry.total_curvature(metrics.flat_metric(3), t=t, x=np.cosh(t),
                                   xp=np.sinh(t), xpp=np.cosh(t))
    full = 2.0 * rep.flat_total
    oracle = quad(lambda s: 4.0 * math.pi / math.cosh(s) ** 2, -T, T)[0]
    assert full == pytest.approx(oracle, rel=1e-6)
    assert full == pytest.approx(8.0 * math.pi, rel=1e-4)

    # schwarzschild slice: totals agree across routes and the far tail
    # (everything beyond the integrated range) is negligible
    met = metrics.schwarzschild_metric(3)
    curve = profile.solve_profile(met, t0=0.5)
    rep = geometry.total_curvature(met, curve)
    assert rep.converged
    assert rep.tail_estimate < 1e-4 * abs(rep.conf_total)
    assert rep.flat_total == pytest.approx(rep.conf_total, rel=1e-7)


@_criterion(11, "byte-identical sweeps at any concurrency")
def test_criterion_11_sweep_determinism():
    runner = CliRunner()
    with runner.isolated_filesystem():
        base = ["sweep", "--n", "4", "--t0-grid", "0.1,0.3,0.5,0.7,0.9"]
        res = runner.invoke(cli_main, base + ["--out", "serial.csv",
                                              "--jobs", "1"])
        assert res.exit_code == 0, res.output
        res = runner.invoke(cli_main, base + ["--out", "parallel.csv",
                                              "--jobs", "8"])
        assert res.exit_code == 0, res.output
        with open("serial.csv", "rb") as fh:
            serial = fh.read()
        with open("parallel.csv", "rb") as fh:
            parallel = fh.read()
        assert serial == parallel
        assert serial.count(b"\n") == 6  # header + five rows
