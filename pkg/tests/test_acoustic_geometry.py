import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from artifact.acoustic_geometry import (
    AnalyticFan,
    ConstantBackground,
    CotangentPoint,
    FrontGraph,
    SampledBackground,
    SmoothChart,
    characteristic_trace_cartesian,
    chart_metric,
    dwbar_du,
    frame_at,
    frame_from_state,
    geodesic_rhs,
    hamiltonian,
    integrate_geodesic,
    trace_front,
    trace_front_cartesian,
    wbar_along,
)
from artifact.gas_model import DomainError, GasLaw, PrimitiveState, VacuumError
from artifact.riemann1d import lambda2
from artifact.solver2d import Perturbation, RunConfig, run


@pytest.fixture
def fan(law):
    return AnalyticFan(law, PrimitiveState(1.0, -0.5), PrimitiveState(1.0, 0.5))


def test_frame_constant_background(law):
    fr = frame_at(ConstantBackground(law, 1.0), (0.3, 0.1, 0.2), (-1.0, 0.0))
    assert np.allclose(fr.L, [1.0, 1.0, 0.0], atol=1e-15)
    assert np.allclose(fr.Xhat, [0.0, 0.0, 1.0], atol=1e-15)


def test_frame_metric_relations_random():
    rng = np.random.default_rng(1)
    for _ in range(100):
        c = rng.uniform(0.1, 3.0)
        v = rng.uniform(-2, 2, 2)
        fr = frame_from_state(c, v, rng.normal(size=2), kappa=rng.uniform(0.01, 2.0))
        assert max(abs(r) for r in fr.residuals().values()) < 1e-10


def test_frame_errors():
    with pytest.raises(DomainError):
        frame_from_state(1.0, (0, 0), (0.0, 0.0))
    with pytest.raises(VacuumError):
        frame_from_state(0.0, (0, 0), (1.0, 0.0))


def test_frame_on_analytic_fan(law, fan):
    t = 0.4
    for xi in (0.7, 0.9, 1.2):
        fr = frame_at(fan, (t, xi * t, 1.0), (-1.0, 0.0))
        s = fan.sample(t, xi * t, 1.0)
        assert np.allclose(fr.L[1:], [s.v[0] + s.c, s.v[1]], atol=1e-15)


def test_analytic_fan_gradient_matches_finite_differences(fan):
    t, h = 0.4, 1e-7
    for x1 in (0.32, 0.4, 0.55, -0.4, 0.0, 0.8):
        s = fan.sample(t, x1, 0.0)
        fd = (fan.sample(t, x1 + h, 0.0).values - fan.sample(t, x1 - h, 0.0).values) / (2 * h)
        assert np.allclose(s.grad[:, 0], fd, atol=1e-6)


def test_characteristic_trace_on_fan_is_a_ray(law, fan):
    lam = lambda2(law, fan.fan.right)
    for u in (0.1, 0.3, 0.6):
        xi0 = lam - u
        p = characteristic_trace_cartesian(fan, (xi0 * 0.1, 0.5), 0.1, 0.5, t_eval=np.linspace(0.1, 0.5, 9))
        assert np.max(np.abs(p.x1 / p.t - xi0)) < 1e-8
        assert np.max(np.abs(p.kappa / p.t - 1.0)) < 1e-8
        assert np.max(np.abs(np.hypot(p.That[:, 0], p.That[:, 1]) - 1.0)) < 1e-8
        tw = [dwbar_du(fan, p.t[k], p.x1[k], p.x2[k], p.That[k], p.kappa[k]) for k in range(p.t.size)]
        assert np.allclose(tw, -2.0 / (law.gamma + 1.0), atol=1e-8)


def test_characteristic_trace_constant_state(law):
    bg = ConstantBackground(law, 1.0, 0.2, 0.1)
    p = characteristic_trace_cartesian(bg, (0.0, 0.0), 0.0, 1.0, kappa0=1.0, t_eval=np.linspace(0, 1, 5))
    assert np.allclose(p.x1, 1.2 * p.t, atol=1e-12)
    assert np.allclose(p.x2, 0.1 * p.t, atol=1e-12)
    assert np.allclose(p.kappa, 1.0, atol=1e-12)


def test_trace_front_cartesian_and_wbar_along(law, fan):
    lam = lambda2(law, fan.fan.right)
    paths = trace_front_cartesian(fan, lambda x2: lam - 0.2, [0.0, 1.0], 0.05, 0.3, t_eval=[0.05, 0.3])
    wb_r = 1.0 + 0.25  # c + v/2 on the right
    for p in paths:
        assert np.allclose(wbar_along(fan, p), wb_r - 2.0 / 3.0 * 0.2, atol=1e-10)


def test_sampled_background_derivatives_consistent(law):
    cfg = RunConfig(nx1=80, nx2=16, t_end=0.2, output_times=(0.1, 0.2), perturbation=Perturbation(0.02))
    bg = SampledBackground.from_run(run(cfg))
    h = 1e-5
    rng = np.random.default_rng(0)
    for _ in range(10):
        t, x1, x2 = 0.15, rng.uniform(-0.5, 0.5), rng.uniform(0, 2 * np.pi)
        s = bg.sample(t, x1, x2)
        d1 = (bg.sample(t, x1 + h, x2).values - bg.sample(t, x1 - h, x2).values) / (2 * h)
        d2 = (bg.sample(t, x1, x2 + h).values - bg.sample(t, x1, x2 - h).values) / (2 * h)
        assert np.allclose(s.grad[:, 0], d1, atol=1e-4)
        assert np.allclose(s.grad[:, 1], d2, atol=1e-4)
    assert np.allclose(bg.sample(0.1, 0.2, 0.3).values, bg.sample(0.1, 0.2, 0.3 + 2 * np.pi).values, atol=1e-12)
    with pytest.raises(DomainError):
        bg.sample(0.3, 0.0, 0.0)


# Hamiltonian system


def test_outgoing_generator(law):
    chart = SmoothChart.fan(law, PrimitiveState(1.0, 0.5))
    d = geodesic_rhs(chart, CotangentPoint(0.0, 0.3, 1.0, 0.0, -1.0, 0.0))
    assert np.allclose(d[:3], [1.0, 0.0, 0.0], atol=0)


def test_flat_geodesic_is_straight():
    chart = SmoothChart(c0=1.0)
    tr = integrate_geodesic(chart, CotangentPoint(0.0, 0.25, 0.5, 0.0, -1.0, 0.0), 1.0, tol=1e-12)
    assert tr.status == "reached"
    assert np.max(np.abs(tr.y[0] - tr.tau)) < 1e-12
    assert np.max(np.abs(tr.y[1] - 0.25)) < 1e-12
    assert np.max(np.abs(tr.y[2] - 0.5)) < 1e-12


def _wavy_chart():
    return SmoothChart(c0=1.0, cu=-1 / 3, ct=0.1, cth=0.05, k1=0.1, g1=0.2, x0=0.05, x1=0.02)


@settings(max_examples=20, deadline=None)
@given(st.floats(0.0, 0.5), st.floats(0.0, 2 * np.pi), st.floats(-1.0, 1.0))
def test_hamiltonian_conserved(u0, th0, pth):
    chart = _wavy_chart()
    start = CotangentPoint(0.0, u0, th0, 0.0, -1.0, pth)
    assert abs(hamiltonian(chart, start)) < 1e-15
    tol = 1e-10
    tr = integrate_geodesic(chart, start, 1.0, tol=tol, method="DOP853")
    span = max(tr.tau[-1] - tr.tau[0], 1.0)
    assert np.max(np.abs(tr.H - tr.H[0])) / span < 1e-9


def test_geodesic_is_null():
    chart = _wavy_chart()
    tr = integrate_geodesic(chart, CotangentPoint(0.0, 0.2, 0.7, 0.0, -1.0, 0.6), 0.8, tol=1e-11, method="DOP853")
    for k in range(1, tr.tau.size):
        d = geodesic_rhs(chart, tr.y[:, k])
        assert abs(chart_metric(chart, *tr.y[:3, k], d[:3])) < 1e-8


def test_second_order_expansion_by_quadratic_fit():
    chart = _wavy_chart()
    p = 0.8
    start = CotangentPoint(0.0, 0.2, 0.7, 0.0, -1.0, p)
    taus = np.linspace(0.0, 2e-3, 21)
    tr = integrate_geodesic(chart, start, 1.0, tol=1e-13, method="DOP853", dense_tau=taus)
    cv = chart.evaluate(0.0, 0.2, 0.7)
    expected = 0.5 * cv.dmu[0] * cv.ginv * p * p
    a2 = np.polyfit(tr.tau, tr.y[1], 3)[-3]
    assert 2 * a2 == pytest.approx(expected, rel=1e-5)
    assert np.all(tr.y[1][1:] > 0.2)


def test_trichotomy_pu_zero_stays_on_singular_set():
    chart = _wavy_chart()
    tr = integrate_geodesic(chart, CotangentPoint(0.0, 0.2, 0.7, -1.0, 0.0, 0.3), 1.0, tau_max=1.0)
    assert tr.status == "tau_max"
    assert np.all(tr.y[0] == 0.0)


def test_front_constant_graph_is_coordinate_hypersurface(law):
    right = PrimitiveState(1.0, 0.5)
    surf = trace_front(SmoothChart.fan(law, right), FrontGraph.constant(0.3), 8, 0.5, tol=1e-11)
    assert all(s == "reached" for s in surf.status)
    pts = surf.grid(11)
    assert np.max(np.abs(pts[:, :, 1] - 0.3)) < 1e-10
    assert np.max(np.abs(pts[:, :, 2] - surf.alpha[:, None])) < 1e-10


def test_front_needs_eight_rays(law):
    with pytest.raises(DomainError):
        trace_front(SmoothChart(), FrontGraph.constant(0.1), 4, 0.5)


def test_front_graph_from_samples_is_interpolant():
    th = 2 * np.pi * np.arange(16) / 16
    vals = 0.4 + 0.1 * np.cos(th) - 0.05 * np.sin(3 * th)
    g = FrontGraph.from_samples(vals)
    for a in (0.1, 1.3, 4.0):
        assert g.f(a) == pytest.approx(0.4 + 0.1 * math.cos(a) - 0.05 * math.sin(3 * a), abs=1e-13)
        assert g.fprime(a) == pytest.approx(-0.1 * math.sin(a) - 0.15 * math.cos(3 * a), abs=1e-12)
    assert g.f(0.0) == pytest.approx(g.f(2 * np.pi), abs=1e-14)


def test_trajectory_csv(tmp_path):
    tr = integrate_geodesic(SmoothChart(), CotangentPoint(0.0, 0.1, 0.2, 0.0, -1.0, 0.0), 0.5)
    path = tmp_path / "traj.csv"
    tr.to_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "tau,t,u,theta,p_t,p_u,p_theta,H"
    assert len(lines) == tr.tau.size + 1
