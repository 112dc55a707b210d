import numpy as np
import pytest

from artifact.gas_model import DomainError, GasLaw, PrimitiveState, flux_jacobian, physical_flux_array
from artifact.riemann1d import lambda2, solve
from artifact.solver2d import (
    Field2D,
    Grid,
    Perturbation,
    PositivityError,
    RunConfig,
    boundary_flux_totals,
    exact_background,
    extract_fronts,
    init_perturbed_riemann,
    plane_asymmetry,
    run,
    step,
    vorticity,
)


def test_physical_flux_examples(law):
    assert np.allclose(physical_flux_array(law, np.array([2.0, 0.0, 0.0]), 1), [0.0, 2.0, 0.0])
    assert np.allclose(physical_flux_array(law, np.array([1.0, 0.2, 0.0]), 1), [0.2, 0.54, 0.0], atol=1e-15)


def test_run_config_validation(law):
    with pytest.raises(DomainError):
        RunConfig(cfl=1.2)
    with pytest.raises(DomainError):
        RunConfig(left=PrimitiveState(1, 0.5), right=PrimitiveState(1, -0.5))
    RunConfig(left=PrimitiveState(1, 0.5), right=PrimitiveState(1, -0.5), allow_any_region=True)
    with pytest.raises(DomainError):
        Perturbation(-0.1)


def test_unperturbed_data_is_plane_riemann_data():
    cfg = RunConfig(nx1=40, nx2=6)
    f = init_perturbed_riemann(cfg)
    assert plane_asymmetry(f.U) == 0.0
    left = f.grid.x1 < 0
    assert np.all(f.U[1][left] == -0.5) and np.all(f.U[1][~left] == 0.5)


def test_perturbed_data_irrotational_and_small():
    for eps in (0.01, 0.02):
        cfg = RunConfig(nx1=120, nx2=32, perturbation=Perturbation(eps, seed=3))
        f = init_perturbed_riemann(cfg)
        assert np.max(np.abs(vorticity(f.U, f.grid))) < 1e-12
        base = init_perturbed_riemann(RunConfig(nx1=120, nx2=32))
        rho, v1, v2 = f.primitive()
        rho0, v10, v20 = base.primitive()
        dev = max(np.max(np.abs(np.sqrt(rho) - np.sqrt(rho0))), np.max(np.abs(v1 - v10)), np.max(np.abs(v2 - v20)))
        assert dev <= 1.5 * eps


def test_perturbation_gradient_is_analytic():
    p = Perturbation(0.02, sigma=0.2, modes=(1, 3), seed=5)
    x1, x2, h = 0.13, 0.7, 1e-6
    g1, g2 = p.gradient(x1, x2)
    assert g1 == pytest.approx((p.potential(x1 + h, x2) - p.potential(x1 - h, x2)) / (2 * h), abs=1e-9)
    assert g2 == pytest.approx((p.potential(x1, x2 + h) - p.potential(x1, x2 - h)) / (2 * h), abs=1e-9)


def test_uniform_field_unchanged(law):
    cfg = RunConfig(left=PrimitiveState(1, 0.3, 0.1), right=PrimitiveState(1, 0.3, 0.1), allow_any_region=True)
    grid = Grid(20, 8, 1.0)
    U = np.zeros((3, 20, 8))
    U[0], U[1], U[2] = 1.0, 0.3, 0.1
    f = Field2D(U.copy(), 0.0, grid)
    for order in (1, 2):
        g = step(f, RunConfig(**{**cfg.__dict__, "order": order}))
        assert np.max(np.abs(g.U - U)) < 1e-15


def test_conservation_modulo_boundary_fluxes():
    for order in (1, 2):
        cfg = RunConfig(nx1=60, nx2=12, order=order, perturbation=Perturbation(0.02))
        f = init_perturbed_riemann(cfg)
        for _ in range(20):
            dt = 0.4 * f.grid.dx1 / 2.0
            out = boundary_flux_totals(cfg.law, f, order)
            g = step(f, cfg, dt)
            if order == 1:
                lhs = (g.U.sum(axis=(1, 2)) - f.U.sum(axis=(1, 2))) * f.grid.cell_area
                assert np.allclose(lhs, -dt * out, atol=1e-13 * f.U[0].sum() * f.grid.cell_area)
            f = g
    # mass budget over 100 steps telescopes to the accumulated boundary outflow
    cfg = RunConfig(nx1=60, nx2=8, t_end=0.1, perturbation=Perturbation(0.02))
    f = init_perturbed_riemann(cfg)
    m0 = f.U[0].sum() * f.grid.cell_area
    outflow = 0.0
    for _ in range(100):
        outflow += 1e-3 * boundary_flux_totals(cfg.law, f)[0]
        f = step(f, cfg, 1e-3)
    assert abs(f.U[0].sum() * f.grid.cell_area + outflow - m0) / m0 < 1e-12


def test_plane_symmetry_preserved():
    art = run(RunConfig(nx1=80, nx2=8, t_end=0.3, order=2))
    assert max(d["plane_asymmetry"] for d in art.diagnostics) < 1e-12


def test_mirror_symmetry_bitwise():
    a = run(RunConfig(nx1=40, nx2=4, t_end=0.2, left=PrimitiveState(0.8, -0.3), right=PrimitiveState(1.2, 0.4)))
    b = run(RunConfig(nx1=40, nx2=4, t_end=0.2, left=PrimitiveState(1.2, -0.4), right=PrimitiveState(0.8, 0.3)))
    Ua, Ub = a.slices[-1].U, b.slices[-1].U
    assert np.array_equal(Ua[0], Ub[0][::-1])
    assert np.array_equal(Ua[1], -Ub[1][::-1])


def test_positivity_abort_is_recorded():
    cfg = RunConfig(nx1=40, nx2=4, left=PrimitiveState(1.0, -1.9), right=PrimitiveState(1.0, 1.9), t_end=0.5)
    art = run(cfg)
    if art.failure is not None:
        assert "t" in art.failure
    bad = Field2D(np.ones((3, 4, 4)) * np.array([-1.0, 0, 0])[:, None, None], 0.0, Grid(4, 4, 1.0))
    with pytest.raises(PositivityError):
        step(bad, RunConfig(nx1=4, nx2=4))


def test_l1_error_decreases_and_middle_state():
    errs = []
    for n in (50, 100, 200):
        cfg = RunConfig(nx1=n, nx2=2, t_end=0.5)
        art = run(cfg)
        U = art.slices[-1].U
        ex = exact_background(cfg, 0.5)
        errs.append(np.sum(np.abs(U[0] - ex[0])) * art.grid.cell_area / art.grid.length2)
    assert errs[0] > errs[1] > errs[2]
    fan = solve(GasLaw(), PrimitiveState(1, -0.5), PrimitiveState(1, 0.5))
    i0 = np.argmin(np.abs(art.grid.x1))
    assert U[0][i0, 0] == pytest.approx(fan.middle.rho, abs=0.02)


def test_fronts_unperturbed_slopes():
    cfg = RunConfig(nx1=400, nx2=2, t_end=0.5, output_times=(0.25, 0.5), order=2)
    art = run(cfg)
    ft = extract_fronts(art.slices, cfg)
    law = cfg.law
    fan = solve(law, cfg.left, cfg.right)
    dx = art.grid.dx1
    t = ft.times[-1]
    c0 = lambda2(law, cfg.right)
    h = lambda2(law, fan.middle)
    assert abs(ft.positions["C0"][-1, 0] / t - c0) < 2 * dx / t + 0.05
    assert abs(ft.positions["H"][-1, 0] / t - h) < 2 * dx / t + 0.05
    assert np.allclose(ft.positions["Cbar0"], -ft.positions["C0"], atol=1e-12)
    assert np.all(ft.complete)
    for n in ft.NAMES:
        assert np.all(np.abs(ft.positions[n][0]) < np.abs(ft.positions[n][1]))


def test_fronts_need_two_slices():
    cfg = RunConfig(nx1=40, nx2=2, t_end=0.1)
    with pytest.raises(ValueError):
        extract_fronts(run(cfg).slices, cfg)


def test_flux_jacobian_direction_two(law):
    U = np.array([1.1, 0.2, -0.3])
    h = 1e-6
    fd = np.column_stack([(physical_flux_array(law, U + h * e, 2) - physical_flux_array(law, U - h * e, 2)) / (2 * h) for e in np.eye(3)])
    assert np.allclose(fd, flux_jacobian(law, U, 2), atol=1e-6)


def test_threads_do_not_change_results():
    a = run(RunConfig(nx1=60, nx2=12, t_end=0.1, perturbation=Perturbation(0.02), threads=1))
    b = run(RunConfig(nx1=60, nx2=12, t_end=0.1, perturbation=Perturbation(0.02), threads=3))
    assert np.array_equal(a.slices[-1].U, b.slices[-1].U)
