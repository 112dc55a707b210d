import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from artifact.acoustic_geometry import characteristic_trace_cartesian
from artifact.data_construction import (
    DiagonalState,
    RightSolution,
    SingularDivisionError,
    a_matrix,
    b_matrix,
    build_chart,
    construct,
    data_on_grid,
    default_u_star,
    diagonalize,
    evaluate_data,
    h0,
    h0bar,
    limiting_data,
    p_inverse,
    p_matrix,
    right_jets,
    taylor_coefficients,
    undiagonalize,
    verify_ansatz,
    write_slice_csv,
)
from artifact.gas_model import DomainError, GasLaw, InvariantState, PrimitiveState, to_invariants
from artifact.riemann1d import sample, solve
from artifact.solver2d import Perturbation

EPS = 0.01
angles = st.floats(0.0, 2 * np.pi)


@pytest.fixture(scope="module")
def gas():
    return GasLaw()


@pytest.fixture(scope="module")
def flat(gas):
    return RightSolution(gas, PrimitiveState(1.0, 0.2))


@pytest.fixture(scope="module")
def bumpy(gas):
    return RightSolution(gas, PrimitiveState(1.0, 0.2), Perturbation(EPS, sigma=0.3))


@pytest.fixture(scope="module")
def bumpy_data(gas, bumpy):
    return {d: construct(gas, bumpy, d) for d in (0.05, 0.025, 0.0125)}


# diagonalization


@settings(max_examples=100)
@given(angles, st.floats(-3, 3), st.floats(-3, 3), st.floats(-3, 3))
def test_diagonalize_round_trip(a, wb, w, p2):
    That = (np.cos(a), np.sin(a))
    inv = InvariantState(wb, w, p2)
    back = undiagonalize(diagonalize(inv, That), That)
    assert np.allclose(back.as_array(), inv.as_array(), atol=1e-14 * (1 + abs(wb) + abs(w) + abs(p2)))


def test_diagonalize_at_plane_normal():
    d = diagonalize(InvariantState(1.1, 0.9, 0.3), (-1.0, 0.0))
    assert (d.U0, d.Um1, d.Um2) == (1.1, -0.3, 0.9)


def test_diagonalize_rejects_non_unit_normal():
    with pytest.raises(DomainError):
        diagonalize(InvariantState(1, 1, 0), (1.0, 1.0))
    with pytest.raises(DomainError):
        undiagonalize(DiagonalState(1, 1, 0), (0.5, 0.0))


def test_similarity_diagonalizes_a_and_b():
    rng = np.random.default_rng(12)
    for a in rng.uniform(0, 2 * np.pi, 100):
        T = (np.cos(a), np.sin(a))
        P, Pi = p_matrix(T), p_inverse(T)
        assert np.allclose(Pi @ P, np.eye(3), atol=1e-14)
        assert np.allclose(Pi @ a_matrix(T) @ P, np.diag([0.0, -1.0, -2.0]), atol=1e-14)
        assert np.allclose(np.sort(np.linalg.eigvals(a_matrix(T)).real), [-2, -1, 0], atol=1e-12)
    # P^-1 B P does not depend on the normal
    ref = p_inverse((1.0, 0.0)) @ b_matrix((1.0, 0.0)) @ p_matrix((1.0, 0.0))
    for a in rng.uniform(0, 2 * np.pi, 20):
        T = (np.cos(a), np.sin(a))
        assert np.allclose(p_inverse(T) @ b_matrix(T) @ p_matrix(T), ref, atol=1e-14)


# chart


def test_default_u_star(gas):
    assert default_u_star(gas, 1.0) == pytest.approx(1.5)


def test_constant_chart_examples(gas, flat):
    ch = build_chart(gas, flat, 0.1)
    assert np.max(np.abs(ch.That1 + 1.0)) == 0.0
    assert np.max(np.abs(ch.That2)) == 0.0
    assert np.max(np.abs(ch.kappa - 0.1)) < 1e-15
    assert float(ch.u_of(0.11, 0.4)) == pytest.approx(0.1, abs=1e-12)
    assert np.max(np.abs(ch.u_of(ch.c0_x1, ch.c0_x2))) < 1e-10
    with pytest.raises(DomainError):
        build_chart(gas, flat, 0.0)


def test_perturbed_chart_bounds(gas, bumpy):
    for d in (0.05, 0.025):
        ch = build_chart(gas, bumpy, d)
        assert np.max(np.abs(ch.That1**2 + ch.That2**2 - 1.0)) < 1e-12
        assert np.max(np.abs(ch.That2)) <= 5 * d * EPS
        assert np.max(np.abs(ch.That1 + 1.0)) <= 5 * (d * EPS) ** 2
        assert np.max(np.abs(ch.kappa / d - 1.0)) <= 5 * d * EPS
        assert np.max(np.abs(ch.u_of(ch.c0_x1, ch.c0_x2))) < 1e-10
        assert np.max(np.abs(ch.Xi)) == 0.0


# Taylor data


def test_u0_coefficients_are_imposed(gas, bumpy_data):
    ch, td = bumpy_data[0.05]
    assert np.allclose(td.U[0, 1], -2.0 / 3.0, atol=1e-15)
    assert np.all(td.U[0, 2:] == 0.0)


def test_first_coefficients_small(gas, bumpy_data):
    for d, (ch, td) in bumpy_data.items():
        assert np.max(np.abs(td.U[1:, 1])) <= 10 * d * EPS


def test_matching_residuals(gas, bumpy_data, flat):
    for d in (0.05, 0.025):
        assert np.max(bumpy_data[d][1].matching_residual) < 1e-8
    _, td = construct(gas, flat, 0.05)
    assert np.max(td.matching_residual) < 1e-12


def test_constant_background_reproduces_exact_fan(gas, flat):
    ch, td = construct(gas, flat, 0.05)
    fan = solve(gas, PrimitiveState(1.0, -0.2), PrimitiveState(1.0, 0.2))
    for u in np.linspace(0.0, 0.3, 7):
        exact = to_invariants(gas, sample(fan, 1.2 - u))
        got = evaluate_data(td, ch, u, 0.7)
        assert np.allclose(got.as_array(), exact.as_array(), atol=1e-12)
    assert np.allclose(td.wbar[1], -2.0 / 3.0, atol=1e-14)
    assert np.all(np.abs(td.w[1:]) < 1e-14)


def test_evaluate_at_u_zero_is_right_trace(gas, bumpy, bumpy_data):
    ch, td = bumpy_data[0.05]
    for j in (0, 5, 17):
        got = evaluate_data(td, ch, 0.0, ch.theta[j])
        s = bumpy.sample(0.05, ch.c0_x1[j], ch.c0_x2[j])
        ref = np.array([s.c + 0.5 * s.v[0], s.c - 0.5 * s.v[0], -s.v[1]])
        assert np.allclose(got.as_array(), ref, atol=1e-12)
    with pytest.raises(DomainError):
        evaluate_data(td, ch, -0.1, 0.0)
    with pytest.raises(DomainError):
        evaluate_data(td, ch, ch.u_star + 0.1, 0.0)


def test_taylor_coefficients_validation(gas, bumpy):
    ch = build_chart(gas, bumpy, 0.05)
    jets = right_jets(ch, bumpy, 4)
    with pytest.raises(DomainError):
        taylor_coefficients(gas, ch, jets, N=0)
    with pytest.raises(SingularDivisionError):
        taylor_coefficients(gas, ch, jets, N=4, kappa_min=1.0)


def test_right_jets_match_traced_rays(gas, bumpy):
    """``L^n U_r`` from the recursion against derivatives of ``P^-1 V_r`` along rays."""
    d = 0.05
    ch = build_chart(gas, bumpy, d)
    jets, _ = right_jets(ch, bumpy, 4)
    h = 0.02
    k = np.arange(17)
    tc = d + h * np.cos(np.pi * k / 16)
    for j in (0, 11, 40):
        T0 = (ch.That1[0, j], ch.That2[0, j])
        start = (ch.c0_x1[j], ch.c0_x2[j])
        fwd = characteristic_trace_cartesian(bumpy, start, d, d + h, T0, ch.kappa[0, j], rtol=1e-13, atol=1e-14, t_eval=np.sort(tc[tc >= d]))
        bwd = characteristic_trace_cartesian(bumpy, start, d, d - h, T0, ch.kappa[0, j], rtol=1e-13, atol=1e-14, t_eval=np.sort(tc[tc < d])[::-1])
        t = np.concatenate([bwd.t[::-1], fwd.t])
        x1 = np.concatenate([bwd.x1[::-1], fwd.x1])
        x2 = np.concatenate([bwd.x2[::-1], fwd.x2])
        Th = np.concatenate([bwd.That[::-1], fwd.That])
        U = np.empty((3, t.size))
        for m in range(t.size):
            s = bumpy.sample(t[m], x1[m], x2[m])
            inv = InvariantState(s.c + 0.5 * s.v[0], s.c - 0.5 * s.v[0], -s.v[1])
            dg = diagonalize(inv, Th[m] / np.hypot(*Th[m]))
            U[:, m] = (dg.U0, dg.Um1, dg.Um2)
        for lam in range(3):
            cheb = np.polynomial.Chebyshev.fit(t, U[lam], 16, domain=[d - h, d + h])
            for n in range(5):
                ref = cheb.deriv(n)(d) if n else cheb(d)
                assert jets[lam, n, j] == pytest.approx(ref, rel=1e-6, abs=1e-7 * 10**n)


# ansatz


def test_ansatz_constant_background_is_trivial(gas, flat):
    ch, td = construct(gas, flat, 0.05)
    rep = verify_ansatz(td, ch, 0.0)
    assert max(abs(v) for v in rep.constants().values()) <= 1e-9
    assert rep.passed


def test_ansatz_perturbed_bounds(gas, bumpy_data):
    ch, td = bumpy_data[0.05]
    rep = verify_ansatz(td, ch, EPS)
    assert rep.passed
    c = rep.constants()
    assert c["E(w)+Ebar(w)"] < 100
    assert c["T(w)+T(psi2)+T(wbar)+2/(g+1)"] < 100
    assert c["curl(v)"] < 100
    assert '"items"' in rep.to_json()


def test_hierarchy_preserved_under_halving(gas, bumpy_data):
    key = "LZ^a(psi)+XhatZ^a(psi)+T Z^a(psi)/delta"
    vals = [verify_ansatz(td, ch, EPS).constants()[key] for ch, td in (bumpy_data[d] for d in (0.05, 0.025, 0.0125))]
    for a, b in zip(vals, vals[1:]):
        assert b <= 1.5 * a


def test_slice_csv(tmp_path, gas, flat):
    ch, td = construct(gas, flat, 0.05, n_theta=16)
    p = tmp_path / "slice.csv"
    write_slice_csv(p, td, ch)
    lines = p.read_text().splitlines()
    assert lines[0] == "theta,u,x1,x2,wbar,w,psi2,kappa,That1,That2"
    assert len(lines) == 1 + ch.u.size * ch.theta.size
    assert data_on_grid(td, ch).shape == (3, ch.u.size, ch.theta.size)


# singular boundary


def test_limiting_data(gas):
    r = InvariantState(1.1, 0.9, -0.05)
    assert limiting_data(r, gas, 0.0) == r
    got = limiting_data(r, gas, 0.3)
    assert got.wbar == pytest.approx(1.1 - 0.2, abs=1e-15)
    assert (got.w, got.psi2) == (0.9, -0.05)
    us = np.linspace(0, 1, 5)
    wb = [limiting_data(r, gas, u).wbar for u in us]
    assert np.allclose(np.diff(wb) / np.diff(us), -2.0 / 3.0, atol=1e-14)


def test_h0_examples(gas):
    g = h0(gas, 1.1, 0.7)
    for a in (0.0, 1.0, 4.0):
        assert g.f(a) == pytest.approx(0.6, abs=1e-14)
        assert g.fprime(a) == 0.0
    gb = h0bar(gas, 1.1, 0.9)
    assert gb.f(0.3) == pytest.approx(0.3, abs=1e-14)
    th = 2 * np.pi * np.arange(16) / 16
    gv = h0(gas, 1.1 + 0.01 * np.cos(th), 0.7 * np.ones(16))
    assert gv.f(th[3]) == pytest.approx(1.5 * (0.4 + 0.01 * np.cos(th[3])), abs=1e-13)
    with pytest.raises(DomainError):
        h0(gas, 0.7, 1.1)
    with pytest.raises(DomainError):
        h0(gas, 3.0, 0.0, u_star=1.5)
