"""Relative entropy diagnostics for comparing an entropy solution with a classical one.

With the mechanical energy ``eta`` as entropy, the relative entropy
``alpha(U, Ubar)`` is the Bregman divergence of ``eta`` and ``beta`` the
matching relative flux. Both act on conserved variables ``(rho, P1, P2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from .gas_model import (
    ConservedState,
    DomainError,
    GasLaw,
    entropy_gradient,
    entropy_hessian,
    entropy_pair_conserved,
    hessian_eigenvalues,
    invariants_from_cv,
    physical_flux_array,
)

__all__ = [
    "alpha",
    "beta",
    "qf_terms",
    "entropy_hessian",
    "hessian_eigenvalues",
    "norm_equivalence_constants",
    "flux_bound_constant",
    "entropy_inequality_residual",
    "project_to_coarse",
    "weak_strong_compare",
    "RelEntropyReport",
]


def _as_array(U):
    if isinstance(U, ConservedState):
        return U.as_array()
    return np.asarray(U, dtype=float)


def _check(U):
    if np.any(np.asarray(U[0]) <= 0):
        raise DomainError("relative entropy needs positive densities")


def alpha(law: GasLaw, U, Ubar):
    """Relative entropy ``eta(U) - eta(Ubar) - grad eta(Ubar) . (U - Ubar)``.

    Accepts single states or arrays with the component axis first.
    """
    U = _as_array(U)
    Ub = _as_array(Ubar)
    _check(U)
    _check(Ub)
    eta = entropy_pair_conserved(law, U)[0]
    etab = entropy_pair_conserved(law, Ub)[0]
    grad = entropy_gradient(law, Ub)
    a = eta - etab - np.sum(grad * (U - Ub), axis=0)
    # the Bregman divergence is exactly zero on equal states
    a = np.where(np.all(U == Ub, axis=0), 0.0, a)
    return float(a) if np.ndim(a) == 0 else a


def beta(law: GasLaw, U, Ubar) -> np.ndarray:
    """Relative entropy flux, one entry per direction (component axis first)."""
    U = _as_array(U)
    Ub = _as_array(Ubar)
    _check(U)
    _check(Ub)
    _, q1, q2 = entropy_pair_conserved(law, U)
    _, qb1, qb2 = entropy_pair_conserved(law, Ub)
    grad = entropy_gradient(law, Ub)
    out = []
    for d, q, qb in ((1, q1, qb1), (2, q2, qb2)):
        dF = physical_flux_array(law, U, d) - physical_flux_array(law, Ub, d)
        out.append(q - qb - np.sum(grad * dF, axis=0))
    return np.array(out)


def qf_terms(law: GasLaw, U, Ubar):
    """Quadratic flux remainders ``(QF1, QF2)``.

    ``QFi = F^i(U) - F^i(Ubar) - dF^i(Ubar)(U - Ubar)``, which reduces to
    ``(0, Bregman_p + rho (v1 - vb1)^2, rho (v1 - vb1)(v2 - vb2))`` for i = 1
    and the analogue for i = 2; ``Bregman_p`` is
    ``p(rho) - p(rhob) - p'(rhob)(rho - rhob)``.
    """
    U = _as_array(U)
    Ub = _as_array(Ubar)
    _check(U)
    _check(Ub)
    rho, rb = U[0], Ub[0]
    dv1 = U[1] / rho - Ub[1] / rb
    dv2 = U[2] / rho - Ub[2] / rb
    breg = law.pressure(rho) - law.pressure(rb) - law.dpressure(rb) * (rho - rb)
    zero = np.zeros_like(np.asarray(rho, dtype=float))
    qf1 = np.array([zero, breg + rho * dv1 * dv1, rho * dv1 * dv2])
    qf2 = np.array([zero, rho * dv1 * dv2, breg + rho * dv2 * dv2])
    return qf1, qf2


# --------------------------------------------------------------------------
# constants on compact sets


def _hull_box(states, margin=0.1):
    """Box ``[rho_min, rho_max] x [|v| <= vmax]`` around states with relative margin."""
    U = np.asarray(states, dtype=float).reshape(3, -1)
    rho = U[0]
    v = np.hypot(U[1] / rho, U[2] / rho)
    rlo, rhi = float(rho.min()), float(rho.max())
    span = max(rhi - rlo, 1e-12 * rhi)
    return max(rlo - margin * span, 0.5 * rlo), rhi + margin * span, float(v.max()) * (1 + margin) + 1e-12


def norm_equivalence_constants(law: GasLaw, states, margin: float = 0.1, n: int = 41):
    """Constants ``(c1, c2)`` with ``c1 |U-Ub|^2 <= alpha <= c2 |U-Ub|^2`` on the state hull.

    By Taylor's theorem ``alpha = 1/2 (U-Ub)^T H(xi) (U-Ub)`` for some
    ``xi`` on the segment, so half the extreme Hessian eigenvalues over the
    (convex) hull box bound the ratio.
    """
    rlo, rhi, vmax = _hull_box(states, margin)
    lo, hi = math.inf, 0.0
    for rho in np.linspace(rlo, rhi, n):
        for vm in np.linspace(0.0, vmax, n):
            for ang in (0.0, 0.25 * np.pi):
                U = np.array([rho, rho * vm * math.cos(ang), rho * vm * math.sin(ang)])
                ev = hessian_eigenvalues(law, U)
                lo = min(lo, ev[0])
                hi = max(hi, ev[-1])
    return 0.5 * lo, 0.5 * hi


def flux_bound_constant(law: GasLaw, states, margin: float = 0.1, samples: int = 4000, seed: int = 0) -> float:
    """Sampled constant ``s0`` with ``|beta(U, Ub)| <= s0 alpha(U, Ub)`` on the hull box."""
    rlo, rhi, vmax = _hull_box(states, margin)
    rng = np.random.default_rng(seed)

    def draw(k):
        rho = rng.uniform(rlo, rhi, k)
        r = vmax * np.sqrt(rng.uniform(0, 1, k))
        th = rng.uniform(0, 2 * np.pi, k)
        return np.array([rho, rho * r * np.cos(th), rho * r * np.sin(th)])

    U, Ub = draw(samples), draw(samples)
    a = alpha(law, U, Ub)
    b = np.hypot(*beta(law, U, Ub))
    ok = a > 1e-14
    return float(np.max(b[ok] / a[ok]))


# --------------------------------------------------------------------------
# discrete entropy inequality


@dataclass
class EntropyResidual:
    """Per-slice entropy bookkeeping of the first-order scheme.

    ``production[k]`` is the cellwise ``-(d_t eta + div Q)``; the
    inequality holds when it is nonnegative. ``violation[k]`` integrates
    the negative part and ``total[k]`` the whole production.
    """

    times: np.ndarray
    production: List[np.ndarray]
    violation: np.ndarray
    total: np.ndarray
    min_cell: np.ndarray


def entropy_inequality_residual(slices: Sequence, law: GasLaw, grid) -> EntropyResidual:
    """Discrete entropy inequality residual for each stored slice.

    Each slice must carry the state one step later (``U_next``) and that
    step's ``dt_next``, as produced by :func:`artifact.solver2d.run`.

    Raises
    ------
    ValueError
        If fewer than two slices are supplied or shapes do not match the grid.
    """
    from .solver2d import entropy_production

    if len(slices) < 2:
        raise ValueError("entropy residual needs at least two slices")
    prods, viol, tot, mins = [], [], [], []
    for s in slices:
        if s.U.shape != (3, grid.nx1, grid.nx2) or s.U_next is None:
            raise ValueError("slice does not match the grid or lacks a next step")
        D = entropy_production(law, s.U, s.U_next, s.dt_next, grid)
        prods.append(D)
        viol.append(float(np.sum(np.maximum(-D, 0.0))) * grid.cell_area)
        tot.append(float(np.sum(D)) * grid.cell_area)
        mins.append(float(D.min()))
    return EntropyResidual(np.array([s.t for s in slices]), prods, np.array(viol), np.array(tot), np.array(mins))


# --------------------------------------------------------------------------
# weak-strong comparison


def project_to_coarse(U_fine: np.ndarray, shape) -> np.ndarray:
    """Cell-average a fine conserved array onto a coarser nested grid."""
    _, n1, n2 = U_fine.shape
    m1, m2 = shape
    if n1 % m1 or n2 % m2:
        raise ValueError(f"grids are not nested: {(n1, n2)} vs {(m1, m2)}")
    r1, r2 = n1 // m1, n2 // m2
    return U_fine.reshape(3, m1, r1, m2, r2).mean(axis=(2, 4))


@dataclass
class RelEntropyReport:
    times: np.ndarray
    integral_alpha: np.ndarray
    sup_alpha: np.ndarray
    gronwall_A: float
    gronwall_C: float
    entropy_residual: np.ndarray
    fan_sign_min: float
    constants: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "times": [float(t) for t in self.times],
            "integral_alpha": [float(a) for a in self.integral_alpha],
            "sup_alpha": [float(a) for a in self.sup_alpha],
            "gronwall_A": float(self.gronwall_A),
            "gronwall_C": float(self.gronwall_C),
            "entropy_residual": [float(r) for r in self.entropy_residual],
            "fan_sign_min": float(self.fan_sign_min),
            "constants": {k: float(v) for k, v in sorted(self.constants.items())},
        }


def _gronwall_fit(t, I):
    """Fit ``I(t) <= A exp(C t)``: slope of log I by least squares, then the tightest A."""
    ok = I > 0
    if np.count_nonzero(ok) < 2:
        return float(np.max(I, initial=0.0)), 0.0
    C = float(np.polyfit(t[ok], np.log(I[ok]), 1)[0])
    A = float(np.max(I * np.exp(-C * t)))
    return A, C


def fan_sign_min(artifacts, t_min: float = 0.1, slack_cells: int = 2) -> float:
    """Smallest centered ``d wbar/dx1`` over front-fan cells for slices with ``t >= t_min``.

    Fan cells lie strictly between the extracted ``H`` and ``C0`` fronts of
    each row, shrunk by ``slack_cells`` on both ends.
    """
    from .solver2d import extract_fronts

    cfg, grid = artifacts.config, artifacts.grid
    law = cfg.law
    slices = artifacts.slices
    if len(slices) < 2:
        return math.nan
    fronts = extract_fronts(slices, cfg, grid)
    x = grid.x1
    best = math.inf
    for k, s in enumerate(slices):
        if s.t < t_min - 1e-12:
            continue
        rho = s.U[0]
        wbar, _, _ = invariants_from_cv(law, law.sound_speed(rho), s.U[1] / rho)
        d = np.full_like(wbar, np.nan)
        d[1:-1] = (wbar[2:] - wbar[:-2]) / (2 * grid.dx1)
        for j in range(grid.nx2):
            a = fronts.positions["H"][k, j] + slack_cells * grid.dx1
            b = fronts.positions["C0"][k, j] - slack_cells * grid.dx1
            m = (x > a) & (x < b)
            if np.any(m):
                best = min(best, float(np.nanmin(d[m, j])))
    return best


def weak_strong_compare(run_a, run_b, law: Optional[GasLaw] = None) -> RelEntropyReport:
    """Relative entropy of ``run_a`` measured against ``run_b`` (the classical solution).

    ``run_b`` may live on a finer nested grid; it is then cell-averaged onto
    the grid of ``run_a``.

    Raises
    ------
    ValueError
        If the stored times differ or the grids are not nested.
    """
    law = law or run_a.config.law
    ta = np.array([s.t for s in run_a.slices])
    tb = np.array([s.t for s in run_b.slices])
    if ta.shape != tb.shape or np.any(np.abs(ta - tb) > 1e-12):
        raise ValueError("runs must share output times")
    ga, gb = run_a.grid, run_b.grid
    if abs(ga.half_width - gb.half_width) > 1e-12 * ga.half_width:
        raise ValueError("runs must cover the same strip")
    shape = (ga.nx1, ga.nx2)
    ints, sups, all_states = [], [], []
    for sa, sb in zip(run_a.slices, run_b.slices):
        Ub = sb.U if sb.U.shape[1:] == shape else project_to_coarse(sb.U, shape)
        a = alpha(law, sa.U, Ub)
        ints.append(float(np.sum(a)) * ga.cell_area)
        sups.append(float(np.max(a)))
        all_states.append(sa.U.reshape(3, -1))
        all_states.append(Ub.reshape(3, -1))
    ints = np.array(ints)
    A, C = _gronwall_fit(ta, ints)
    hull = np.concatenate(all_states, axis=1)
    c1, c2 = norm_equivalence_constants(law, hull)
    s0 = flux_bound_constant(law, hull)
    if len(run_a.slices) >= 2 and run_a.config.order == 1:
        resid = entropy_inequality_residual(run_a.slices, law, ga).violation
    else:
        resid = np.full(len(run_a.slices), np.nan)
    return RelEntropyReport(
        times=ta,
        integral_alpha=ints,
        sup_alpha=np.array(sups),
        gronwall_A=A,
        gronwall_C=C,
        entropy_residual=resid,
        fan_sign_min=fan_sign_min(run_b),
        constants={"c1": c1, "c2": c2, "s0": s0},
    )
