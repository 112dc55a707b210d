"""Exact self-similar solution of the plane-symmetric isentropic Riemann problem.

Conventions: the left state occupies ``x < 0`` and the right state ``x > 0``.
Family 1 (the back wave) travels with ``lambda_1 = v - c`` and family 2 (the
front wave) with ``lambda_2 = v + c``. Across a family-1 rarefaction ``wbar``
is constant; across a family-2 rarefaction ``w`` is constant.

Region labels follow the four-sector picture of the wave-curve plane:

* ``II``  two shocks
* ``IV``  two rarefactions
* ``I``   back rarefaction and front shock
* ``III`` back shock and front rarefaction
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .gas_model import (
    DomainError,
    GasLaw,
    ModelError,
    PrimitiveState,
    VacuumError,
    invariants_from_cv,
    sound_speed,
)


class RootFindingError(ModelError):
    """The middle-state solve failed to converge."""


class WaveKind(enum.Enum):
    BACK_SHOCK = "BackShock"
    FRONT_SHOCK = "FrontShock"
    BACK_RAREFACTION = "BackRarefaction"
    FRONT_RAREFACTION = "FrontRarefaction"
    NONE = "None"


class Region(enum.Enum):
    I = "I"
    II = "II"
    III = "III"
    IV = "IV"
    DEGENERATE = "Degenerate"
    VACUUM = "Vacuum"


@dataclass(frozen=True)
class Wave:
    """One elementary wave.

    ``speeds`` is ``(s,)`` for a shock and ``(left_edge, right_edge)`` for a
    rarefaction (or a zero-strength wave, whose two edges coincide).
    """

    kind: WaveKind
    speeds: Tuple[float, ...]

    @property
    def left_edge(self) -> float:
        return self.speeds[0]

    @property
    def right_edge(self) -> float:
        return self.speeds[-1]

    @property
    def is_shock(self) -> bool:
        return self.kind in (WaveKind.BACK_SHOCK, WaveKind.FRONT_SHOCK)


@dataclass(frozen=True)
class WaveFan:
    law: GasLaw
    left: PrimitiveState
    middle: PrimitiveState
    right: PrimitiveState
    wave1: Wave
    wave2: Wave
    region: Region


def lambda1(law: GasLaw, s: PrimitiveState) -> float:
    return s.v1 - sound_speed(law, s.rho)


def lambda2(law: GasLaw, s: PrimitiveState) -> float:
    return s.v1 + sound_speed(law, s.rho)


def _hugoniot(law: GasLaw, rho_base: float, rho) -> np.ndarray:
    p0 = law.pressure(rho_base)
    return np.sqrt((rho - rho_base) * (law.pressure(rho) - p0) / (rho * rho_base))


def shock_curve(law: GasLaw, family: int, U_base: PrimitiveState, rho: float) -> float:
    """Velocity offset ``v - v_base`` along the shock branch of a wave curve.

    For family 1 the base is the left state and the returned value is
    ``-sqrt((rho - rho_l)(p - p_l)/(rho rho_l))``. Family 2 is based at the
    right state and is the mirror image (opposite sign).

    Raises
    ------
    DomainError
        If ``rho < rho_base`` (not on the admissible shock branch).
    """
    if family not in (1, 2):
        raise ValueError("family must be 1 or 2")
    if rho < U_base.rho or rho <= 0:
        raise DomainError(f"shock branch needs rho >= {U_base.rho}, got {rho}")
    val = float(_hugoniot(law, U_base.rho, rho))
    return -val if family == 1 else val


def rarefaction_curve(law: GasLaw, family: int, U_base: PrimitiveState, rho: float) -> float:
    """Integral ``int_{rho_base}^{rho} c(r)/r dr = 2/(gamma-1) (c(rho) - c_base)``.

    The velocity offset along the rarefaction branch is minus this value for
    family 1 and plus this value for family 2.

    Raises
    ------
    DomainError
        If ``rho > rho_base`` or ``rho < 0``.
    """
    if family not in (1, 2):
        raise ValueError("family must be 1 or 2")
    if rho > U_base.rho or rho < 0:
        raise DomainError(f"rarefaction branch needs 0 <= rho <= {U_base.rho}, got {rho}")
    return 2.0 / (law.gamma - 1.0) * (sound_speed(law, rho) - sound_speed(law, U_base.rho))


def wave_curve(law: GasLaw, family: int, U_base: PrimitiveState, rho: float) -> float:
    """Velocity offset along the full (shock + rarefaction) wave curve."""
    if rho >= U_base.rho:
        return shock_curve(law, family, U_base, rho)
    r = rarefaction_curve(law, family, U_base, rho)
    return -r if family == 1 else r


def _wave_curve_derivative(law: GasLaw, family: int, U_base: PrimitiveState, rho: float) -> float:
    if rho >= U_base.rho:
        rb = U_base.rho
        dp = rho - rb
        dP = law.pressure(rho) - law.pressure(rb)
        g = dp * dP / (rho * rb)
        if g <= 0:
            dval = sound_speed(law, rho) / rho
        else:
            dg = (dP + dp * law.dpressure(rho)) / (rho * rb) - g / rho
            dval = 0.5 * dg / np.sqrt(g)
    else:
        dval = sound_speed(law, rho) / rho
    return -dval if family == 1 else dval


def _residual(law, U_l, U_r, rho):
    return U_l.v1 + wave_curve(law, 1, U_l, rho) - U_r.v1 - wave_curve(law, 2, U_r, rho)


def _vacuum_margin(law: GasLaw, U_l: PrimitiveState, U_r: PrimitiveState) -> float:
    wbar_l, _, _ = invariants_from_cv(law, sound_speed(law, U_l.rho), U_l.v1)
    _, w_r, _ = invariants_from_cv(law, sound_speed(law, U_r.rho), U_r.v1)
    return float(wbar_l + w_r)


def _on_curve_tol(law, U_l, U_r) -> float:
    scale = 1.0 + abs(U_l.v1) + abs(U_r.v1) + sound_speed(law, U_l.rho) + sound_speed(law, U_r.rho)
    return 1e-13 * scale


def classify(law: GasLaw, U_l: PrimitiveState, U_r: PrimitiveState) -> Region:
    """Region of the wave-curve plane in which ``U_r`` lies relative to ``U_l``."""
    if U_l.rho <= 0 or U_r.rho <= 0:
        raise VacuumError("classify needs non-vacuum states")
    if _vacuum_margin(law, U_l, U_r) <= 0:
        return Region.VACUUM
    tol = _on_curve_tol(law, U_l, U_r)
    fl = _residual(law, U_l, U_r, U_l.rho)
    fr = _residual(law, U_l, U_r, U_r.rho)
    if abs(fl) <= tol or abs(fr) <= tol:
        return Region.DEGENERATE
    # The residual decreases in rho, so its sign at rho_l (rho_r) tells
    # whether the middle density exceeds rho_l (rho_r).
    shock1 = fl > 0
    shock2 = fr > 0
    if shock1 and shock2:
        return Region.II
    if not shock1 and not shock2:
        return Region.IV
    if not shock1 and shock2:
        return Region.I
    return Region.III


def _solve_middle_density(law, U_l, U_r, tol=1e-15, maxiter=200) -> float:
    lo, hi = 1e-10, 10.0 * max(U_l.rho, U_r.rho)
    f_lo = _residual(law, U_l, U_r, lo)
    f_hi = _residual(law, U_l, U_r, hi)
    while f_hi > 0 and hi < 1e12:
        lo, f_lo = hi, f_hi
        hi *= 10.0
        f_hi = _residual(law, U_l, U_r, hi)
    if f_lo < 0 or f_hi > 0:
        raise RootFindingError(f"no sign change on bracket [{lo}, {hi}]")
    # start from the two-rarefaction closed form, which is exact in region IV
    c_guess = 0.5 * (law.gamma - 1.0) * _vacuum_margin(law, U_l, U_r)
    x = float(law.density_from_sound_speed(max(c_guess, 1e-8)))
    if not (lo < x < hi):
        x = 0.5 * (lo + hi)
    for _ in range(maxiter):
        f = _residual(law, U_l, U_r, x)
        if f == 0.0:
            return x
        if f > 0:
            lo = x
        else:
            hi = x
        df = _wave_curve_derivative(law, 1, U_l, x) - _wave_curve_derivative(law, 2, U_r, x)
        x_new = x - f / df if df != 0 else 0.5 * (lo + hi)
        if not (lo < x_new < hi):
            x_new = 0.5 * (lo + hi)
        if abs(x_new - x) <= tol * max(1.0, x):
            return x_new
        x = x_new
    raise RootFindingError(f"middle density did not converge; bracket [{lo}, {hi}]")


def _make_wave(law, family, U_side, U_m) -> Wave:
    if U_m.rho > U_side.rho:
        if family == 1:
            s = (U_m.rho * U_m.v1 - U_side.rho * U_side.v1) / (U_m.rho - U_side.rho)
            return Wave(WaveKind.BACK_SHOCK, (float(s),))
        s = (U_side.rho * U_side.v1 - U_m.rho * U_m.v1) / (U_side.rho - U_m.rho)
        return Wave(WaveKind.FRONT_SHOCK, (float(s),))
    if U_m.rho < U_side.rho:
        if family == 1:
            return Wave(WaveKind.BACK_RAREFACTION, (lambda1(law, U_side), lambda1(law, U_m)))
        return Wave(WaveKind.FRONT_RAREFACTION, (lambda2(law, U_m), lambda2(law, U_side)))
    lam = lambda1(law, U_m) if family == 1 else lambda2(law, U_m)
    return Wave(WaveKind.NONE, (lam, lam))


def solve(law: GasLaw, U_l: PrimitiveState, U_r: PrimitiveState) -> WaveFan:
    """Exact solution of the Riemann problem with data ``U_l`` (x<0), ``U_r`` (x>0).

    Raises
    ------
    VacuumError
        If the data generate vacuum (``wbar_l + w_r <= 0``).
    RootFindingError
        If the scalar middle-state equation does not converge.
    """
    region = classify(law, U_l, U_r)
    if region is Region.VACUUM:
        raise VacuumError("Riemann data generate a vacuum (wbar_l + w_r <= 0)")
    tol = _on_curve_tol(law, U_l, U_r)
    if region is Region.DEGENERATE and abs(_residual(law, U_l, U_r, U_r.rho)) <= tol:
        # right state on a family-1 curve of the left: single back wave
        rho_m = U_r.rho
        v_m = U_r.v1
    elif region is Region.DEGENERATE:
        rho_m = U_l.rho
        v_m = U_l.v1
    else:
        rho_m = _solve_middle_density(law, U_l, U_r)
        v_m = 0.5 * (U_l.v1 + wave_curve(law, 1, U_l, rho_m) + U_r.v1 + wave_curve(law, 2, U_r, rho_m))
    middle = PrimitiveState(float(rho_m), float(v_m), 0.0)
    w1 = _make_wave(law, 1, U_l, middle)
    w2 = _make_wave(law, 2, U_r, middle)
    return WaveFan(law, U_l, middle, U_r, w1, w2, region)


def _fan_state(law: GasLaw, family: int, base: PrimitiveState, xi, v2):
    g = law.gamma
    c0 = sound_speed(law, base.rho)
    wbar0, w0, _ = invariants_from_cv(law, c0, base.v1)
    if family == 1:
        wbar = wbar0
        w = -2.0 / (g + 1.0) * (xi + 0.5 * (g - 3.0) * wbar0)
    else:
        w = w0
        wbar = 2.0 / (g + 1.0) * (xi - 0.5 * (g - 3.0) * w0)
    c = 0.5 * (g - 1.0) * (wbar + w)
    return PrimitiveState(float(law.density_from_sound_speed(c)), float(wbar - w), v2)


def sample(fan: WaveFan, xi: float) -> PrimitiveState:
    """Self-similar state at ``xi = x/t``.

    ``v2`` is carried passively: left value for ``xi < v_m``, right value
    otherwise. At a shock location the state on its right is returned.
    """
    law, L, M, R = fan.law, fan.left, fan.middle, fan.right
    v2 = L.v2 if xi < M.v1 else R.v2
    w1, w2 = fan.wave1, fan.wave2
    if xi < w1.left_edge:
        return L
    if w1.kind is WaveKind.BACK_RAREFACTION and xi < w1.right_edge:
        return _fan_state(law, 1, L, xi, v2)
    if xi < w2.left_edge:
        return PrimitiveState(M.rho, M.v1, v2)
    if w2.kind is WaveKind.FRONT_RAREFACTION and xi < w2.right_edge:
        return _fan_state(law, 2, R, xi, v2)
    return R


def sample_array(fan: WaveFan, xi) -> np.ndarray:
    """Vectorized :func:`sample` returning an array of shape ``(3, n)`` of ``(rho, v1, v2)``."""
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    out = np.empty((3, xi.size))
    for k, x in enumerate(xi.ravel()):
        s = sample(fan, float(x))
        out[:, k] = (s.rho, s.v1, s.v2)
    return out


def mirror(s: PrimitiveState) -> PrimitiveState:
    """Reflection ``x -> -x``: flips ``v1``."""
    return PrimitiveState(s.rho, -s.v1, s.v2)


def rankine_hugoniot_residual(fan: WaveFan) -> float:
    """Largest componentwise Rankine-Hugoniot residual over the shocks of ``fan``."""
    from .gas_model import physical_flux_array

    worst = 0.0
    for wave, a, b in ((fan.wave1, fan.left, None), (fan.wave2, None, fan.right)):
        if not wave.is_shock:
            continue
        s = wave.speeds[0]
        minus = sample(fan, s - 1e-9 * (1 + abs(s)))
        plus = sample(fan, s)
        Um = np.array([minus.rho, minus.rho * minus.v1, minus.rho * minus.v2])
        Up = np.array([plus.rho, plus.rho * plus.v1, plus.rho * plus.v2])
        F = physical_flux_array(fan.law, Up, 1) - physical_flux_array(fan.law, Um, 1)
        worst = max(worst, float(np.max(np.abs(F - s * (Up - Um)))))
    return worst
