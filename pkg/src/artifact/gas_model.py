"""Polytropic equation of state, Riemann invariants and the mechanical entropy pair.

All functions accept scalars or numpy arrays for the density and velocity
arguments unless the signature says otherwise. States are small immutable
dataclasses; the array-valued helpers are what the solvers use internally.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np

#: Densities below this are treated as vacuum by the conversions.
VACUUM_RHO = 1e-12


class ModelError(ValueError):
    """Base class for physically inadmissible inputs or model failures."""


class DomainError(ModelError):
    """Argument outside the domain of a formula (e.g. negative density)."""


class VacuumError(ModelError):
    """Operation would require a vacuum state."""


@dataclass(frozen=True)
class GasLaw:
    """Isentropic polytropic gas ``p = k0 * rho**gamma``.

    Parameters
    ----------
    gamma : float
        Adiabatic exponent, restricted to ``1 < gamma < 3``.
    k0 : float
        Positive pressure constant.
    """

    gamma: float = 2.0
    k0: float = 0.5

    def __post_init__(self):
        if not (1.0 < self.gamma < 3.0):
            raise DomainError(f"gamma must lie in (1, 3), got {self.gamma}")
        if not self.k0 > 0.0:
            raise DomainError(f"k0 must be positive, got {self.k0}")

    def pressure(self, rho):
        return self.k0 * np.power(rho, self.gamma)

    def dpressure(self, rho):
        """Derivative ``p'(rho) = c(rho)**2``."""
        return self.k0 * self.gamma * np.power(rho, self.gamma - 1.0)

    def sound_speed(self, rho):
        return sound_speed(self, rho)

    def density_from_sound_speed(self, c):
        """Invert ``c = sqrt(k0*gamma) * rho**((gamma-1)/2)``."""
        c = np.asarray(c, dtype=float)
        if np.any(c < 0):
            raise DomainError("sound speed must be nonnegative")
        out = np.power(c * c / (self.k0 * self.gamma), 1.0 / (self.gamma - 1.0))
        return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class PrimitiveState:
    rho: float
    v1: float
    v2: float = 0.0

    def __post_init__(self):
        if self.rho < 0:
            raise DomainError(f"negative density {self.rho}")


@dataclass(frozen=True)
class ConservedState:
    rho: float
    P1: float
    P2: float = 0.0

    def as_array(self) -> np.ndarray:
        return np.array([self.rho, self.P1, self.P2], dtype=float)


@dataclass(frozen=True)
class InvariantState:
    """Riemann invariants ``(wbar, w, psi2)`` with ``psi2 = -v2``."""

    wbar: float
    w: float
    psi2: float = 0.0

    def as_array(self) -> np.ndarray:
        return np.array([self.wbar, self.w, self.psi2], dtype=float)


def _check_rho(rho):
    arr = np.asarray(rho, dtype=float)
    if np.any(arr < 0) or np.any(~np.isfinite(arr)):
        raise DomainError("density must be finite and nonnegative")
    return arr


def sound_speed(law: GasLaw, rho):
    """Sound speed ``c = sqrt(k0*gamma) * rho**((gamma-1)/2)``.

    Raises
    ------
    DomainError
        If any density is negative.
    """
    arr = _check_rho(rho)
    c = np.sqrt(law.k0 * law.gamma) * np.power(arr, 0.5 * (law.gamma - 1.0))
    return float(c) if c.ndim == 0 else c


def enthalpy(law: GasLaw, rho):
    """Enthalpy ``h = c**2 / (gamma - 1)``."""
    c = np.asarray(sound_speed(law, rho))
    h = c * c / (law.gamma - 1.0)
    return float(h) if h.ndim == 0 else h


def invariants_from_cv(law: GasLaw, c, v1, v2=0.0):
    """Array form of :func:`to_invariants` starting from sound speed."""
    s = 2.0 * np.asarray(c, dtype=float) / (law.gamma - 1.0)
    wbar = 0.5 * (s + v1)
    w = 0.5 * (s - v1)
    return wbar, w, -np.asarray(v2, dtype=float)


def cv_from_invariants(law: GasLaw, wbar, w, psi2=0.0):
    """Array form of the inverse map, returning ``(c, v1, v2)``."""
    c = 0.5 * (law.gamma - 1.0) * (np.asarray(wbar) + np.asarray(w))
    return c, np.asarray(wbar) - np.asarray(w), -np.asarray(psi2, dtype=float)


def to_invariants(law: GasLaw, state: PrimitiveState) -> InvariantState:
    """Riemann invariants of a primitive state.

    ``w = (2c/(gamma-1) - v1)/2`` and ``wbar = (2c/(gamma-1) + v1)/2``.
    """
    c = sound_speed(law, state.rho)
    wbar, w, psi2 = invariants_from_cv(law, c, state.v1, state.v2)
    return InvariantState(float(wbar), float(w), float(psi2))


def from_invariants(law: GasLaw, inv: InvariantState) -> PrimitiveState:
    """Inverse of :func:`to_invariants`.

    Raises
    ------
    VacuumError
        If ``wbar + w < 0`` (negative sound speed).
    """
    if inv.wbar + inv.w < 0:
        raise VacuumError(f"wbar + w = {inv.wbar + inv.w} < 0 is a vacuum excursion")
    c, v1, v2 = cv_from_invariants(law, inv.wbar, inv.w, inv.psi2)
    rho = law.density_from_sound_speed(float(c))
    if rho < VACUUM_RHO:
        rho = 0.0
    return PrimitiveState(float(rho), float(v1), float(v2))


def to_conserved(state: PrimitiveState) -> ConservedState:
    return ConservedState(state.rho, state.rho * state.v1, state.rho * state.v2)


def from_conserved(U: ConservedState) -> PrimitiveState:
    if U.rho < VACUUM_RHO:
        raise VacuumError(f"density {U.rho} is below the vacuum threshold")
    return PrimitiveState(U.rho, U.P1 / U.rho, U.P2 / U.rho)


def internal_energy(law: GasLaw, rho):
    """Specific internal energy ``e = k0 * rho**(gamma-1) / (gamma-1)``."""
    arr = _check_rho(rho)
    return law.k0 * np.power(arr, law.gamma - 1.0) / (law.gamma - 1.0)


def entropy_pair(law: GasLaw, state: PrimitiveState) -> Tuple[float, np.ndarray]:
    """Mechanical energy ``eta`` and its flux ``q``.

    Returns
    -------
    eta : float
        ``rho |v|^2 / 2 + rho e``.
    q : ndarray, shape (2,)
        ``(eta + p) v``.
    """
    if state.rho <= 0:
        raise DomainError("entropy pair needs a positive density")
    U = np.array([state.rho, state.rho * state.v1, state.rho * state.v2])
    eta, q1, q2 = entropy_pair_conserved(law, U)
    return float(eta), np.array([float(q1), float(q2)])


def entropy_pair_conserved(law: GasLaw, U):
    """Vectorized ``(eta, q1, q2)`` for conserved arrays ``U = (rho, P1, P2)``."""
    rho, P1, P2 = U[0], U[1], U[2]
    if np.any(np.asarray(rho) <= 0):
        raise DomainError("entropy pair needs a positive density")
    kin = 0.5 * (P1 * P1 + P2 * P2) / rho
    p = law.pressure(rho)
    eta = kin + p / (law.gamma - 1.0)
    flux = (eta + p) / rho
    return eta, flux * P1, flux * P2


def entropy_gradient(law: GasLaw, U) -> np.ndarray:
    """Gradient of ``eta`` in conserved variables.

    ``(c^2/(gamma-1) - |v|^2/2, v1, v2)``.
    """
    rho, P1, P2 = U[0], U[1], U[2]
    v1, v2 = P1 / rho, P2 / rho
    c2 = law.dpressure(rho)
    return np.array([c2 / (law.gamma - 1.0) - 0.5 * (v1 * v1 + v2 * v2), v1, v2])


def entropy_hessian(law: GasLaw, U) -> np.ndarray:
    """Hessian of ``eta`` in conserved variables at a single state."""
    rho, P1, P2 = (float(x) for x in U)
    if rho <= 0:
        raise DomainError("Hessian needs a positive density")
    v1, v2 = P1 / rho, P2 / rho
    c2 = float(law.dpressure(rho))
    H = np.array(
        [
            [v1 * v1 + v2 * v2 + c2, -v1, -v2],
            [-v1, 1.0, 0.0],
            [-v2, 0.0, 1.0],
        ]
    )
    return H / rho


def hessian_eigenvalues(law: GasLaw, U) -> np.ndarray:
    """Closed-form eigenvalues of :func:`entropy_hessian`, sorted ascending.

    They are ``1/rho`` and the roots of
    ``lambda^2 - (|v|^2 + c^2 + 1) lambda + c^2`` divided by ``rho``.
    """
    rho, P1, P2 = (float(x) for x in U)
    v2n = (P1 * P1 + P2 * P2) / (rho * rho)
    c2 = float(law.dpressure(rho))
    s = v2n + c2 + 1.0
    disc = np.sqrt(v2n * v2n + (c2 - 1.0) ** 2 + 2.0 * v2n * (c2 + 1.0))
    lam = np.array([1.0, 0.5 * (s - disc), 0.5 * (s + disc)]) / rho
    return np.sort(lam)


def physical_flux_array(law: GasLaw, U, direction: int):
    """Vectorized flux ``F^direction`` of conserved arrays."""
    rho, P1, P2 = U[0], U[1], U[2]
    p = law.pressure(rho)
    if direction == 1:
        return np.stack([P1, P1 * P1 / rho + p, P1 * P2 / rho])
    if direction == 2:
        return np.stack([P2, P1 * P2 / rho, P2 * P2 / rho + p])
    raise ValueError("direction must be 1 or 2")


def flux_jacobian(law: GasLaw, U, direction: int) -> np.ndarray:
    """Analytic Jacobian ``dF^direction / dU`` (rows index the flux component)."""
    rho, P1, P2 = (float(x) for x in U)
    v1, v2 = P1 / rho, P2 / rho
    c2 = float(law.dpressure(rho))
    if direction == 1:
        return np.array([[0.0, 1.0, 0.0], [c2 - v1 * v1, 2 * v1, 0.0], [-v1 * v2, v2, v1]])
    if direction == 2:
        return np.array([[0.0, 0.0, 1.0], [-v1 * v2, v2, v1], [c2 - v2 * v2, 0.0, 2 * v2]])
    raise ValueError("direction must be 1 or 2")
