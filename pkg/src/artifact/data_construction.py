"""Singular rarefaction data on the initial slice ``Sigma_delta``.

The construction follows the characteristic picture of a front rarefaction
wave emanating from ``{t = 0, x1 = 0}``:

1. Rays of ``L = d/dt + v - c That`` are traced through the smooth right
   solution from ``(0, 0, theta)`` to ``t = delta``. They sweep out the
   front ``C_0`` and give the curve ``S_{delta,0}``.
2. The eikonal ``u`` on ``Sigma_delta`` is the translate of that curve,
   ``u = (x1_C0(x2) - x1) / delta``, and ``theta`` is carried along
   ``T = kappa That``. This gives ``That``, ``kappa`` and ``gslash`` in
   closed form (:func:`build_chart`).
3. The diagonal variables ``U = P^-1 (wbar, w, psi2)`` are Taylor
   expanded in ``u``. ``U^(0)`` has slope ``-2/(gamma+1)``; the higher
   coefficients of ``U^(-1)`` and ``U^(-2)`` are fixed by matching
   ``L^n U`` with the right solution on ``S_{delta,0}``
   (:func:`taylor_coefficients`).

The ``L^n`` jets are computed by a Cauchy-Kovalevskaya recursion on
truncated bivariate Taylor series in ``(t - delta, u)`` whose coefficients
are arrays on a uniform periodic ``theta`` grid (spectral ``d/dtheta``).
The evolution equations are the Euler equations in the null frame together
with the structure equations for ``kappa``, ``That``, ``gslash`` and
``Xi`` (``T = d/du - Xi d/dtheta``).
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy.integrate import solve_ivp

from .acoustic_geometry import BackgroundSample, CartesianBackground, FrontGraph, IntegrationError
from .gas_model import DomainError, GasLaw, InvariantState, ModelError, PrimitiveState
from .solver2d import Perturbation


class SingularDivisionError(ModelError):
    """``kappa`` fell below the admissible threshold."""


FIELDS = ("wbar", "w", "psi2", "kappa", "That1", "That2", "gslash", "Xi")
LAMBDAS = (0, -1, -2)


# --------------------------------------------------------------------------
# spectral helpers on the periodic theta grid


def _wavenumbers(n: int) -> np.ndarray:
    k = np.fft.rfftfreq(n, d=1.0 / n)
    return k


def _dtheta(f, order: int = 1):
    """Spectral ``d^order/dtheta^order`` along the last axis (period ``2 pi``)."""
    f = np.asarray(f, dtype=float)
    n = f.shape[-1]
    k = _wavenumbers(n)
    fh = np.fft.rfft(f, axis=-1) * (1j * k) ** order
    if n % 2 == 0:
        fh[..., -1] = 0.0
    return np.fft.irfft(fh, n=n, axis=-1)


def _fourier_eval(f, points):
    """Trigonometric interpolant of the samples ``f`` at arbitrary angles."""
    f = np.asarray(f, dtype=float)
    n = f.shape[-1]
    fh = np.fft.rfft(f, axis=-1) / n
    k = _wavenumbers(n)
    wts = np.full(k.size, 2.0)
    wts[0] = 1.0
    if n % 2 == 0:
        wts[-1] = 1.0
    pts = np.asarray(points, dtype=float)
    E = np.exp(1j * np.multiply.outer(pts, k))
    return np.real(E @ (fh * wts))


# --------------------------------------------------------------------------
# truncated bivariate Taylor series in (s, u) = (t - delta, u)


class _Series:
    """Coefficients ``a[i, j, :]`` of ``s**i u**j`` truncated at total degree ``D``."""

    __slots__ = ("a",)

    def __init__(self, a):
        self.a = a

    @property
    def D(self) -> int:
        return self.a.shape[0] - 1

    @staticmethod
    def zeros(D: int, n: int) -> "_Series":
        return _Series(np.zeros((D + 1, D + 1, n)))

    @staticmethod
    def from_u(coeffs, D: int) -> "_Series":
        """Series in ``u`` alone from ``coeffs[j]`` (arrays over theta)."""
        coeffs = list(coeffs)
        n = np.asarray(coeffs[0]).shape[-1] if np.ndim(coeffs[0]) else 1
        out = _Series.zeros(D, n)
        for j, cj in enumerate(coeffs[: D + 1]):
            out.a[0, j] = cj
        return out

    def _mask(self):
        D = self.D
        i, j = np.indices((D + 1, D + 1))
        self.a[i + j > D] = 0.0
        return self

    def _lift(self, other):
        if isinstance(other, _Series):
            return other.a
        out = np.zeros_like(self.a)
        out[0, 0] = other
        return out

    def copy(self):
        return _Series(self.a.copy())

    def __add__(self, other):
        return _Series(self.a + self._lift(other))

    __radd__ = __add__

    def __sub__(self, other):
        return _Series(self.a - self._lift(other))

    def __rsub__(self, other):
        return _Series(self._lift(other) - self.a)

    def __neg__(self):
        return _Series(-self.a)

    def __mul__(self, other):
        if not isinstance(other, _Series):
            return _Series(self.a * other)
        D = self.D
        a, b = self.a, other.a
        out = np.zeros(np.broadcast_shapes(a.shape, b.shape))
        for i in range(D + 1):
            for j in range(D + 1 - i):
                aij = a[i, j]
                if not np.any(aij):
                    continue
                out[i:, j:] += aij * b[: D + 1 - i, : D + 1 - j]
        return _Series(out)._mask()

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, _Series):
            return self * _power(other, -1.0)
        return _Series(self.a / other)

    def at(self, i: int = 0, j: int = 0):
        return self.a[i, j]


def _power(x, e: float):
    """``x**e`` for arrays or series (binomial series around the constant term)."""
    if not isinstance(x, _Series):
        return np.power(x, e)
    a0 = x.a[0, 0]
    if np.any(a0 <= 0) and e != int(e):
        raise SingularDivisionError("non-positive constant term in a fractional power")
    if np.any(a0 == 0):
        raise SingularDivisionError("zero constant term in a series power")
    g = x * (1.0 / a0)
    g.a[0, 0] = 0.0
    out = _Series.zeros(x.D, x.a.shape[-1])
    out.a[0, 0] = 1.0
    term = out.copy()
    coef = 1.0
    for m in range(1, x.D + 1):
        coef *= (e - m + 1) / m
        term = term * g
        out = out + term * coef
    return out * (a0**e)


def _du_series(x: _Series) -> _Series:
    D = x.D
    out = np.zeros_like(x.a)
    out[:, :-1] = x.a[:, 1:] * np.arange(1, D + 1)[None, :, None]
    return _Series(out)


def _int_u_series(x: _Series) -> _Series:
    D = x.D
    out = np.zeros_like(x.a)
    out[:, 1:] = x.a[:, :-1] / np.arange(1, D + 1)[None, :, None]
    return _Series(out)._mask()


def _dth_series(x: _Series) -> _Series:
    return _Series(_dtheta(x.a))


def _compose(derivs, ds: _Series) -> _Series:
    """``f(theta + ds)`` from ``derivs[m] = f^(m)(theta)``; ``ds`` has no constant term."""
    out = _Series.zeros(ds.D, ds.a.shape[-1])
    power = _Series.zeros(ds.D, ds.a.shape[-1])
    power.a[0, 0] = 1.0
    fact = 1.0
    for m, fm in enumerate(derivs[: ds.D + 1]):
        if m > 0:
            power = power * ds
            fact *= m
        out = out + power * (np.asarray(fm) / fact)
    return out


# --------------------------------------------------------------------------
# the evolution system in acoustical coordinates


@dataclass
class _Ops:
    du: object
    dth: object


_SERIES_OPS = _Ops(_du_series, _dth_series)


def _structure_rhs(F: Dict[str, object], gamma: float, ops: _Ops) -> Dict[str, object]:
    """``d/dt`` of every field in :data:`FIELDS` at fixed ``(u, theta)``.

    Works on plain arrays and on :class:`_Series` alike. Also returns
    ``chi`` (so that ``L gslash = 2 gslash chi``) and ``c``.
    """
    du, dth = ops.du, ops.dth
    wb, w, p2 = F["wbar"], F["w"], F["psi2"]
    kap, T1, T2, g, Xi = F["kappa"], F["That1"], F["That2"], F["gslash"], F["Xi"]
    h = 0.5 * (gamma - 1.0)
    c = (wb + w) * h
    ik = _power(kap, -1.0)
    rg = _power(g, -0.5)

    def Th(f):
        return ik * (du(f) - Xi * dth(f))

    def Xh(f):
        return rg * dth(f)

    X1, X2 = T2, -T1
    Twb, Tw, Tp2 = Th(wb), Th(w), Th(p2)
    Xwb, Xw, Xp2 = Xh(wb), Xh(w), Xh(p2)
    dwb = c * (-((T1 + 1.0) * Twb) + 0.5 * (T2 * Tp2) - X1 * Xwb + 0.5 * (X2 * Xp2))
    dw = c * ((T1 - 1.0) * Tw + 0.5 * (T2 * Tp2) + X1 * Xw + 0.5 * (X2 * Xp2))
    dp2 = c * (T2 * (Twb + Tw) - Tp2 + X2 * (Xwb + Xw))
    dp1 = dw - dwb
    Tc = (Twb + Tw) * h
    Xc = (Xwb + Xw) * h
    Xp1 = Xw - Xwb
    dkap = kap * (Tc * (-(gamma + 1.0) / (gamma - 1.0)) + _power(c, -1.0) * (T1 * dp1 + T2 * dp2))
    Z = T1 * Xp1 + T2 * Xp2 + Xc
    chi = -(X1 * Xp1 + X2 * Xp2) - c * (X2 * Xh(X1)) + c * (X1 * Xh(X2))
    zeta = -(kap * Z)
    eta = -(kap * (T1 * Xp1 + T2 * Xp2)) + c * Xh(kap)
    return {
        "wbar": dwb,
        "w": dw,
        "psi2": dp2,
        "kappa": dkap,
        "That1": Z * X1,
        "That2": Z * X2,
        "gslash": 2.0 * (g * chi),
        "Xi": rg * (zeta + eta),
        "chi": chi,
        "c": c,
    }


def _ck_evolve(F0: Dict[str, _Series], gamma: float, order: int) -> Dict[str, _Series]:
    """Fill the ``s**m`` rows, ``m <= order``, by the Cauchy-Kovalevskaya recursion."""
    F = {k: v.copy() for k, v in F0.items()}
    for m in range(order):
        R = _structure_rhs(F, gamma, _SERIES_OPS)
        for k in FIELDS:
            F[k].a[m + 1] = R[k].a[m] / (m + 1)
            F[k]._mask()
    return F


def diagonal_series(F) -> Tuple[object, object, object]:
    """``U = P^-1 V`` for arrays or series."""
    wb, w, p2, T1, T2 = F["wbar"], F["w"], F["psi2"], F["That1"], F["That2"]
    U0 = (1.0 - T1) * wb * 0.5 + (1.0 + T1) * w * 0.5 + T2 * p2 * 0.5
    Um1 = T2 * wb - T2 * w + T1 * p2
    Um2 = (1.0 + T1) * wb * 0.5 + (1.0 - T1) * w * 0.5 - T2 * p2 * 0.5
    return U0, Um1, Um2


def _l_jets(F: Dict[str, _Series], gamma: float, order: int) -> np.ndarray:
    """``L^n U^(lambda)`` at ``u = 0`` for ``n <= order``; shape ``(3, order+1, ntheta)``."""
    G = _ck_evolve(F, gamma, order)
    U = diagonal_series(G)
    out = np.empty((3, order + 1, F["wbar"].a.shape[-1]))
    for lam in range(3):
        for n in range(order + 1):
            out[lam, n] = math.factorial(n) * U[lam].a[n, 0]
    return out


# --------------------------------------------------------------------------
# diagonalization


@dataclass(frozen=True)
class DiagonalState:
    """Components ``(U^(0), U^(-1), U^(-2))`` of ``P^-1 (wbar, w, psi2)``."""

    U0: float
    Um1: float
    Um2: float

    def as_array(self) -> np.ndarray:
        return np.array([self.U0, self.Um1, self.Um2], dtype=float)


def _check_unit(That, tol: float = 1e-10):
    T = np.asarray(That, dtype=float)
    if T.shape != (2,) or abs(math.hypot(T[0], T[1]) - 1.0) > tol:
        raise DomainError(f"That must be a unit 2-vector, got {T}")
    return T


def p_matrix(That) -> np.ndarray:
    """Columns are eigenvectors of :func:`a_matrix` for eigenvalues ``0, -1, -2``."""
    T1, T2 = np.asarray(That, dtype=float)
    return np.array(
        [
            [0.5 * (1 - T1), 0.5 * T2, 0.5 * (1 + T1)],
            [0.5 * (1 + T1), -0.5 * T2, 0.5 * (1 - T1)],
            [T2, T1, -T2],
        ]
    )


def p_inverse(That) -> np.ndarray:
    T1, T2 = np.asarray(That, dtype=float)
    return np.array(
        [
            [0.5 * (1 - T1), 0.5 * (1 + T1), 0.5 * T2],
            [T2, -T2, T1],
            [0.5 * (1 + T1), 0.5 * (1 - T1), -0.5 * T2],
        ]
    )


def a_matrix(That) -> np.ndarray:
    """Coefficient of ``c That(V)`` in ``L V = c A That(V) + c B Xhat(V)``."""
    T1, T2 = np.asarray(That, dtype=float)
    return np.array([[-(T1 + 1), 0.0, 0.5 * T2], [0.0, T1 - 1, 0.5 * T2], [T2, T2, -1.0]])


def b_matrix(That) -> np.ndarray:
    T1, T2 = np.asarray(That, dtype=float)
    X1, X2 = T2, -T1
    return np.array([[-X1, 0.0, 0.5 * X2], [0.0, X1, 0.5 * X2], [X2, X2, 0.0]])


def diagonalize(inv: InvariantState, That) -> DiagonalState:
    """``U = P^-1 V`` with ``V = (wbar, w, psi2)``.

    Raises
    ------
    DomainError
        If ``That`` is not a unit vector.
    """
    T = _check_unit(That)
    return DiagonalState(*(p_inverse(T) @ inv.as_array()))


def undiagonalize(d: DiagonalState, That) -> InvariantState:
    T = _check_unit(That)
    return InvariantState(*(p_matrix(T) @ d.as_array()))


# --------------------------------------------------------------------------
# the smooth right solution


class RightSolution(CartesianBackground):
    """Smooth solution near ``t = 0`` in a periodic box, as a time Taylor series.

    The initial data are ``base`` plus the irrotational perturbation of
    :class:`~artifact.solver2d.Perturbation`. Spatial derivatives are
    spectral on an ``n1 x n2`` grid over ``[-half_length, half_length) x
    [0, 2 pi)`` and the time coefficients come from the quadratic form of
    the Euler equations in ``(c, v1, v2)``. Evaluation uses exact Fourier
    sums, so values and all spatial derivatives are available at any point.
    Only short times (``|t| <~ 0.1``) are meaningful.
    """

    def __init__(
        self,
        law: GasLaw,
        base: PrimitiveState,
        perturbation: Optional[Perturbation] = None,
        n1: int = 128,
        n2: int = 48,
        half_length: float = 1.5,
        order: int = 16,
    ):
        self.law = law
        self.base = base
        self.perturbation = perturbation
        self.half_length = float(half_length)
        self.order = int(order)
        g = law.gamma
        c0 = float(law.sound_speed(base.rho))
        self.base_values = np.array([c0, base.v1, base.v2], dtype=float)
        L = self.half_length
        x1 = -L + 2.0 * L * np.arange(n1) / n1
        x2 = 2.0 * np.pi * np.arange(n2) / n2
        X1, X2 = np.meshgrid(x1, x2, indexing="ij")
        self.k1 = np.fft.fftfreq(n1, d=1.0 / n1) * (np.pi / L)
        self.k2 = np.fft.fftfreq(n2, d=1.0 / n2)
        nyq = np.ones((n1, n2), dtype=bool)
        if n1 % 2 == 0:
            nyq[n1 // 2, :] = False
        if n2 % 2 == 0:
            nyq[:, n2 // 2] = False
        self._keep = nyq
        pert = np.zeros((3, n1, n2))
        if perturbation is not None and perturbation.epsilon > 0:
            d1, d2 = perturbation.gradient(X1, X2)
            pert[0] = perturbation.sound_speed_offset(X1, X2)
            pert[1] = -d1
            pert[2] = -d2
        # time Taylor coefficients of the fields on the grid
        fields = [pert + self.base_values[:, None, None]]
        grads = []
        K1 = 1j * self.k1[:, None]
        K2 = 1j * self.k2[None, :]

        def grad(F, m):
            Fh = np.fft.fft2(F - (self.base_values[:, None, None] if m == 0 else 0.0)) * self._keep
            return np.real(np.fft.ifft2(Fh * K1)), np.real(np.fft.ifft2(Fh * K2))

        for m in range(self.order):
            grads.append(grad(fields[m], m))
            new = np.zeros((3, n1, n2))
            for a in range(m + 1):
                b = m - a
                ca, v1a, v2a = fields[a]
                (dc1, dv11, dv21), (dc2, dv12, dv22) = grads[b]
                cb = fields[b][0]
                new[0] += v1a * dc1 + v2a * dc2 + 0.5 * (g - 1.0) * ca * (dv11 + dv22)
                new[1] += v1a * dv11 + v2a * dv12 + 2.0 / (g - 1.0) * ca * dc1
                new[2] += v1a * dv21 + v2a * dv22 + 2.0 / (g - 1.0) * ca * dc2
            fields.append(-new / (m + 1))
        n = n1 * n2
        hats = []
        for m, F in enumerate(fields):
            G = F - self.base_values[:, None, None] if m == 0 else F
            hats.append(np.fft.fft2(G) * self._keep / n)
        self._hats = np.array(hats)
        self._is_constant = not np.any(self._hats)

    def _coeffs(self, t: float) -> np.ndarray:
        out = np.zeros_like(self._hats[0])
        for h in self._hats[::-1]:
            out = out * t + h
        return out

    def spatial_jet(self, t: float, x1, x2, order: int) -> Dict[Tuple[int, int], np.ndarray]:
        """``d1^a d2^b (c, v1, v2)`` for ``a + b <= order``; each entry has shape ``(3, P)``."""
        x1 = np.atleast_1d(np.asarray(x1, dtype=float))
        x2 = np.atleast_1d(np.asarray(x2, dtype=float))
        out = {}
        if self._is_constant:
            for a in range(order + 1):
                for b in range(order + 1 - a):
                    out[(a, b)] = np.zeros((3, x1.size))
            out[(0, 0)] = np.repeat(self.base_values[:, None], x1.size, axis=1)
            return out
        C = self._coeffs(t)
        E1 = np.exp(1j * np.multiply.outer(self.k1, x1 + self.half_length))
        E2 = np.exp(1j * np.multiply.outer(self.k2, x2))
        for a in range(order + 1):
            for b in range(order + 1 - a):
                Ca = C * ((1j * self.k1[:, None]) ** a * (1j * self.k2[None, :]) ** b)
                tmp = np.einsum("fkl,lp->fkp", Ca, E2)
                out[(a, b)] = np.real(np.einsum("fkp,kp->fp", tmp, E1))
        out[(0, 0)] = out[(0, 0)] + self.base_values[:, None]
        return out

    def fields(self, t: float, x1, x2) -> Tuple[np.ndarray, np.ndarray]:
        """Values ``(3, P)`` and gradients ``(3, 2, P)`` of ``(c, v1, v2)``."""
        j = self.spatial_jet(t, x1, x2, 1)
        return j[(0, 0)], np.stack([j[(1, 0)], j[(0, 1)]], axis=1)

    def sample(self, t, x1, x2) -> BackgroundSample:
        val, grad = self.fields(t, x1, x2)
        return BackgroundSample(val[:, 0], grad[:, :, 0])


def trace_front_curve(right: RightSolution, theta, delta: float, rtol: float = 1e-13, atol: float = 1e-14):
    """Trace the rays of ``C_0`` from ``(0, 0, theta)`` to ``t = delta``.

    Returns ``(x1, x2, That)`` at ``t = delta`` (``That`` has shape ``(2, n)``).
    """
    theta = np.asarray(theta, dtype=float)
    n = theta.size
    g = right.law.gamma

    def rhs(t, y):
        x1, x2, T1, T2 = y.reshape(4, n)
        val, grad = right.fields(t, x1, x2)
        c, v1, v2 = val
        X1, X2 = T2, -T1
        dc = grad[0]
        Xc = X1 * dc[0] + X2 * dc[1]
        # Xhat(psi_j) = -Xhat . grad v^j
        Xp1 = -(X1 * grad[1, 0] + X2 * grad[1, 1])
        Xp2 = -(X1 * grad[2, 0] + X2 * grad[2, 1])
        Z = T1 * Xp1 + T2 * Xp2 + Xc
        return np.concatenate([v1 - c * T1, v2 - c * T2, Z * X1, Z * X2])

    y0 = np.concatenate([np.zeros(n), theta, -np.ones(n), np.zeros(n)])
    if right._is_constant:
        c, v1, v2 = right.base_values
        return np.full(n, (v1 + c) * delta), theta + v2 * delta, np.stack([-np.ones(n), np.zeros(n)])
    sol = solve_ivp(rhs, (0.0, delta), y0, method="DOP853", rtol=rtol, atol=atol)
    if sol.status != 0:
        raise IntegrationError(sol.message)
    x1, x2, T1, T2 = sol.y[:, -1].reshape(4, n)
    return x1, x2, np.stack([T1, T2])


# --------------------------------------------------------------------------
# the chart on Sigma_delta


def _cheb_nodes(n: int, length: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Chebyshev-Lobatto nodes on ``[0, length]``, differentiation matrix and quadrature weights."""
    m = n - 1
    x = np.cos(np.pi * np.arange(n) / m)
    cw = np.ones(n)
    cw[0] = cw[-1] = 2.0
    cw = cw * (-1.0) ** np.arange(n)
    dX = x[:, None] - x[None, :]
    Dx = np.outer(cw, 1.0 / cw) / (dX + np.eye(n))
    Dx = Dx - np.diag(Dx.sum(axis=1))
    u = 0.5 * length * (1.0 - x)
    Du = -2.0 / length * Dx
    # Clenshaw-Curtis weights from Chebyshev moments
    V = np.cos(np.outer(np.arange(n), np.arccos(np.clip(x, -1, 1))))
    k = np.arange(n)
    mom = np.where(k % 2 == 0, 2.0 / (1.0 - k.astype(float) ** 2 + (k % 2)), 0.0)
    wts = np.linalg.solve(V, mom) * 0.5 * length
    return u, Du, wts


@dataclass
class SliceChart:
    """Acoustical chart ``(u, theta)`` on ``Sigma_delta``.

    Attributes
    ----------
    theta : (n,) uniform periodic grid.
    u : (m,) Chebyshev-Lobatto nodes on ``[0, u_star]``.
    x1, x2, kappa, That1, That2, gslash : (m, n) tabulations.
    c0_x1, c0_x2 : the curve ``S_{delta,0}`` at the grid angles.
    c0_That : ``That`` transported along the rays of ``C_0`` (for checks).
    series : Taylor coefficients in ``u`` at ``u = 0`` of the geometry and of
        the displacement ``x(u, theta) - x(0, theta)``.
    """

    law: GasLaw
    delta: float
    u_star: float
    theta: np.ndarray
    u: np.ndarray
    x1: np.ndarray
    x2: np.ndarray
    kappa: np.ndarray
    That1: np.ndarray
    That2: np.ndarray
    gslash: np.ndarray
    c0_x1: np.ndarray
    c0_x2: np.ndarray
    c0_That: np.ndarray
    series: Dict[str, np.ndarray] = field(repr=False)
    Du: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    order: int = 4

    @property
    def Xi(self) -> np.ndarray:
        return np.zeros_like(self.kappa)

    @property
    def A(self) -> np.ndarray:
        """``A(delta, x2) = -d x1_C0 / d x2`` at the grid angles."""
        return -_dtheta(self.c0_x1) / (1.0 + _dtheta(self.c0_x2 - self.theta))

    def c0_position(self, theta):
        """Point of ``S_{delta,0}`` with angle ``theta`` (trigonometric interpolation)."""
        theta = np.asarray(theta, dtype=float)
        return _fourier_eval(self.c0_x1, theta), theta + _fourier_eval(self.c0_x2 - self.theta, theta)

    def theta_of_x2(self, x2):
        """Invert ``x2 -> theta`` on ``S_{delta,0}`` by Newton iteration."""
        x2 = np.asarray(x2, dtype=float)
        p = self.c0_x2 - self.theta
        dp = _dtheta(p)
        th = x2 - _fourier_eval(p, x2)
        for _ in range(50):
            r = th + _fourier_eval(p, th) - x2
            th = th - r / (1.0 + _fourier_eval(dp, th))
            if np.max(np.abs(r)) < 1e-15:
                break
        return th

    def u_of(self, x1, x2):
        """Eikonal ``u = (x1_C0(x2) - x1) / delta``."""
        th = self.theta_of_x2(x2)
        return (_fourier_eval(self.c0_x1, th) - np.asarray(x1, dtype=float)) / self.delta


def default_u_star(law: GasLaw, c_right: float, c0: float = 0.5) -> float:
    """``u* = c0 (gamma+1)/(gamma-1) c_r``."""
    if not 0.0 < c0 < 1.0:
        raise DomainError("c0 must lie in (0, 1)")
    return c0 * (law.gamma + 1.0) / (law.gamma - 1.0) * c_right


def build_chart(
    law: GasLaw,
    right_data: RightSolution,
    delta: float,
    u_star: Optional[float] = None,
    n_theta: int = 64,
    n_u: int = 9,
    order: int = 4,
    smooth_tol: float = 1e-8,
) -> SliceChart:
    """Build ``u``, ``theta``, ``That``, ``kappa`` and ``gslash`` on ``Sigma_delta``.

    Parameters
    ----------
    right_data : RightSolution
        Smooth solution on the right of the initial discontinuity.
    delta : float
        Time of the initial slice.
    u_star : float, optional
        Width of the slice; defaults to :func:`default_u_star`.
    order : int
        Taylor order of the geometric series kept at ``u = 0``.

    Raises
    ------
    DomainError
        For ``delta <= 0`` or traces that are not resolved by the ``theta``
        grid (trailing Fourier content above ``smooth_tol``).
    """
    if not delta > 0:
        raise DomainError("delta must be positive")
    if u_star is None:
        u_star = default_u_star(law, float(right_data.base_values[0]))
    theta = 2.0 * np.pi * np.arange(n_theta) / n_theta
    cx1, cx2, cT = trace_front_curve(right_data, theta, delta)
    p1, p2 = cx1, cx2 - theta
    for f in (p1, p2):
        spec = np.abs(np.fft.rfft(f)) / n_theta
        scale = max(1.0, float(np.max(np.abs(f))))
        if spec[-max(2, n_theta // 8):].max() > smooth_tol * scale:
            raise DomainError("front curve is not resolved on the theta grid (non-smooth traces)")
    D = order
    d1 = [p1] + [_dtheta(p1, m) for m in range(1, D + 3)]
    d2 = [cx2] + [_dtheta(p2, m) for m in range(1, D + 3)]
    d2[1] = d2[1] + 1.0
    den = d1[1] ** 2 + d2[1] ** 2
    h = d1[1] / den
    hd = [h] + [_dtheta(h, m) for m in range(1, D + 1)]
    # s(u; theta) along T = d/du: ds/du = delta h(s)
    ds = _Series.zeros(D, n_theta)
    for _ in range(D + 1):
        ds = _int_u_series(_compose(hd, ds) * delta)
    P = _compose(d1[1:], ds)
    Q = _compose(d2[1:], ds)
    nrm2 = P * P + Q * Q
    inv_n = _power(nrm2, -0.5)
    dsth = _dth_series(ds) + 1.0
    X1s = _compose(d1, ds)
    X1s.a[0, 0] = 0.0
    X1s.a[0, 1] -= delta
    X2s = _compose(d2, ds)
    X2s.a[0, 0] = 0.0
    series = {
        "That1": (-(Q * inv_n)).a[0],
        "That2": (P * inv_n).a[0],
        "kappa": (Q * inv_n * delta).a[0],
        "gslash": (nrm2 * dsth * dsth).a[0],
        "Xi": np.zeros((D + 1, n_theta)),
        "dx1": X1s.a[0],
        "dx2": X2s.a[0],
    }
    # tabulation on Chebyshev nodes
    u, Du, wts = _cheb_nodes(n_u, u_star)

    def ode(_, s):
        return delta * _fourier_eval(h, s)

    sol = solve_ivp(ode, (0.0, u_star), theta.copy(), method="DOP853", rtol=1e-13, atol=1e-14, t_eval=u)
    if sol.status != 0:
        raise IntegrationError(sol.message)
    S = sol.y.T  # (n_u, n_theta)
    dS = 1.0 + _dtheta(S - theta[None, :])
    Pv = _fourier_eval(d1[1], S)
    Qv = 1.0 + _fourier_eval(_dtheta(p2), S)
    nv = np.hypot(Pv, Qv)
    x1 = _fourier_eval(p1, S) - delta * u[:, None]
    x2 = S + _fourier_eval(p2, S)
    return SliceChart(
        law=law,
        delta=float(delta),
        u_star=float(u_star),
        theta=theta,
        u=u,
        x1=x1,
        x2=x2,
        kappa=delta * Qv / nv,
        That1=-Qv / nv,
        That2=Pv / nv,
        gslash=nv**2 * dS**2,
        c0_x1=cx1,
        c0_x2=cx2,
        c0_That=cT,
        series=series,
        Du=Du,
        weights=wts,
        order=D,
    )


# --------------------------------------------------------------------------
# Taylor data


@dataclass
class TaylorData:
    """Taylor coefficients in ``u`` on ``Sigma_delta``.

    ``U[lam_index, k]`` is ``T^k U^(lambda)`` at ``u = 0`` for
    ``lambda = 0, -1, -2``; ``V[i, k]`` is ``T^k`` of ``(wbar, w, psi2)[i]``.
    Series are ``sum_k coeff_k u**k / k!``.
    """

    law: GasLaw
    delta: float
    order: int
    theta: np.ndarray
    U: np.ndarray
    V: np.ndarray
    right_jets: np.ndarray
    matching_residual: np.ndarray

    @property
    def wbar(self) -> np.ndarray:
        return self.V[0]

    @property
    def w(self) -> np.ndarray:
        return self.V[1]

    @property
    def psi2(self) -> np.ndarray:
        return self.V[2]


def _geometry_series(chart: SliceChart, D: int) -> Dict[str, _Series]:
    out = {}
    for k in ("kappa", "That1", "That2", "gslash", "Xi"):
        out[k] = _Series.from_u(chart.series[k][: D + 1], D)
    return out


def _taylor_to_series(coeffs, D: int) -> _Series:
    """``coeffs[k]`` are derivatives; convert to power-series coefficients."""
    return _Series.from_u([np.asarray(ck) / math.factorial(k) for k, ck in enumerate(coeffs[: D + 1])], D)


def right_jets(chart: SliceChart, right: RightSolution, order: Optional[int] = None) -> Tuple[np.ndarray, np.ndarray]:
    """``L^n U^(lambda)_r`` on ``S_{delta,0}`` for ``n <= order`` and the traces ``V_r``.

    The right solution is expanded in ``u`` along the chart and evolved by
    the same recursion as the constructed data. Returns ``(jets, V0)``
    with ``jets`` of shape ``(3, order+1, ntheta)`` and ``V0`` the traces of
    ``(wbar, w, psi2)`` (shape ``(3, ntheta)``).
    """
    D = chart.order if order is None else order
    law = chart.law
    n = chart.theta.size
    jet = right.spatial_jet(chart.delta, chart.c0_x1, chart.c0_x2, D)
    dx1 = _Series.from_u(chart.series["dx1"][: D + 1], D)
    dx2 = _Series.from_u(chart.series["dx2"][: D + 1], D)
    fields = [_Series.zeros(D, n) for _ in range(3)]
    p1 = [_Series.zeros(D, n) for _ in range(D + 1)]
    p2 = [_Series.zeros(D, n) for _ in range(D + 1)]
    p1[0].a[0, 0] = 1.0
    p2[0].a[0, 0] = 1.0
    for m in range(1, D + 1):
        p1[m] = p1[m - 1] * dx1
        p2[m] = p2[m - 1] * dx2
    for (a, b), arr in jet.items():
        w = p1[a] * p2[b] * (1.0 / (math.factorial(a) * math.factorial(b)))
        for f in range(3):
            fields[f] = fields[f] + w * arr[f]
    c, v1, v2 = fields
    g = law.gamma
    F = _geometry_series(chart, D)
    F["wbar"] = c * (1.0 / (g - 1.0)) + v1 * 0.5
    F["w"] = c * (1.0 / (g - 1.0)) - v1 * 0.5
    F["psi2"] = -v2
    V0 = np.stack([F[k].a[0, 0] for k in ("wbar", "w", "psi2")])
    return _l_jets(F, g, D), V0


def _data_state(chart: SliceChart, U: np.ndarray, D: int) -> Dict[str, _Series]:
    """Series state on ``Sigma_delta`` for the diagonal coefficients ``U``."""
    F = _geometry_series(chart, D)
    T1, T2 = F["That1"], F["That2"]
    Us = [_taylor_to_series(U[i], D) for i in range(3)]
    U0, Um1, Um2 = Us
    F["wbar"] = (1.0 - T1) * U0 * 0.5 + T2 * Um1 * 0.5 + (1.0 + T1) * Um2 * 0.5
    F["w"] = (1.0 - T1) * Um2 * 0.5 + (1.0 + T1) * U0 * 0.5 - T2 * Um1 * 0.5
    F["psi2"] = T1 * Um1 + T2 * U0 - T2 * Um2
    return F


def taylor_coefficients(
    law: GasLaw,
    chart: SliceChart,
    right_jets: Tuple[np.ndarray, np.ndarray],
    N: int = 4,
    kappa_min: float = 1e-12,
) -> TaylorData:
    """Construct the Taylor coefficients of ``U`` by matching ``L^n U`` on ``S_{delta,0}``.

    ``U^(0)`` has first coefficient ``-2/(gamma+1)`` and no higher ones. For
    ``lambda = -1, -2`` the ``n``-th coefficient enters ``L^n U^(lambda)``
    affinely with slope ``(lambda c / kappa)^n``; it is obtained by solving
    that affine system pointwise in ``theta``.

    Parameters
    ----------
    right_jets : tuple
        ``(jets, V0)`` as returned by :func:`right_jets`.

    Raises
    ------
    DomainError
        If ``N`` is outside ``1..chart.order``.
    SingularDivisionError
        If ``kappa`` on ``S_{delta,0}`` is below ``kappa_min``.
    """
    if not 1 <= N <= chart.order:
        raise DomainError(f"Taylor order must be in 1..{chart.order}")
    jets, V0 = right_jets
    kap0 = chart.series["kappa"][0]
    if np.min(kap0) < kappa_min:
        raise SingularDivisionError(f"kappa = {np.min(kap0):.3e} on S_delta,0 is below {kappa_min}")
    g = law.gamma
    D = N
    n = chart.theta.size
    That0 = np.stack([chart.series["That1"][0], chart.series["That2"][0]])
    U = np.zeros((3, D + 1, n))
    for j in range(n):
        U[:, 0, j] = p_inverse(That0[:, j]) @ V0[:, j]
    if D >= 1:
        U[0, 1] = -2.0 / (g + 1.0)
    for m in range(1, D + 1):
        base = _l_jets(_data_state(chart, U, D), g, m)[:, m]
        cols = []
        for lam in (1, 2):
            trial = U.copy()
            trial[lam, m] += 1.0
            cols.append(_l_jets(_data_state(chart, trial, D), g, m)[:, m] - base)
        rhs = jets[1:, m] - base[1:]
        M = np.array([[cols[0][1], cols[1][1]], [cols[0][2], cols[1][2]]])  # (2, 2, n)
        det = M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0]
        U[1, m] += (M[1, 1] * rhs[0] - M[0, 1] * rhs[1]) / det
        U[2, m] += (-M[1, 0] * rhs[0] + M[0, 0] * rhs[1]) / det
    F = _data_state(chart, U, D)
    got = _l_jets(F, g, D)
    resid = np.abs(got - jets[:, : D + 1]).max(axis=-1)
    V = np.stack([[math.factorial(k) * F[f].a[0, k] for k in range(D + 1)] for f in ("wbar", "w", "psi2")])
    return TaylorData(law, chart.delta, D, chart.theta, U, V, jets[:, : D + 1], resid)


def construct(
    law: GasLaw,
    right: RightSolution,
    delta: float,
    N: int = 4,
    u_star: Optional[float] = None,
    n_theta: int = 64,
    n_u: int = 9,
) -> Tuple[SliceChart, TaylorData]:
    """Chart, jets and Taylor data in one call."""
    chart = build_chart(law, right, delta, u_star=u_star, n_theta=n_theta, n_u=n_u, order=max(N, 1))
    return chart, taylor_coefficients(law, chart, right_jets(chart, right, max(N, 1)), N)


def _horner(coeffs, u):
    """``sum_k coeffs[k] u**k / k!`` with ``coeffs[k]`` broadcast against ``u``."""
    u = np.asarray(u, dtype=float)
    K = len(coeffs) - 1
    out = np.asarray(coeffs[K], dtype=float) * np.ones_like(u)
    for k in range(K - 1, -1, -1):
        out = out * u / (k + 1) + coeffs[k]
    return out


def evaluate_data(td: TaylorData, chart: SliceChart, u, theta) -> InvariantState:
    """Finite Taylor sums of ``(wbar, w, psi2)`` at ``(u, theta)``.

    Raises
    ------
    DomainError
        If ``u`` lies outside ``[0, u_star]``.
    """
    u = float(u)
    if not -1e-14 <= u <= chart.u_star * (1 + 1e-14):
        raise DomainError(f"u = {u} is outside [0, {chart.u_star}]")
    th = np.atleast_1d(float(theta))
    vals = [float(_horner([_fourier_eval(td.V[i, k], th)[0] for k in range(td.order + 1)], u)) for i in range(3)]
    return InvariantState(*vals)


def data_on_grid(td: TaylorData, chart: SliceChart) -> np.ndarray:
    """``(wbar, w, psi2)`` on the chart grid, shape ``(3, n_u, n_theta)``."""
    u = chart.u[:, None]
    return np.stack([_horner([td.V[i, k][None, :] for k in range(td.order + 1)], u) for i in range(3)])


# --------------------------------------------------------------------------
# ansatz verification


@dataclass
class AnsatzItem:
    name: str
    value: float
    scale: float
    constant: float
    passed: bool


@dataclass
class AnsatzReport:
    delta: float
    epsilon: float
    items: List[AnsatzItem]

    @property
    def passed(self) -> bool:
        return all(i.passed for i in self.items)

    def constants(self) -> Dict[str, float]:
        return {i.name: i.constant for i in self.items}

    def to_json(self) -> str:
        return json.dumps(
            {
                "delta": self.delta,
                "epsilon": self.epsilon,
                "passed": self.passed,
                "items": [i.__dict__ for i in self.items],
            },
            indent=2,
            sort_keys=True,
        )


def _sup(a) -> float:
    return float(np.max(np.abs(a)))


def verify_ansatz(td: TaylorData, chart: SliceChart, epsilon: float, C: float = 100.0) -> AnsatzReport:
    """Measure the initial ansatz on ``Sigma_delta^{u*}``.

    Each item reports ``value`` (a sup-norm, energy or residual), the scale
    ``epsilon**a * delta**b`` it is compared with and ``constant =
    value/scale`` (``value`` itself when the scale vanishes). An item passes
    when its constant is at most ``C``.

    Energies use the area element ``sqrt(gslash) du dtheta``.
    """
    law = chart.law
    g = law.gamma
    d = chart.delta
    Du = chart.Du
    wts = chart.weights
    Vg = data_on_grid(td, chart)
    F = {
        "wbar": Vg[0],
        "w": Vg[1],
        "psi2": Vg[2],
        "kappa": chart.kappa,
        "That1": chart.That1,
        "That2": chart.That2,
        "gslash": chart.gslash,
        "Xi": chart.Xi,
    }

    def du(f):
        return Du @ f

    def dth(f):
        return _dtheta(f)

    R = _structure_rhs(F, g, _Ops(du, dth))
    chi, c = R["chi"], R["c"]
    dXi = R["Xi"]
    rg = chart.gslash**-0.5
    kap = chart.kappa

    def T(f):
        return du(f)

    def Xh(f):
        return rg * dth(f)

    Z = {"T": T, "X": Xh}
    comm = {"T": lambda f: -dXi * dth(f), "X": lambda f: -chi * Xh(f)}

    def L_of(word, f, Lf):
        """``L Z_word f`` given ``Lf``."""
        if not word:
            return Lf
        head, rest = word[0], word[1:]
        inner = f
        for z in reversed(rest):
            inner = Z[z](inner)
        return comm[head](inner) + Z[head](L_of(rest, f, Lf))

    def apply(word, f):
        for z in reversed(word):
            f = Z[z](f)
        return f

    words1 = [("T",), ("X",)]
    words2 = [(a, b) for a in "TX" for b in "TX"]
    eps, items = float(epsilon), []

    def add(name, value, a, b):
        scale = eps**a * d**b
        const = value / scale if scale > 0 else value
        items.append(AnsatzItem(name, float(value), float(scale), float(const), bool(const <= C)))

    # geometry (I_infty,1)
    add("gslash-1", _sup(chart.gslash - 1.0), 1, 1)
    add("kappa/delta-1", _sup(kap / d - 1.0), 1, 1)
    add("That2", _sup(chart.That2), 1, 1)
    add("That1+1", _sup(chart.That1 + 1.0), 2, 2)
    add("Z(gslash)", max(_sup(z(chart.gslash)) for z in Z.values()), 1, 1)
    add("Z^a(kappa)", max(_sup(apply(wd, kap)) for wd in words1 + words2), 1, 2)
    add("Z^a(That1)", max(_sup(apply(wd, chart.That1)) for wd in words1 + words2), 2, 2)
    add("Z^a(That2)", max(_sup(apply(wd, chart.That2)) for wd in words1 + words2), 1, 1)
    # solution (I_infty,2)
    psis = {"wbar": Vg[0], "w": Vg[1], "psi2": Vg[2]}
    Lpsi = {k: R[k] for k in psis}
    add("L(psi)+Xhat(psi)", max(_sup(Lpsi[k]) + _sup(Xh(f)) for k, f in psis.items()), 1, 0)
    add(
        "T(w)+T(psi2)+T(wbar)+2/(g+1)",
        _sup(T(Vg[1])) + _sup(T(Vg[2])) + _sup(T(Vg[0]) + 2.0 / (g + 1.0)),
        1,
        1,
    )
    hi = 0.0
    for k, f in psis.items():
        for wd in words1 + words2:
            zf = apply(wd, f)
            hi = max(hi, _sup(L_of(wd, f, Lpsi[k])) + _sup(Xh(zf)) + _sup(T(zf)) / d)
    add("LZ^a(psi)+XhatZ^a(psi)+T Z^a(psi)/delta", hi, 1, 0)
    # energies (I_2) at (delta, u*)
    sq = np.sqrt(chart.gslash)
    mu = c * kap

    def integrate(f):
        return float(np.sum(wts[:, None] * f * sq) * (2.0 * np.pi / chart.theta.size))

    for k in ("w", "psi2"):
        f = psis[k]
        Lf, Xf = Lpsi[k], Xh(f)
        E = 0.5 * integrate(kap / c * (kap / c * Lf**2 + mu * Xf**2))
        Lb = kap / c * Lf + 2.0 * T(f)
        Eb = 0.5 * integrate(Lb**2 + kap**2 * Xf**2)
        add(f"E({k})+Ebar({k})", E + Eb, 2, 2)
    # irrotationality: grad f = That (That f) + Xhat (Xhat f)
    v1, v2 = Vg[0] - Vg[1], -Vg[2]
    X1, X2 = chart.That2, -chart.That1

    def grad(f):
        tf, xf = T(f) / kap, Xh(f)
        return chart.That1 * tf + X1 * xf, chart.That2 * tf + X2 * xf

    curl = grad(v2)[0] - grad(v1)[1]
    add("curl(v)", _sup(curl), 1, 1)
    return AnsatzReport(d, eps, items)


# --------------------------------------------------------------------------
# data at the singular boundary and the front seeds


def limiting_data(right_trace_at_origin: InvariantState, law: GasLaw, u: float) -> InvariantState:
    """Data on the singular boundary: ``(wbar_r - 2u/(gamma+1), w_r, -v2_r)``.

    ``right_trace_at_origin`` holds the right Riemann invariants at
    ``(t, x1) = (0, 0)`` for the angle of interest.
    """
    r = right_trace_at_origin
    return InvariantState(r.wbar - 2.0 * float(u) / (law.gamma + 1.0), r.w, r.psi2)


def h0(law: GasLaw, wbar_right, wbar_left, u_star: Optional[float] = None) -> FrontGraph:
    """Graph ``u = (gamma+1)/2 (wbar_r - wbar_l)`` of the inner front seed ``H_0``.

    Arguments are samples on the uniform angle grid ``2 pi k / n`` (or scalars).

    Raises
    ------
    DomainError
        If ``wbar_r <= wbar_l`` somewhere or the graph exceeds ``u_star``.
    """
    return _seed(law, np.atleast_1d(wbar_right) - np.atleast_1d(wbar_left), u_star)


def h0bar(law: GasLaw, w_left, w_right, u_star: Optional[float] = None) -> FrontGraph:
    """Mirror seed for the back rarefaction: ``u = (gamma+1)/2 (w_l - w_r)``."""
    return _seed(law, np.atleast_1d(w_left) - np.atleast_1d(w_right), u_star)


def _seed(law, jump, u_star):
    jump = np.asarray(jump, dtype=float)
    if np.any(jump <= 0):
        raise DomainError("the seed needs a strictly positive jump of the Riemann invariant")
    vals = 0.5 * (law.gamma + 1.0) * jump
    if u_star is not None and np.any(vals > u_star):
        raise DomainError(f"front seed reaches u = {vals.max():.4g} beyond u* = {u_star:.4g}")
    if vals.size == 1:
        return FrontGraph.constant(float(vals[0]))
    return FrontGraph.from_samples(vals)


# --------------------------------------------------------------------------
# output


SLICE_COLUMNS = ("theta", "u", "x1", "x2", "wbar", "w", "psi2", "kappa", "That1", "That2")


def write_slice_csv(path, td: TaylorData, chart: SliceChart) -> None:
    Vg = data_on_grid(td, chart)
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(SLICE_COLUMNS)
        for i, u in enumerate(chart.u):
            for j, th in enumerate(chart.theta):
                row = (th, u, chart.x1[i, j], chart.x2[i, j], Vg[0, i, j], Vg[1, i, j], Vg[2, i, j],
                       chart.kappa[i, j], chart.That1[i, j], chart.That2[i, j])
                wr.writerow(["%.17g" % x for x in row])
