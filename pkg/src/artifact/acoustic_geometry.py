"""Acoustical metric, null frames, characteristics and null geodesics.

Two kinds of background are used.

* Cartesian backgrounds return ``(c, v1, v2)`` and their spatial gradients
  at ``(t, x1, x2)``: :class:`ConstantBackground`, :class:`AnalyticFan`
  (exact 1D centered waves) and :class:`SampledBackground` (interpolated
  solver output).
* Chart backgrounds describe the metric in acoustical coordinates
  ``(t, u, theta)`` through ``mu, c, gslash, Xihat`` and their partials; they
  drive the cotangent-bundle Hamiltonian system.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import RectBivariateSpline

from .gas_model import DomainError, GasLaw, ModelError, PrimitiveState, VacuumError, invariants_from_cv


class IntegrationError(ModelError):
    """An integration failed; ``last_point`` holds the last valid state."""

    def __init__(self, message, last_point=None):
        super().__init__(message)
        self.last_point = last_point


# --------------------------------------------------------------------------
# Cartesian backgrounds


@dataclass(frozen=True)
class BackgroundSample:
    """``(c, v1, v2)`` at a point and the spatial gradient ``grad[k] = (d1, d2)`` of each."""

    values: np.ndarray
    grad: np.ndarray

    @property
    def c(self) -> float:
        return float(self.values[0])

    @property
    def v(self) -> np.ndarray:
        return self.values[1:]


class CartesianBackground:
    """Base class; subclasses implement :meth:`sample`."""

    law: GasLaw

    def sample(self, t: float, x1: float, x2: float) -> BackgroundSample:  # pragma: no cover
        raise NotImplementedError

    def time_derivative(self, t, x1, x2) -> np.ndarray:
        """``d/dt`` of ``(c, v1, v2)`` from the Euler equations (smooth regions)."""
        s = self.sample(t, x1, x2)
        c, v = s.c, s.v
        g = self.law.gamma
        dc, dv1, dv2 = s.grad
        div = dv1[0] + dv2[1]
        ct = -(v @ dc) - 0.5 * (g - 1.0) * c * div
        v1t = -(v @ dv1) - 2.0 / (g - 1.0) * c * dc[0]
        v2t = -(v @ dv2) - 2.0 / (g - 1.0) * c * dc[1]
        return np.array([ct, v1t, v2t])


@dataclass
class ConstantBackground(CartesianBackground):
    law: GasLaw
    c: float
    v1: float = 0.0
    v2: float = 0.0

    def sample(self, t, x1, x2):
        return BackgroundSample(np.array([self.c, self.v1, self.v2], dtype=float), np.zeros((3, 2)))


@dataclass
class AnalyticFan(CartesianBackground):
    """Exact self-similar 1D Riemann solution, as a function of ``xi = x1/t``."""

    law: GasLaw
    left: PrimitiveState
    right: PrimitiveState

    def __post_init__(self):
        from .riemann1d import solve

        self.fan = solve(self.law, self.left, self.right)

    def sample(self, t, x1, x2):
        from .riemann1d import WaveKind, sample

        if t <= 0:
            raise DomainError("the fan is only defined for t > 0")
        law, fan = self.law, self.fan
        xi = x1 / t
        s = sample(fan, xi)
        c = float(law.sound_speed(s.rho))
        grad = np.zeros((3, 2))
        g = law.gamma
        w1, w2 = fan.wave1, fan.wave2
        in_back = w1.kind is WaveKind.BACK_RAREFACTION and w1.left_edge <= xi < w1.right_edge
        in_front = w2.kind is WaveKind.FRONT_RAREFACTION and w2.left_edge <= xi < w2.right_edge
        if in_back or in_front:
            # wbar (front fan) or w (back fan) is linear in xi with slope 2/(g+1)
            dinv = 2.0 / ((g + 1.0) * t)
            if in_front:
                dc, dv = 0.5 * (g - 1.0) * dinv, dinv
            else:
                dc, dv = -0.5 * (g - 1.0) * dinv, dinv
            grad[0, 0] = dc
            grad[1, 0] = dv
        return BackgroundSample(np.array([c, s.v1, s.v2]), grad)


class SampledBackground(CartesianBackground):
    """Bicubic-in-space, linear-in-time interpolation of solver slices.

    Spatial derivatives come from differentiating the spline analytically.
    x2 is periodic with period ``grid.length2``; the spline is built on a
    padded copy of the data.
    """

    def __init__(self, law: GasLaw, grid, times: Sequence[float], fields: Sequence[np.ndarray], pad: int = 4):
        if len(times) != len(fields) or len(times) < 1:
            raise ValueError("need one conserved field per time")
        self.law = law
        self.grid = grid
        self.times = np.asarray(times, dtype=float)
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must increase")
        x1 = grid.x1
        x2 = grid.x2
        n2 = grid.nx2
        x2p = np.concatenate([x2[-pad:] - grid.length2, x2, x2[:pad] + grid.length2])
        self._splines = []
        for U in fields:
            rho = U[0]
            c = law.sound_speed(rho)
            v1 = U[1] / rho
            v2 = U[2] / rho
            sp = []
            for f in (c, v1, v2):
                fp = np.concatenate([f[:, n2 - pad :], f, f[:, :pad]], axis=1)
                sp.append(RectBivariateSpline(x1, x2p, fp, kx=3, ky=3))
            self._splines.append(sp)

    @classmethod
    def from_run(cls, artifacts) -> "SampledBackground":
        times = [0.0] + [s.t for s in artifacts.slices]
        fields = [artifacts.initial] + [s.U for s in artifacts.slices]
        return cls(artifacts.config.law, artifacts.grid, times, fields)

    def _eval(self, k, x1, x2):
        vals = np.empty(3)
        grad = np.empty((3, 2))
        for m, sp in enumerate(self._splines[k]):
            vals[m] = sp.ev(x1, x2)
            grad[m, 0] = sp.ev(x1, x2, dx=1)
            grad[m, 1] = sp.ev(x1, x2, dy=1)
        return vals, grad

    def contains(self, t, x1, x2) -> bool:
        g = self.grid
        return self.times[0] <= t <= self.times[-1] and abs(x1) <= g.half_width - 2 * g.dx1

    def sample(self, t, x1, x2):
        if not self.contains(t, x1, x2):
            raise DomainError(f"point ({t}, {x1}, {x2}) outside the sampled background")
        x2 = x2 % self.grid.length2
        k = int(np.searchsorted(self.times, t, side="right") - 1)
        k = min(max(k, 0), len(self.times) - 2) if len(self.times) > 1 else 0
        v0, g0 = self._eval(k, x1, x2)
        if len(self.times) == 1:
            return BackgroundSample(v0, g0)
        v1, g1 = self._eval(k + 1, x1, x2)
        lam = (t - self.times[k]) / (self.times[k + 1] - self.times[k])
        return BackgroundSample((1 - lam) * v0 + lam * v1, (1 - lam) * g0 + lam * g1)


# --------------------------------------------------------------------------
# metric and null frame


def metric(c: float, v, V, W) -> float:
    """Acoustical metric ``-c^2 dt^2 + sum (dx^i - v^i dt)^2`` applied to ``(V, W)``."""
    V = np.asarray(V, dtype=float)
    W = np.asarray(W, dtype=float)
    v = np.asarray(v, dtype=float)
    a = V[1:] - v * V[0]
    b = W[1:] - v * W[0]
    return float(-c * c * V[0] * W[0] + a @ b)


@dataclass(frozen=True)
class NullFrame:
    """Null frame at a spacetime point; vectors are ``(t, x1, x2)`` components."""

    L: np.ndarray
    That: np.ndarray
    Xhat: np.ndarray
    kappa: float
    mu: float
    c: float
    v: np.ndarray

    @property
    def T(self) -> np.ndarray:
        return self.kappa * self.That

    @property
    def Lbar(self) -> np.ndarray:
        return self.kappa / self.c * self.L + 2.0 * self.T

    def residuals(self) -> dict:
        g = lambda a, b: metric(self.c, self.v, a, b)
        return {
            "g(L,L)": g(self.L, self.L),
            "g(Xhat,Xhat)-1": g(self.Xhat, self.Xhat) - 1.0,
            "g(L,T)+mu": g(self.L, self.T) + self.mu,
            "g(L,Xhat)": g(self.L, self.Xhat),
            "g(T,Xhat)": g(self.T, self.Xhat),
            "g(Lbar,Lbar)": g(self.Lbar, self.Lbar),
            "g(L,Lbar)+2mu": g(self.L, self.Lbar) + 2.0 * self.mu,
        }


def frame_from_state(c: float, v, normal_hint, kappa: float = 1.0) -> NullFrame:
    """Null frame for a local state ``(c, v)`` with ``That`` along ``normal_hint``."""
    n = np.asarray(normal_hint, dtype=float)
    nrm = float(np.hypot(n[0], n[1]))
    if nrm == 0:
        raise DomainError("normal hint must be nonzero")
    if not c > 0:
        raise VacuumError("frame needs a positive sound speed")
    Th = n / nrm
    Xh = np.array([Th[1], -Th[0]])
    v = np.asarray(v, dtype=float)
    L = np.concatenate([[1.0], v - c * Th])
    return NullFrame(L, np.concatenate([[0.0], Th]), np.concatenate([[0.0], Xh]), float(kappa), float(c * kappa), float(c), v)


def frame_at(bg: CartesianBackground, point, normal_hint, kappa: float = 1.0) -> NullFrame:
    """Null frame of ``bg`` at ``point = (t, x1, x2)``.

    ``That`` is the normalized hint, ``Xhat`` its clockwise quarter turn
    (so ``That = (-1, 0)`` gives ``Xhat = (0, 1)``) and ``L = d_t + v - c That``.

    Raises
    ------
    VacuumError
        If the sound speed at the point is not positive.
    """
    s = bg.sample(*point)
    return frame_from_state(s.c, s.v, normal_hint, kappa)


# --------------------------------------------------------------------------
# characteristics in Cartesian coordinates


@dataclass
class CharacteristicPath:
    """Integral curve of ``L`` with the transported ``That`` and ``kappa``."""

    t: np.ndarray
    x1: np.ndarray
    x2: np.ndarray
    That: np.ndarray
    kappa: np.ndarray
    exited: bool = False


def characteristic_rhs(bg: CartesianBackground, t, y):
    """Right-hand side for ``y = (x1, x2, That1, That2, kappa)`` along ``L``.

    ``dx/dt = v - c That``,
    ``dThat/dt = (That^j Xhat(psi_j) + Xhat(c)) Xhat`` and
    ``L kappa = kappa (-(g+1)/(g-1) That.grad c + c^-1 That^i L(psi_i))``
    where ``psi_i = -v^i`` and ``L(v^i) = -c That.grad v^i - 2/(g-1) c d_i c``
    follows from the Euler equations.
    """
    x1, x2, T1, T2, kappa = y
    s = bg.sample(t, x1, x2)
    c, v = s.c, s.v
    g = bg.law.gamma
    Th = np.array([T1, T2])
    Xh = np.array([T2, -T1])
    dc = s.grad[0]
    dv = s.grad[1:]  # dv[i] = grad v^i
    Xc = Xh @ dc
    Xpsi = -(dv @ Xh)  # Xhat(psi_j)
    dTh = (Th @ Xpsi + Xc) * Xh
    Lv = -c * (dv @ Th) - 2.0 / (g - 1.0) * c * dc
    Lpsi = -Lv
    dkappa = kappa * (-(g + 1.0) / (g - 1.0) * (Th @ dc) + (Th @ Lpsi) / c)
    dx = v - c * Th
    return np.array([dx[0], dx[1], dTh[0], dTh[1], dkappa])


def characteristic_trace_cartesian(
    bg: CartesianBackground,
    x_start,
    t_start: float,
    t_end: float,
    That0=(-1.0, 0.0),
    kappa0: Optional[float] = None,
    rtol: float = 1e-10,
    atol: float = 1e-12,
    t_eval=None,
) -> CharacteristicPath:
    """Trace the ``L`` integral curve from ``(t_start, x_start)`` to ``t_end``.

    ``kappa0`` defaults to ``t_start``, its value on an exact centered fan.
    If the path leaves the background's domain the result is truncated and
    ``exited`` is set.
    """
    k0 = t_start if kappa0 is None else kappa0
    y0 = np.array([x_start[0], x_start[1], That0[0], That0[1], k0], dtype=float)
    exited = False

    def rhs(t, y):
        return characteristic_rhs(bg, t, y)

    check = getattr(bg, "contains", None)
    events = None
    if check is not None:

        def leave(t, y):
            g = bg.grid
            return g.half_width - 3 * g.dx1 - abs(y[0])

        leave.terminal = True
        events = [leave]
    sol = solve_ivp(rhs, (t_start, t_end), y0, method="DOP853", rtol=rtol, atol=atol, t_eval=t_eval, events=events)
    if sol.status == 1:
        exited = True
    elif sol.status != 0:
        raise IntegrationError(sol.message)
    y = sol.y
    return CharacteristicPath(sol.t, y[0], y[1], y[2:4].T, y[4], exited)


def dwbar_du(bg: CartesianBackground, t, x1, x2, That, kappa) -> float:
    """``T(wbar) = kappa That . grad wbar`` at a point."""
    s = bg.sample(t, x1, x2)
    g = bg.law.gamma
    grad_wbar = 0.5 * (2.0 / (g - 1.0) * s.grad[0] + s.grad[1])
    return float(kappa * (np.asarray(That) @ grad_wbar))


# --------------------------------------------------------------------------
# chart backgrounds and the Hamiltonian system


@dataclass(frozen=True)
class ChartValues:
    """Metric data at a point of an acoustical chart.

    Each ``d*`` field is the gradient ``(d/dt, d/du, d/dtheta)``.
    """

    mu: float
    c: float
    ginv: float
    xihat: float
    dmu: np.ndarray
    dc: np.ndarray
    dginv: np.ndarray
    dxihat: np.ndarray


@dataclass(frozen=True)
class SmoothChart:
    """Closed-form chart background used for the Hamiltonian system.

    ``c = c0 + cu u + ct t + cth sin(theta)``,
    ``mu = t c (1 + k1 cos(theta))`` (so ``kappa = t (1 + k1 cos theta)``),
    ``gslash = 1 + g1 t cos(theta)`` and
    ``Xihat = x0 sin(theta) + x1 t``.
    All quantities are exact with exact partial derivatives, and ``mu`` and
    its ``u, theta`` derivatives vanish identically at ``t = 0``.
    """

    c0: float = 1.0
    cu: float = 0.0
    ct: float = 0.0
    cth: float = 0.0
    k1: float = 0.0
    g1: float = 0.0
    x0: float = 0.0
    x1: float = 0.0

    @classmethod
    def fan(cls, law: GasLaw, right: PrimitiveState) -> "SmoothChart":
        """Front fan of a constant right state: ``c = c_r - (g-1)/(g+1) u``, ``kappa = t``."""
        cr = float(law.sound_speed(right.rho))
        return cls(c0=cr, cu=-(law.gamma - 1.0) / (law.gamma + 1.0))

    def evaluate(self, t, u, th) -> ChartValues:
        s, co = math.sin(th), math.cos(th)
        c = self.c0 + self.cu * u + self.ct * t + self.cth * s
        if not c > 0:
            raise VacuumError(f"chart sound speed {c} is not positive at {(t, u, th)}")
        dc = np.array([self.ct, self.cu, self.cth * co])
        k = 1.0 + self.k1 * co
        dk_th = -self.k1 * s
        mu = t * c * k
        dmu = np.array([c * k + t * dc[0] * k, t * dc[1] * k, t * (dc[2] * k + c * dk_th)])
        gs = 1.0 + self.g1 * t * co
        dgs = np.array([self.g1 * co, 0.0, -self.g1 * t * s])
        ginv = 1.0 / gs
        dginv = -dgs / (gs * gs)
        xi = self.x0 * s + self.x1 * t
        dxi = np.array([self.x1, 0.0, self.x0 * co])
        return ChartValues(mu, c, ginv, xi, dmu, dc, dginv, dxi)


@dataclass(frozen=True)
class CotangentPoint:
    t: float
    u: float
    theta: float
    p_t: float
    p_u: float
    p_theta: float

    def as_array(self) -> np.ndarray:
        return np.array([self.t, self.u, self.theta, self.p_t, self.p_u, self.p_theta])

    @classmethod
    def from_array(cls, a) -> "CotangentPoint":
        return cls(*(float(x) for x in a))


def hamiltonian(chart, pt) -> float:
    """``H = -p_t p_u + mu(-p_t^2/(2 c^2) + ginv p_theta^2 / 2 + Xihat p_t p_theta)``."""
    y = pt.as_array() if isinstance(pt, CotangentPoint) else np.asarray(pt)
    t, u, th, pt_, pu, pth = y
    cv = chart.evaluate(t, u, th)
    Q = -0.5 * pt_ * pt_ / cv.c**2 + 0.5 * cv.ginv * pth * pth + cv.xihat * pt_ * pth
    return float(-pt_ * pu + cv.mu * Q)


def geodesic_rhs(chart, pt) -> np.ndarray:
    """Canonical equations ``(dq/dtau, dp/dtau) = (dH/dp, -dH/dq)``."""
    y = pt.as_array() if isinstance(pt, CotangentPoint) else np.asarray(pt, dtype=float)
    t, u, th, pt_, pu, pth = y
    cv = chart.evaluate(t, u, th)
    c = cv.c
    Q = -0.5 * pt_ * pt_ / c**2 + 0.5 * cv.ginv * pth * pth + cv.xihat * pt_ * pth
    dQ = pt_ * pt_ / c**3 * cv.dc + 0.5 * cv.dginv * pth * pth + cv.dxihat * pt_ * pth
    dt = -pu + cv.mu * (-pt_ / c**2 + cv.xihat * pth)
    du = -pt_
    dth = cv.mu * (cv.ginv * pth + cv.xihat * pt_)
    dp = -(cv.dmu * Q + cv.mu * dQ)
    return np.array([dt, du, dth, dp[0], dp[1], dp[2]])


def chart_metric(chart, t, u, th, V) -> float:
    """``g(V, V)`` for ``V = (dt, du, dtheta)`` with
    ``g = -2 mu dt du + kappa^2 du^2 + gslash (dtheta + Xi du)^2`` and ``Xi = mu Xihat``.
    """
    cv = chart.evaluate(t, u, th)
    kappa = cv.mu / cv.c
    Xi = cv.mu * cv.xihat
    a, b, d = V
    return float(-2.0 * cv.mu * a * b + kappa * kappa * b * b + (d + Xi * b) ** 2 / cv.ginv)


@dataclass
class Trajectory:
    tau: np.ndarray
    y: np.ndarray  # shape (6, n)
    H: np.ndarray
    status: str = "ok"

    def points(self) -> List[CotangentPoint]:
        return [CotangentPoint.from_array(self.y[:, k]) for k in range(self.tau.size)]

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["tau", "t", "u", "theta", "p_t", "p_u", "p_theta", "H"])
            for k in range(self.tau.size):
                w.writerow(["%.17g" % v for v in (self.tau[k], *self.y[:, k], self.H[k])])


def outgoing_launch(chart, start: CotangentPoint, tau0: float) -> np.ndarray:
    """Second-order expansion of an outgoing geodesic from ``t = 0`` evaluated at ``tau0``."""
    cv = chart.evaluate(start.t, start.u, start.theta)
    mt = cv.dmu[0]
    p = start.p_theta
    t = start.t + tau0 + 0.5 * mt * cv.xihat * p * tau0**2
    u = start.u + 0.25 * mt * cv.ginv * p * p * tau0**2
    th = start.theta + 0.5 * mt * cv.ginv * p * tau0**2
    pt_ = -0.5 * mt * cv.ginv * p * p * tau0
    return np.array([t, u, th, pt_, start.p_u, start.p_theta])


def integrate_geodesic(
    chart,
    start: CotangentPoint,
    t_end: float,
    tol: float = 1e-9,
    tau_max: Optional[float] = None,
    launch_tau: float = 0.0,
    method: str = "RK45",
    dense_tau=None,
) -> Trajectory:
    """Integrate the canonical system from ``start`` until ``t = t_end``.

    Outgoing data on ``t = 0`` may be launched from ``tau = launch_tau``
    via the second-order expansion. ``tau_max`` caps the parameter range
    (useful for data that never leave ``t = 0``).

    Raises
    ------
    IntegrationError
        On step-size underflow; ``last_point`` carries the last accepted state.
    """
    if tol <= 0:
        raise DomainError("tolerance must be positive")
    y0 = start.as_array()
    tau0 = 0.0
    if launch_tau > 0 and start.t == 0.0 and start.p_t == 0.0 and start.p_u != 0.0:
        y0 = outgoing_launch(chart, start, launch_tau)
        tau0 = launch_tau
    if tau_max is None:
        tau_max = 10.0 * max(t_end, 1.0)

    def reach(tau, y):
        return y[0] - t_end

    reach.terminal = True
    reach.direction = 1
    sol = solve_ivp(
        lambda s, y: geodesic_rhs(chart, y),
        (tau0, tau_max),
        y0,
        method=method,
        rtol=tol,
        atol=tol,
        events=[reach],
        t_eval=dense_tau,
        dense_output=False,
    )
    if sol.status == -1:
        raise IntegrationError(sol.message, CotangentPoint.from_array(sol.y[:, -1]) if sol.y.size else start)
    tau, y = sol.t, sol.y
    if dense_tau is None and tau0 > 0:
        tau = np.concatenate([[0.0], tau])
        y = np.concatenate([start.as_array()[:, None], y], axis=1)
    if sol.status == 1 and sol.t_events[0].size and dense_tau is None:
        tau = np.append(tau, sol.t_events[0][0])
        y = np.concatenate([y, sol.y_events[0][0][:, None]], axis=1)
    H = np.array([hamiltonian(chart, y[:, k]) for k in range(tau.size)])
    return Trajectory(tau, y, H, "reached" if sol.status == 1 else "tau_max")


# --------------------------------------------------------------------------
# fronts from the singular boundary


@dataclass
class FrontGraph:
    """Periodic graph ``u = f(theta)`` on ``[0, 2 pi]``."""

    f: Callable[[float], float]
    fprime: Callable[[float], float]

    @classmethod
    def constant(cls, u0: float) -> "FrontGraph":
        return cls(lambda a: float(u0), lambda a: 0.0)

    @classmethod
    def from_samples(cls, values) -> "FrontGraph":
        """Trigonometric interpolant of samples on the uniform grid ``2 pi k / n``."""
        v = np.asarray(values, dtype=float)
        n = v.size
        coef = np.fft.rfft(v) / n
        k = np.arange(coef.size)
        if n % 2 == 0:
            coef = coef.copy()
            coef[-1] *= 0.5

        def f(a):
            return float(coef[0].real + 2.0 * np.sum((coef[1:] * np.exp(1j * k[1:] * a)).real))

        def fp(a):
            return float(2.0 * np.sum((1j * k[1:] * coef[1:] * np.exp(1j * k[1:] * a)).real))

        return cls(f, fp)


@dataclass
class FrontSurface:
    alpha: np.ndarray
    rays: List[Trajectory]
    status: List[str]

    def grid(self, n_tau: int = 21):
        """Spacetime points ``(t, u, theta)`` on an ``(alpha, tau)`` grid, shape ``(n_alpha, n_tau, 3)``."""
        out = np.full((self.alpha.size, n_tau, 3), np.nan)
        for i, r in enumerate(self.rays):
            if r is None:
                continue
            taus = np.linspace(r.tau[0], r.tau[-1], n_tau)
            for m in range(3):
                out[i, :, m] = np.interp(taus, r.tau, r.y[m])
        return out


def trace_front(chart, graph: FrontGraph, n_rays: int, t_end: float, tol: float = 1e-9, launch_tau: float = 1e-6) -> FrontSurface:
    """Rule the characteristic hypersurface from ``Gamma_f`` by outgoing null geodesics.

    Ray ``alpha`` starts at ``(0, f(alpha), alpha, 0, -1, f'(alpha))``.
    """
    if n_rays < 8:
        raise DomainError("need at least 8 rays")
    alpha = 2.0 * np.pi * np.arange(n_rays) / n_rays
    rays, status = [], []
    for a in alpha:
        start = CotangentPoint(0.0, graph.f(a), float(a), 0.0, -1.0, graph.fprime(a))
        try:
            r = integrate_geodesic(chart, start, t_end, tol=tol, launch_tau=launch_tau)
            rays.append(r)
            status.append(r.status)
        except IntegrationError as exc:
            rays.append(None)
            status.append(f"failed: {exc}")
    return FrontSurface(alpha, rays, status)


def trace_front_cartesian(
    bg: CartesianBackground,
    slope,
    x2_values,
    t0: float,
    t_end: float,
    t_eval=None,
) -> List[CharacteristicPath]:
    """Front rays on a Cartesian background launched near the singular set.

    Each ray starts at ``(t0, slope(x2) t0, x2)`` with ``That = (-1, 0)`` and
    ``kappa = t0``, the centered-fan values at leading order.
    """
    out = []
    for x2 in np.asarray(x2_values, dtype=float):
        out.append(characteristic_trace_cartesian(bg, (slope(x2) * t0, x2), t0, t_end, t_eval=t_eval))
    return out


def wbar_along(bg: CartesianBackground, path: CharacteristicPath) -> np.ndarray:
    law = bg.law
    out = np.empty(path.t.size)
    for k in range(path.t.size):
        s = bg.sample(path.t[k], path.x1[k], path.x2[k])
        out[k] = invariants_from_cv(law, s.c, s.v[0])[0]
    return out
