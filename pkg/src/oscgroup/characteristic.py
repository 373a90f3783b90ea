"""Standard solutions of the characteristic equation

    mu'' - tau(t) mu' + 4 sigma(t) mu = 0

normalized by mu0(0) = 0, mu0'(0) = 2 a(0) and mu1(0) = 1, mu1'(0) = 0.

Both solutions are integrated together with an adaptive Dormand-Prince
5(4) pair, forward and backward from t = 0, and kept as dense output
(cubic Hermite interpolation on the accepted step nodes).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .coefficients import CoefficientSet, tau_integral
from .errors import DomainError, IntegrationError
from .expr import is_zero

DEFAULT_GRID_STEP = 1e-3
DEFAULT_RK_TOL = 1e-10

# Dormand-Prince 5(4) tableau.
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [np.array(row) for row in (
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
)]
_B5 = np.append(_A[6], 0.0)
_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
_E = _B5 - _B4


def _rhs(cs):
    # Scalar fast path; mirrors coefficients.tau_sigma.
    fn = cs.fn
    a, da, b, c, d, dd = (fn.a.raw, fn.da.raw, fn.b.raw, fn.c.raw, fn.d.raw, fn.dd.raw)
    with_d = not is_zero(cs.d)

    def f(t, y):
        try:
            at = a(t)
            a_log = da(t) / at
            ct, dt = c(t), d(t)
            tau = a_log - 2.0 * ct + 4.0 * dt
            sigma = at * b(t) - ct * dt + dt * dt
            if with_d:
                sigma += 0.5 * (dt * a_log - dd(t)) if dt != 0.0 else 1.0 / dt
        except (ZeroDivisionError, ValueError, OverflowError) as exc:
            raise DomainError(f"characteristic coefficients undefined at t={t!r}: {exc}") from None
        return np.array([
            y[1], tau * y[1] - 4.0 * sigma * y[0],
            y[3], tau * y[3] - 4.0 * sigma * y[2],
        ])
    return f


def _integrate(f, t_end, y0, h_max, tol):
    """Integrate from t=0 to ``t_end`` (either sign). Returns node arrays."""
    direction = 1.0 if t_end >= 0 else -1.0
    ts, ys, fs = [0.0], [y0], [f(0.0, y0)]
    if t_end == 0.0:
        return np.array(ts), np.array(ys), np.array(fs)
    t, y, k1 = 0.0, y0, fs[0]
    h = min(h_max, abs(t_end)) * 0.1
    while direction * (t_end - t) > 0:
        h = min(h, h_max, abs(t_end - t))
        if h < 1e-13 * max(1.0, abs(t)):
            raise IntegrationError(f"step size underflow at t={t!r}")
        hs = direction * h
        k = np.empty((7, y.size))
        k[0] = k1
        for i in range(1, 7):
            k[i] = f(t + _C[i] * hs, y + hs * (_A[i] @ k[:i]))
        y_new = y + hs * (_B5 @ k)
        err_vec = hs * (_E @ k)
        scale = tol * np.maximum(1.0, np.maximum(np.abs(y), np.abs(y_new)))
        err = float(np.max(np.abs(err_vec) / scale))
        if err <= 1.0:
            t = t_end if abs(t_end - (t + hs)) < 1e-14 * max(1.0, abs(t_end)) else t + hs
            y, k1 = y_new, k[6]
            ts.append(t)
            ys.append(y)
            fs.append(k1)
        factor = 5.0 if err == 0.0 else 0.9 * err ** -0.2
        h *= min(5.0, max(0.2, factor))
    return np.array(ts), np.array(ys), np.array(fs)


@dataclass(frozen=True, eq=False)
class CharacteristicData:
    """Dense-output standard solutions mu0, mu1 on the coefficient domain.

    Attributes
    ----------
    nodes : ndarray
        Sorted node times.
    values : ndarray
        ``(N, 4)`` array of (mu0, mu0', mu1, mu1') at the nodes.
    slopes : ndarray
        Time derivatives of ``values`` at the nodes.
    a0 : float
        a(0).
    cs : CoefficientSet
        The originating coefficients.
    """

    nodes: np.ndarray
    values: np.ndarray
    slopes: np.ndarray
    a0: float
    cs: CoefficientSet

    def evaluate(self, t):
        """Interpolated (mu0, mu0', mu1, mu1') at ``t``; shape ``t.shape + (4,)``."""
        t = np.asarray(t, dtype=float)
        lo, hi = self.nodes[0], self.nodes[-1]
        if np.any((t < lo) | (t > hi)):
            raise DomainError(f"t outside the solved interval [{lo}, {hi}]")
        i = np.clip(np.searchsorted(self.nodes, t, side="right") - 1, 0, self.nodes.size - 2)
        t0, t1 = self.nodes[i], self.nodes[i + 1]
        h = t1 - t0
        s = ((t - t0) / h)[..., None]
        h = h[..., None]
        y0, y1 = self.values[i], self.values[i + 1]
        f0, f1 = self.slopes[i], self.slopes[i + 1]
        h00 = (1 + 2 * s) * (1 - s) ** 2
        h10 = s * (1 - s) ** 2
        h01 = s * s * (3 - 2 * s)
        h11 = s * s * (s - 1)
        return h00 * y0 + h10 * h * f0 + h01 * y1 + h11 * h * f1

    def mu0(self, t):
        return self.evaluate(t)[..., 0]

    def dmu0(self, t):
        return self.evaluate(t)[..., 1]

    def mu1(self, t):
        return self.evaluate(t)[..., 2]

    def dmu1(self, t):
        return self.evaluate(t)[..., 3]

    def wronskian(self, t):
        """mu0 mu1' - mu0' mu1 at ``t``."""
        v = self.evaluate(t)
        return v[..., 0] * v[..., 3] - v[..., 1] * v[..., 2]


@lru_cache(maxsize=64)
def solve_characteristic(cs: CoefficientSet, grid_step: float = DEFAULT_GRID_STEP,
                         rk_tol: float = DEFAULT_RK_TOL) -> CharacteristicData:
    """Integrate the homogeneous characteristic equation over ``cs.domain``.

    Steps are capped at ``grid_step`` so the dense-output nodes are never
    farther apart than that.

    Raises
    ------
    IntegrationError
        If the step size underflows (singular coefficients).
    DomainError
        If a coefficient cannot be evaluated.
    """
    if grid_step <= 0:
        raise ValueError("grid_step must be positive")
    if not 1e-14 <= rk_tol <= 1e-6:
        raise ValueError("rk_tol must lie in [1e-14, 1e-6]")
    a0 = float(cs.fn.a(0.0))
    if a0 == 0.0:
        raise DomainError("a(0) must be nonzero")
    f = _rhs(cs)
    y0 = np.array([0.0, 2.0 * a0, 1.0, 0.0])
    lo, hi = cs.domain
    tf, yf, ff = _integrate(f, hi, y0, grid_step, rk_tol)
    tb, yb, fb = _integrate(f, lo, y0, grid_step, rk_tol)
    nodes = np.concatenate([tb[:0:-1], tf])
    values = np.concatenate([yb[:0:-1], yf])
    slopes = np.concatenate([fb[:0:-1], ff])
    for arr in (nodes, values, slopes):
        arr.setflags(write=False)
    return CharacteristicData(nodes, values, slopes, a0, cs)


def wronskian_residual(cd: CharacteristicData, t):
    """|mu0 mu1' - mu0' mu1 + 2 a(0) exp(int_0^t tau)|."""
    expected = -2.0 * cd.a0 * np.exp(tau_integral(cd.cs, t))
    return np.abs(cd.wronskian(t) - expected)
