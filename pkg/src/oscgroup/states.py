"""Oscillator wave functions, Green function and grid utilities.

All spatial integrals use the trapezoid rule on uniform grids, which is
spectrally accurate for the smooth, rapidly decaying states handled here.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, replace

import numpy as np

from .errors import DomainError, OverflowGuard, SingularTime, TruncationWarning
from .kernel import FundamentalPoint, KernelParameters

MAX_N = 200
EDGE_DECAY = 1e-12


@dataclass(frozen=True, eq=False)
class GridState:
    """Complex samples ``values[k] = psi(x0 + k dx)`` at time ``t``."""

    x0: float
    dx: float
    values: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        if self.dx <= 0:
            raise ValueError("dx must be positive")
        values = np.asarray(self.values, dtype=complex)
        if values.ndim != 1 or values.size < 8:
            raise ValueError("a grid state needs at least 8 samples")
        object.__setattr__(self, "values", values)

    @property
    def x(self) -> np.ndarray:
        return self.x0 + self.dx * np.arange(self.values.size)

    @classmethod
    def sample(cls, func, grid, t=0.0):
        """Sample ``func(x)`` on ``grid = (start, stop, step)`` (stop included)."""
        x = grid_points(*grid)
        return cls(float(x[0]), float(grid[2]), func(x), t)

    def with_values(self, values, t=None):
        return replace(self, values=values, t=self.t if t is None else t)

    def to_csv(self, path):
        """Write ``x,re,im,abs2`` rows with round-trip float formatting."""
        with open(path, "w", newline="") as fh:
            write_grid_csv(fh, self.x, self.values)


def grid_points(start, stop, step) -> np.ndarray:
    n = int(round((stop - start) / step))
    if n < 1:
        raise ValueError("empty grid")
    return start + step * np.arange(n + 1)


def write_grid_csv(fh, x, values):
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["x", "re", "im", "abs2"])
    for xi, v in zip(x, values):
        writer.writerow([repr(float(xi)), repr(float(v.real)), repr(float(v.imag)),
                         repr(float(abs(v) ** 2))])


def trapezoid(values, dx) -> complex:
    return dx * (np.sum(values) - 0.5 * (values[0] + values[-1]))


def norm(gs: GridState) -> float:
    """L2 norm by the trapezoid rule."""
    return math.sqrt(float(trapezoid(np.abs(gs.values) ** 2, gs.dx).real))


def hermite(n: int, x):
    """Physicists' Hermite polynomial H_n(x) by the three-term recurrence."""
    if n < 0 or n > MAX_N:
        raise ValueError(f"n must lie in [0, {MAX_N}]")
    x = np.asarray(x, dtype=float)
    h_prev, h = np.ones_like(x), 2.0 * x
    if n == 0:
        return h_prev if h_prev.ndim else float(h_prev)
    for k in range(1, n):
        h_prev, h = h, 2.0 * x * h - 2.0 * k * h_prev
    return h if h.ndim else float(h)


def hermite_function(n: int, xi):
    """H_n(xi) exp(-xi^2/2) / sqrt(2^n n! sqrt(pi)).

    Evaluated by the normalized recurrence, i.e. with the factorial and the
    power of two folded into the recursion coefficients, so neither the
    polynomial nor the normalization overflows.
    """
    xi = np.asarray(xi, dtype=float)
    h_prev = np.pi ** -0.25 * np.exp(-0.5 * xi * xi)
    if n == 0:
        return h_prev
    h = math.sqrt(2.0) * xi * h_prev
    for k in range(1, n):
        h_prev, h = h, math.sqrt(2.0 / (k + 1)) * xi * h - math.sqrt(k / (k + 1)) * h_prev
    return h


def oscillator_state(n: int, kp: KernelParameters, x):
    """Six-parameter oscillator wave function psi_n(x) for parameters ``kp``.

    psi_n = exp(i(alpha x^2 + delta x + kappa) + i(2n+1) gamma) / sqrt(mu)
            * h_n(beta x + epsilon), with h_n the normalized Hermite function.

    Raises
    ------
    OverflowGuard
        If ``n`` exceeds the supported range.
    DomainError
        If mu <= 0 or beta == 0.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    if n > MAX_N:
        raise OverflowGuard(f"n={n} exceeds the supported maximum {MAX_N}")
    if not kp.mu > 0:
        raise DomainError(f"mu must be positive, got {kp.mu}")
    if kp.beta == 0:
        raise DomainError("beta must be nonzero")
    x = np.asarray(x, dtype=float)
    phase = kp.alpha * x * x + kp.delta * x + kp.kappa + (2 * n + 1) * kp.gamma
    return np.exp(1j * phase) / math.sqrt(kp.mu) * hermite_function(n, kp.beta * x + kp.epsilon)


def green_function(fp: FundamentalPoint, x, y):
    """Propagator G(x, y, t) from the fundamental solution at time ``fp.t``.

    The prefactor is 1/sqrt(2 pi i mu0) with the principal square root.
    """
    if fp.mu0 == 0:
        raise SingularTime(f"mu0 vanishes at t={fp.t}")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    phase = (fp.alpha * x * x + fp.beta * x * y + fp.gamma * y * y
             + fp.delta * x + fp.epsilon * y + fp.kappa)
    return np.exp(1j * phase) / np.sqrt(2j * np.pi * fp.mu0)


def propagate(fp: FundamentalPoint, initial: GridState, target_x, chunk: int = 512) -> GridState:
    """psi(x, t) = int G(x, y, t) psi(y, 0) dy by the trapezoid rule over the initial grid."""
    vals = initial.values
    edge = max(abs(vals[0]), abs(vals[-1]))
    if edge >= EDGE_DECAY:
        warnings.warn(f"initial data is {edge:.3g} at the grid edges; the integral is truncated",
                      TruncationWarning, stacklevel=2)
    y = initial.x
    w = np.full(y.size, initial.dx)
    w[[0, -1]] *= 0.5
    weighted = w * vals
    target_x = np.asarray(target_x, dtype=float)
    out = np.empty(target_x.size, dtype=complex)
    for i in range(0, target_x.size, chunk):
        xs = target_x[i:i + chunk]
        out[i:i + chunk] = green_function(fp, xs[:, None], y[None, :]) @ weighted
    step = float(target_x[1] - target_x[0]) if target_x.size > 1 else initial.dx
    return GridState(float(target_x[0]), step, out, fp.t)


# -- finite differences -------------------------------------------------------

_D1_CENTRAL = np.array([1, -8, 0, 8, -1]) / 12.0
_D2_CENTRAL = np.array([-1, 16, -30, 16, -1]) / 12.0
# 4th-order one-sided stencils (5 points starting at the boundary).
_D1_LEFT = [np.array([-25, 48, -36, 16, -3]) / 12.0,
            np.array([-3, -10, 18, -6, 1]) / 12.0]
_D2_LEFT = [np.array([45, -154, 214, -156, 61, -10]) / 12.0,
            np.array([10, -15, -4, 14, -6, 1]) / 12.0]


def _apply_stencil(v, central, left, order, dx):
    out = np.empty_like(v)
    n = v.size
    out[2:-2] = sum(c * v[k:n - 4 + k] for k, c in enumerate(central))
    for i, st in enumerate(left):
        m = st.size
        out[i] = st @ v[:m]
        # mirror for the right edge; odd derivatives flip sign
        out[n - 1 - i] = (-1) ** order * (st @ v[::-1][:m])
    return out / dx**order


def derivative(values, dx):
    """First derivative, 4th order (one-sided at the two outermost points)."""
    return _apply_stencil(np.asarray(values), _D1_CENTRAL, _D1_LEFT, 1, dx)


def second_derivative(values, dx):
    """Second derivative, 4th order (one-sided at the two outermost points)."""
    return _apply_stencil(np.asarray(values), _D2_CENTRAL, _D2_LEFT, 2, dx)


def invariant_apply(kp: KernelParameters, lam: float, gs: GridState) -> GridState:
    """Apply the quadratic dynamic invariant

        E = (lam / 2) [ (p - 2 alpha x - delta)^2 / beta^2 + (beta x + epsilon)^2 ],

    with p = -i d/dx realized by 4th-order finite differences.
    """
    if kp.beta == 0:
        raise DomainError("beta must be nonzero")
    x, psi = gs.x, gs.values
    shift = 2.0 * kp.alpha * x + kp.delta
    d1 = derivative(psi, gs.dx)
    d2 = second_derivative(psi, gs.dx)
    # (p - A)^2 psi = -psi'' + 2iA psi' + iA' psi + A^2 psi, with A' = 2 alpha
    kinetic = -d2 + 2j * shift * d1 + 2j * kp.alpha * psi + shift**2 * psi
    potential = (kp.beta * x + kp.epsilon) ** 2 * psi
    return gs.with_values(0.5 * lam * (kinetic / kp.beta**2 + potential))


def expectation(kp: KernelParameters, lam: float, gs: GridState, normalized: bool = False) -> float:
    """Real part of <psi|E|psi>, divided by <psi|psi> when ``normalized``.

    The unnormalized value is the conserved one for any solution psi; with a
    nontrivial gauge factor the norm itself drifts.
    """
    e_psi = invariant_apply(kp, lam, gs).values
    num = trapezoid(np.conj(gs.values) * e_psi, gs.dx)
    if not normalized:
        return float(num.real)
    den = trapezoid(np.abs(gs.values) ** 2, gs.dx)
    return float((num / den).real)
