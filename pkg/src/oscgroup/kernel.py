"""Parameter flows of the substitution

    psi = exp(i(alpha x^2 + delta x + kappa)) / sqrt(mu) * chi(beta x + epsilon, -gamma)

which maps the quadratic Schrödinger equation onto ``i chi_tau = -chi_xixi + c0 xi^2 chi``.

The module evaluates the fundamental solution built from the standard
characteristic solutions, the general solution of the parameter system for
arbitrary initial data (Riccati type for c0 = 0, Ermakov type for c0 = 1),
the explicit closed forms for the free particle and unit oscillator, and
finite-difference residuals of the parameter system itself.
"""

from __future__ import annotations

import math
from dataclasses import astuple, dataclass, replace

import numpy as np

from . import quadrature
from .characteristic import CharacteristicData, solve_characteristic
from .coefficients import CoefficientSet, lambda_factor, tau_sigma
from .errors import DomainError, QuadratureError, SingularTime

QUAD_TOL = 1e-9
FD_STEP = 1e-3
T_EPS = 1e-12
CAUSTIC_TOL = 1e-10
# 6th-order central first-derivative stencil.
_FD_OFFSETS = np.array([-3, -2, -1, 1, 2, 3])
_FD_WEIGHTS = np.array([-1, 9, -45, 45, -9, 1]) / 60.0

CASES = ("free_to_free", "osc_to_free", "free_to_osc", "osc_to_osc")


@dataclass(frozen=True)
class KernelParameters:
    """One point (mu, alpha, beta, gamma, delta, epsilon, kappa) at time ``t``."""

    mu: float
    alpha: float
    beta: float
    gamma: float
    delta: float
    epsilon: float
    kappa: float
    t: float = 0.0

    NAMES = ("mu", "alpha", "beta", "gamma", "delta", "epsilon", "kappa")

    def values(self) -> np.ndarray:
        return np.array(astuple(self)[:7])

    @classmethod
    def from_values(cls, values, t=0.0):
        return cls(*(float(v) for v in values), t=float(t))

    def at(self, t) -> "KernelParameters":
        return replace(self, t=float(t))


TRIVIAL = KernelParameters(1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0)


@dataclass(frozen=True)
class FundamentalPoint:
    """Fundamental solution (alpha0 ... kappa0) and lambda at one time."""

    t: float
    alpha: float
    beta: float
    gamma: float
    delta: float
    epsilon: float
    kappa: float
    lam: float
    mu0: float
    dmu0: float


class FundamentalSolution:
    """Evaluation handle for the fundamental solution over a :class:`CharacteristicData`.

    Calling the instance with a time returns a :class:`FundamentalPoint`.
    The driven parts delta0, epsilon0, kappa0 are nested quadratures of
    the standard solutions; they are skipped when f and g vanish
    identically.
    """

    def __init__(self, cd: CharacteristicData, quad_tol: float = QUAD_TOL):
        self.cd = cd
        self.cs = cd.cs
        self.quad_tol = quad_tol

    # -- vectorized building blocks ------------------------------------------

    def _lam(self, s):
        return lambda_factor(self.cs, s)

    def _forcing(self, s):
        fn = self.cs.fn
        return fn.f(s) - fn.d(s) * fn.g(s) / fn.a(s)

    def _delta_integrand(self, s):
        fn = self.cs.fn
        v = self.cd.evaluate(s)
        mu0, dmu0 = v[..., 0], v[..., 1]
        return (self._forcing(s) * mu0 + fn.g(s) / (2.0 * fn.a(s)) * dmu0) / self._lam(s)

    def _mu0_delta0(self, s):
        # mu0(s) * delta0(s) = lambda(s) * int_0^s (delta integrand)
        return self._lam(s) * quadrature.cumulative(self._delta_integrand, s, self.quad_tol)

    def _epsilon_integrand(self, s):
        fn = self.cs.fn
        a = fn.a(s)
        dmu0 = self.cd.dmu0(s)
        lam = self._lam(s)
        sigma = tau_sigma(self.cs, s)[1]
        return (8.0 * a * sigma * lam * self._mu0_delta0(s) / dmu0**2
                + 2.0 * a * lam * self._forcing(s) / dmu0)

    def _kappa_integrand(self, s):
        fn = self.cs.fn
        a = fn.a(s)
        dmu0 = self.cd.dmu0(s)
        sigma = tau_sigma(self.cs, s)[1]
        md = self._mu0_delta0(s)
        return (-4.0 * a * sigma * md**2 / dmu0**2
                - 2.0 * a * md * self._forcing(s) / dmu0)

    def _check_dmu0(self, t):
        nodes = self.cd.nodes
        inside = nodes[(nodes > min(0.0, t)) & (nodes < max(0.0, t))]
        vals = np.concatenate([[self.cd.dmu0(0.0)], self.cd.dmu0(inside), [self.cd.dmu0(t)]])
        if np.any(vals == 0.0) or np.any(np.sign(vals) != np.sign(vals[0])):
            raise QuadratureError(f"mu0' vanishes on [0, {t}]; driven terms are undefined")

    # -- public ------------------------------------------------------------------

    def __call__(self, t: float) -> FundamentalPoint:
        t = float(t)
        cs, cd = self.cs, self.cd
        fn = cs.fn
        mu0, dmu0, mu1 = (float(v) for v in cd.evaluate(t)[:3])
        # a simple zero of mu0 closer than CAUSTIC_TOL in time counts as a caustic
        if t == 0.0 or abs(mu0) <= CAUSTIC_TOL * abs(dmu0):
            raise SingularTime(f"mu0 vanishes at t={t} (caustic of the fundamental solution)")
        a, d = fn.a(t), fn.d(t)
        lam = self._lam(t)
        alpha0 = dmu0 / (4.0 * a * mu0) - d / (2.0 * a)
        beta0 = -lam / mu0
        gamma0 = mu1 / (2.0 * float(cd.mu1(0.0)) * mu0) + float(fn.d(0.0)) / (2.0 * cd.a0)
        delta0 = epsilon0 = kappa0 = 0.0
        if cs.driven:
            self._check_dmu0(t)
            md = float(self._mu0_delta0(np.array([t]))[0])
            delta0 = md / mu0
            epsilon0 = float(-2.0 * a * lam * delta0 / dmu0
                             + quadrature.quad(self._epsilon_integrand, 0.0, t, self.quad_tol))
            kappa0 = float(a * mu0 * delta0**2 / dmu0
                           + quadrature.quad(self._kappa_integrand, 0.0, t, self.quad_tol))
        return FundamentalPoint(t, alpha0, beta0, gamma0, delta0, epsilon0, kappa0, lam, mu0, dmu0)

    def branch_angle(self, init: KernelParameters, t: float) -> float:
        """Continuous angle of (2(alpha(0)+gamma0) mu0, beta(0)^2 mu0) from 0 to ``t``.

        Both components are smooth through the zeros of mu0 and never
        vanish together, so the angle is tracked by unwrapping along the
        dense-output nodes between 0 and ``t``. It starts at 0 for t = 0.
        """
        cd = self.cd
        nodes = cd.nodes
        if t >= 0:
            path = np.concatenate([nodes[(nodes > 0) & (nodes < t)], [t]])
        else:
            path = np.concatenate([nodes[(nodes < 0) & (nodes > t)][::-1], [t]])
        v = cd.evaluate(path)
        mu0, mu1 = v[:, 0], v[:, 2]
        d0_a0 = float(self.cs.fn.d(0.0)) / cd.a0
        x = 2.0 * init.alpha * mu0 + mu1 / float(cd.mu1(0.0)) + d0_a0 * mu0
        y = init.beta**2 * mu0
        theta = np.unwrap(np.concatenate([[0.0], np.arctan2(y, x)]))
        return float(theta[-1])


def fundamental_solution(cd: CharacteristicData, t: float) -> FundamentalPoint:
    """Fundamental solution at a single time ``t`` (convenience wrapper)."""
    return FundamentalSolution(cd)(t)


def _check_init(init):
    if init.beta == 0.0:
        raise ValueError("beta(0) must be nonzero")


def riccati_general(fs: FundamentalSolution, init: KernelParameters, t: float) -> KernelParameters:
    """General solution of the Riccati-type system (c0 = 0) for initial data ``init``.

    Raises
    ------
    SingularTime
        If alpha(0) + gamma0(t) vanishes (mu(t) = 0) or mu0(t) = 0.
    """
    _check_init(init)
    if abs(t) < T_EPS:
        # 0/0 limit of the closed forms; the error is O(T_EPS)
        return init.at(t)
    p = fs(t)
    A = init.alpha + p.gamma
    # 2 mu0 A is smooth in t; A itself blows up at the zeros of mu0.
    if not math.isfinite(A) or abs(2.0 * p.mu0 * A) < 1e-12:
        raise SingularTime(f"alpha(0) + gamma0 vanishes at t={t}")
    shift = init.delta + p.epsilon
    mu = 2.0 * init.mu * p.mu0 * A
    if mu == 0.0:
        raise SingularTime(f"mu vanishes at t={t}")
    return KernelParameters(
        mu=mu,
        alpha=p.alpha - p.beta**2 / (4.0 * A),
        beta=-init.beta * p.beta / (2.0 * A),
        gamma=init.gamma - init.beta**2 / (4.0 * A),
        delta=p.delta - p.beta * shift / (2.0 * A),
        epsilon=init.epsilon - init.beta * shift / (2.0 * A),
        kappa=init.kappa + p.kappa - shift**2 / (4.0 * A),
        t=t,
    )


def ermakov_general(fs: FundamentalSolution, init: KernelParameters, t: float) -> KernelParameters:
    """General solution of the Ermakov-type system (c0 = 1) for initial data ``init``.

    The square root sqrt(beta(0)^4 + 4(alpha(0) + gamma0)^2) carries the
    sign of mu0, and the arctan in gamma is continued along t; both agree
    with the principal-branch formulas while mu0 > 0 and keep the solution
    smooth for negative times and past the zeros of mu0.

    Raises
    ------
    DomainError
        If a(0) <= 0.
    SingularTime
        If mu0(t) = 0 or the resulting mu vanishes.
    """
    _check_init(init)
    if fs.cd.a0 <= 0:
        raise DomainError("the Ermakov-type solution requires a(0) > 0")
    if abs(t) < T_EPS:
        # 0/0 limit of the closed forms; the error is O(T_EPS)
        return init.at(t)
    p = fs(t)
    b2 = init.beta**2
    A = init.alpha + p.gamma
    Q = b2 * b2 + 4.0 * A * A
    # R = |mu0| sqrt(Q) computed from smooth factors; S = R / mu0 is the signed root.
    R = math.hypot(b2 * p.mu0, 2.0 * A * p.mu0)
    S = R / p.mu0
    shift = init.delta + p.epsilon
    mu = init.mu * R
    if mu == 0.0:
        raise SingularTime(f"mu vanishes at t={t}")
    theta = fs.branch_angle(init, t)
    return KernelParameters(
        mu=mu,
        alpha=p.alpha - p.beta**2 * A / Q,
        beta=-init.beta * p.beta / S,
        gamma=init.gamma - 0.5 * theta,
        delta=p.delta - p.beta * (init.epsilon * init.beta**3 + 2.0 * A * shift) / Q,
        epsilon=(2.0 * init.epsilon * A - init.beta * shift) / S,
        kappa=(init.kappa + p.kappa
               - init.epsilon * init.beta**3 * shift / Q
               + A * (init.epsilon**2 * b2 - shift**2) / Q),
        t=t,
    )


def general_solution(cs: CoefficientSet, init: KernelParameters, fs: FundamentalSolution = None):
    """Trajectory ``t -> KernelParameters`` for ``cs`` (Riccati or Ermakov type by ``cs.c0``)."""
    if fs is None:
        fs = FundamentalSolution(solve_characteristic(cs))
    solver = ermakov_general if cs.c0 == 1 else riccati_general
    return lambda t: solver(fs, init, t)


def closed_form_params(case: str, init: KernelParameters, t: float) -> KernelParameters:
    """Explicit parameter flows for the free particle and the unit oscillator.

    ``free_to_free`` and ``osc_to_free`` are Riccati-type (c0 = 0) on the
    free and oscillator equations; ``free_to_osc`` and ``osc_to_osc`` are
    Ermakov-type (c0 = 1). Arctangents are continued continuously in t.

    Raises
    ------
    SingularTime
        On a vanishing denominator of the Riccati-type cases.
    """
    m0, a0, b0, g0, d0, e0, k0 = init.values()
    t = float(t)
    if case == "free_to_free":
        D = 1.0 + 4.0 * a0 * t
        if abs(D) < 1e-12:
            raise SingularTime(f"1 + 4 alpha(0) t vanishes at t={t}")
        vals = (m0 * D, a0 / D, b0 / D, g0 - b0**2 * t / D, d0 / D,
                e0 - 2.0 * b0 * d0 * t / D, k0 - d0**2 * t / D)
    elif case == "osc_to_free":
        s, c = math.sin(2 * t), math.cos(2 * t)
        D = 2.0 * a0 * s + c
        if abs(D) < 1e-12:
            raise SingularTime(f"2 alpha(0) sin 2t + cos 2t vanishes at t={t}")
        vals = (m0 * D, (2.0 * a0 * c - s) / (2.0 * D), b0 / D,
                g0 - b0**2 * s / (2.0 * D), d0 / D,
                e0 - b0 * d0 * s / D, k0 - d0**2 * s / (2.0 * D))
    elif case == "free_to_osc":
        P = 4.0 * a0 * t + 1.0
        Q = 4.0 * b0**4 * t * t + P * P
        rQ = math.sqrt(Q)
        vals = (m0 * rQ, (b0**4 * t + a0 * P) / Q, b0 / rQ,
                g0 - 0.5 * math.atan2(2.0 * b0**2 * t, P),
                (2.0 * e0 * b0**3 * t + d0 * P) / Q,
                (e0 * P - 2.0 * b0 * d0 * t) / rQ,
                k0 + t * P * (e0**2 * b0**2 - d0**2) / Q - t * t * 4.0 * e0 * d0 * b0**3 / Q)
    elif case == "osc_to_osc":
        s, c = math.sin(2 * t), math.cos(2 * t)
        P = 2.0 * a0 * s + c
        Q = b0**4 * s * s + P * P
        rQ = math.sqrt(Q)
        theta = math.atan2(b0**2 * s, P)
        theta += 2.0 * math.pi * round((2.0 * t - theta) / (2.0 * math.pi))
        vals = (m0 * rQ,
                (a0 * math.cos(4 * t) + math.sin(4 * t) * (b0**4 + 4.0 * a0**2 - 1.0) / 4.0) / Q,
                b0 / rQ,
                g0 - 0.5 * theta,
                (d0 * P + e0 * b0**3 * s) / Q,
                (e0 * P - b0 * d0 * s) / rQ,
                k0 + s * s * (e0 * b0**2 * (a0 * e0 - b0 * d0) - a0 * d0**2) / Q
                + 0.25 * math.sin(4 * t) * (e0**2 * b0**2 - d0**2) / Q)
    else:
        raise ValueError(f"unknown case {case!r}; expected one of {CASES}")
    return KernelParameters.from_values(vals, t)


def _derivatives(trajectory, t, h):
    samples = np.array([trajectory(t + k * h).values() for k in _FD_OFFSETS])
    return _FD_WEIGHTS @ samples / h


def system_residual(cs: CoefficientSet, trajectory, t: float, h: float = FD_STEP) -> np.ndarray:
    """Absolute residuals of the six parameter equations at ``t``.

    ``trajectory`` maps a time to :class:`KernelParameters`; time
    derivatives use a 6th-order central stencil of step ``h``. The
    equations are taken with ``c0 = cs.c0``.
    """
    fn = cs.fn
    c0 = cs.c0
    a, b, c, f, g = fn.a(t), fn.b(t), fn.c(t), fn.f(t), fn.g(t)
    _, al, be, _, de, ep, _ = trajectory(t).values()
    dmu, dal, dbe, dga, dde, dep, dka = _derivatives(trajectory, t, h)
    del dmu
    return np.abs(np.array([
        dal + b + 2 * c * al + 4 * a * al**2 - c0 * a * be**4,
        dbe + (c + 4 * a * al) * be,
        dga + a * be**2,
        dde + (c + 4 * a * al) * de - f - 2 * g * al - 2 * c0 * a * be**3 * ep,
        dep - (g - 2 * a * de) * be,
        dka - g * de + a * de**2 - c0 * a * be**2 * ep**2,
    ]))


def alpha_link_residual(cs: CoefficientSet, trajectory, t: float, h: float = FD_STEP) -> float:
    """|mu'/mu - (4 a alpha + 2 d)| with mu' from the 6th-order stencil."""
    fn = cs.fn
    p = trajectory(t)
    dmu = _derivatives(trajectory, t, h)[0]
    return abs(dmu / p.mu - (4.0 * fn.a(t) * p.alpha + 2.0 * fn.d(t)))


__all__ = [
    "CASES", "TRIVIAL", "FundamentalPoint", "FundamentalSolution", "KernelParameters",
    "alpha_link_residual", "closed_form_params", "ermakov_general", "fundamental_solution",
    "general_solution", "riccati_general", "system_residual",
]
