"""Shared oracles and random generators for the test suite."""

import math

import numpy as np
from scipy.integrate import solve_ivp

from oscgroup.coefficients import CoefficientSet
from oscgroup.expr import Add, Call, Const, Div, Mul, Neg, Sub, T
from oscgroup.kernel import KernelParameters

GENERAL = dict(a="1 + 0.2*sin(t)", b="0.5 + 0.1*cos(2*t)", c="0.3*sin(t)", d="0.2 + 0.1*t",
               f="cos(t)", g="0.5*exp(-t)")


def general_set(c0=0):
    """A driven coefficient set with every coefficient time-dependent and nonzero."""
    return CoefficientSet.from_strings(c0=c0, domain=(-0.5, 1.5), **GENERAL)


def system_rhs(cs):
    """Right-hand side of the parameter system for (mu, alpha, ..., kappa)."""
    fn, c0 = cs.fn, cs.c0

    def rhs(t, y):
        mu, al, be, ga, de, ep, ka = y
        a, b, c, d, f, g = (fn.a(t), fn.b(t), fn.c(t), fn.d(t), fn.f(t), fn.g(t))
        return [
            (4 * a * al + 2 * d) * mu,
            -b - 2 * c * al - 4 * a * al**2 + c0 * a * be**4,
            -(c + 4 * a * al) * be,
            -a * be**2,
            -(c + 4 * a * al) * de + f + 2 * g * al + 2 * c0 * a * be**3 * ep,
            (g - 2 * a * de) * be,
            g * de - a * de**2 + c0 * a * be**2 * ep**2,
        ]
    return rhs


def rk_oracle(cs, init, times):
    """Direct DOP853 integration of the parameter system; rows follow ``times`` (all >= 0)."""
    times = np.atleast_1d(np.asarray(times, dtype=float))
    sol = solve_ivp(system_rhs(cs), (0.0, float(times.max())), init.values(), method="DOP853",
                    t_eval=times, rtol=1e-12, atol=1e-12)
    assert sol.success, sol.message
    return sol.y.T


def rel_dev(a, b):
    """Componentwise deviation |a - b| / max(1, |b|)."""
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    return np.abs(a - b) / np.maximum(1.0, np.abs(b))


def random_init(rng, wide=False):
    """Random initial data.

    ``wide``: |values| <= 2 with beta(0) in [0.2, 2] and mu(0) in (0, 2].
    Otherwise the admissible ranges that keep Hermite-Gauss states resolved
    on [-8, 8] with dx = 1/64.
    """
    if wide:
        v = rng.uniform(-2, 2, 7)
        v[0] = rng.uniform(0.05, 2)
        v[2] = rng.uniform(0.2, 2)
    else:
        v = np.array([rng.uniform(0.5, 2), rng.uniform(-0.5, 0.5), rng.uniform(0.7, 1.4),
                      rng.uniform(-2, 2), rng.uniform(-1, 1), rng.uniform(-1, 1),
                      rng.uniform(-2, 2)])
    return KernelParameters.from_values(v)


def random_expression(rng, depth=5):
    """Random tree of depth <= ``depth`` that is smooth and finite for t in [0.1, 2].

    Divisions, square roots, tangents and exponentials get guarded
    arguments (1 + u^2, 0.5 sin u, sin u) so the expression stays in its
    domain; everything else is unconstrained.
    """
    if depth <= 1 or rng.random() < 0.2:
        return T if rng.random() < 0.6 else Const(float(np.round(rng.uniform(-3, 3), 3)))
    kind = rng.choice(["add", "sub", "mul", "div", "neg", "sin", "cos", "tan", "exp", "sqrt"])
    u = random_expression(rng, depth - 1)
    if kind in ("add", "sub", "mul", "div"):
        v = random_expression(rng, depth - 1)
        if kind == "add":
            return Add(u, v)
        if kind == "sub":
            return Sub(u, v)
        if kind == "mul":
            return Mul(u, v)
        return Div(u, Add(Const(1.0), Mul(v, v)))
    if kind == "neg":
        return Neg(u)
    if kind in ("sin", "cos"):
        return Call(kind, u)
    if kind == "tan":
        return Call("tan", Mul(Const(0.5), Call("sin", u)))
    if kind == "exp":
        return Call("exp", Call("sin", u))
    return Call("sqrt", Add(Const(1.0), Mul(u, u)))


def central_difference(f, t, h=1e-5):
    return (f(t + h) - f(t - h)) / (2 * h)


PI = math.pi
