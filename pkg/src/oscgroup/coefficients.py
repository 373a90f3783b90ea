"""Coefficients of the quadratic Schrödinger equation

    i psi_t = -a psi_xx + b x^2 psi - i c x psi_x - i d psi - f x psi + i g psi_x

together with the characteristic coefficients tau, sigma and the gauge
factor lambda.
"""

from __future__ import annotations

import dataclasses
import re
from dataclasses import dataclass
from functools import cached_property
from types import SimpleNamespace

import numpy as np

from . import quadrature
from .errors import DomainError, ParseError
from .expr import ONE, ZERO, Node, compile_expr, differentiate, is_zero, parse

NAMES = ("a", "b", "c", "d", "f", "g")
DEFAULT_DOMAIN = (-2.0, 2.0)
LAMBDA_TOL = 1e-10


@dataclass(frozen=True)
class CoefficientSet:
    """The six time-dependent coefficients, the target flag ``c0`` and a time domain.

    ``c0 = 0`` maps the equation onto the free particle (Riccati-type
    parameter system), ``c0 = 1`` onto the unit oscillator (Ermakov-type).
    """

    a: Node = ONE
    b: Node = ZERO
    c: Node = ZERO
    d: Node = ZERO
    f: Node = ZERO
    g: Node = ZERO
    c0: int = 0
    domain: tuple = DEFAULT_DOMAIN

    def __post_init__(self):
        if self.c0 not in (0, 1):
            raise ValueError(f"c0 must be 0 or 1, got {self.c0!r}")
        lo, hi = (float(v) for v in self.domain)
        if not lo <= 0.0 <= hi:
            raise ValueError(f"domain {self.domain!r} must contain t=0")
        object.__setattr__(self, "domain", (lo, hi))

    @classmethod
    def from_strings(cls, c0=0, domain=DEFAULT_DOMAIN, **exprs):
        """Build from expression text, e.g. ``from_strings(a="1", b="cos(2*t)")``."""
        unknown = set(exprs) - set(NAMES)
        if unknown:
            raise ValueError(f"unknown coefficient(s): {sorted(unknown)}")
        nodes = {k: parse(v) if isinstance(v, str) else v for k, v in exprs.items()}
        return cls(c0=c0, domain=domain, **nodes)

    def replace(self, **changes) -> "CoefficientSet":
        return dataclasses.replace(self, **changes)

    def equation(self):
        """Identity of the Schrödinger equation itself (ignores c0 and domain)."""
        return tuple(getattr(self, k) for k in NAMES)

    def same_equation(self, other: "CoefficientSet") -> bool:
        return self.equation() == other.equation()

    @cached_property
    def fn(self):
        """Compiled callables for the coefficients and the derivatives of a and d."""
        ns = {k: compile_expr(getattr(self, k)) for k in NAMES}
        ns["da"] = compile_expr(differentiate(self.a))
        ns["dd"] = compile_expr(differentiate(self.d))
        return SimpleNamespace(**ns)

    @property
    def driven(self) -> bool:
        return not (is_zero(self.f) and is_zero(self.g))

    @property
    def gauge_trivial(self) -> bool:
        """True when c and d vanish identically, so that lambda == 1."""
        return is_zero(self.c) and is_zero(self.d)

    def contains(self, t) -> bool:
        lo, hi = self.domain
        return bool(np.all((lo <= np.asarray(t)) & (np.asarray(t) <= hi)))


def tau_sigma(cs: CoefficientSet, t):
    """Characteristic coefficients tau(t) and sigma(t).

    tau = a'/a - 2c + 4d and sigma = ab - cd + d^2 + (d/2)(a'/a - d'/d);
    the last term is dropped when d is identically zero. Works on scalars
    and on arrays of times.

    Raises
    ------
    DomainError
        If a(t) = 0, or d(t) = 0 for a d that is not identically zero.
    """
    fn = cs.fn
    a = fn.a(t)
    if np.any(a == 0):
        raise DomainError(f"a(t) vanishes at t={t!r}")
    a_log = fn.da(t) / a
    c = fn.c(t)
    d = fn.d(t)
    tau = a_log - 2.0 * c + 4.0 * d
    sigma = a * fn.b(t) - c * d + d * d
    if not is_zero(cs.d):
        if np.any(d == 0):
            raise DomainError(f"d(t) vanishes at t={t!r}; sigma contains d'/d")
        sigma = sigma + 0.5 * (d * a_log - fn.dd(t))
    return tau, sigma


def _gauge_rate(cs):
    fn = cs.fn
    return lambda s: fn.c(s) - 2.0 * fn.d(s)


def lambda_factor(cs: CoefficientSet, t, start=0.0, tol=LAMBDA_TOL):
    """Gauge factor exp(-int_start^t (c - 2d) ds).

    With the default ``start = 0`` this is lambda(t); lambda(0) is exactly 1.
    ``t`` may be an array, in which case one cumulative quadrature pass is
    used.

    Raises
    ------
    QuadratureError
        If the adaptive quadrature cannot reach ``tol``.
    """
    if cs.gauge_trivial:
        return np.ones(np.shape(t)) if np.ndim(t) else 1.0
    if np.ndim(t):
        return np.exp(-quadrature.cumulative(_gauge_rate(cs), t, tol, origin=start))
    return float(np.exp(-quadrature.quad(_gauge_rate(cs), start, float(t), tol)))


def tau_integral(cs: CoefficientSet, t, tol=LAMBDA_TOL):
    """int_0^t tau(s) ds (scalar or array ``t``)."""
    rate = lambda s: tau_sigma(cs, s)[0]  # noqa: E731
    if np.ndim(t):
        return quadrature.cumulative(rate, t, tol)
    return float(quadrature.quad(rate, 0.0, float(t), tol))


_DRIVEN = re.compile(r"^\s*driven\s*\((.*)\)\s*$", re.DOTALL)


def preset(name: str, f_expr=None, c0: int = 0, domain=DEFAULT_DOMAIN) -> CoefficientSet:
    """Named coefficient sets.

    ``free``: a = 1, all others 0. ``oscillator``: a = b = 1. ``driven``:
    the oscillator plus the forcing ``f = f_expr``; the string form
    ``"driven(sin(t))"`` is accepted as well.
    """
    m = _DRIVEN.match(name)
    if m:
        name, f_expr = "driven", m.group(1)
    if name == "free":
        return CoefficientSet(c0=c0, domain=domain)
    if name == "oscillator":
        return CoefficientSet(b=ONE, c0=c0, domain=domain)
    if name == "driven":
        if f_expr is None:
            raise ValueError("driven preset needs a forcing expression")
        f = parse(f_expr) if isinstance(f_expr, str) else f_expr
        return CoefficientSet(b=ONE, f=f, c0=c0, domain=domain)
    raise ParseError(f"unknown preset {name!r}", 0, "free, oscillator or driven(<expr>)")
