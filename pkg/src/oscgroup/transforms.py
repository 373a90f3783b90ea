"""Solution-space maps realized as point transformations.

Every element acts as

    psi(x, t) = P(x, t) * chi(xi(x, t), tau(t)),

where ``chi`` solves the element's *target* equation and ``psi`` solves
its *source* equation (the element transforms the source equation into the
target one). Elements are closures over their parameters; composition and
inversion are functional, and group laws are checked numerically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .coefficients import CoefficientSet, preset
from .errors import ContextMismatch, NotInvertible, OscGroupError, SingularTime

FREE = preset("free")
OSCILLATOR = preset("oscillator")
MARGIN = 0.9
_INF = math.inf


@dataclass(frozen=True, eq=False)
class TransformElement:
    """An invertible map between solution spaces.

    Attributes
    ----------
    kind : str
        ``ansatz``, ``galilei``, ``dilatation``, ``expansion``,
        ``expansion_singular``, ``osc_to_free``, ``free_to_osc``,
        ``osc_reflection``, ``identity``, ``ansatz_inverse`` or ``composite``.
    params : dict
        Parameters of the element (V, x0, t0, l, m, ...).
    source, target : CoefficientSet
        Equation solved by the output ``psi`` and by the input ``chi``.
    validity : tuple
        Open time interval on which the element is defined.
    pointmap : callable
        ``(x, t) -> (prefactor, xi, tau)``.
    parts : tuple
        For composites, ``(t1, t2)`` as passed to :func:`compose`.
    """

    kind: str
    params: dict
    source: CoefficientSet
    target: CoefficientSet
    validity: tuple
    pointmap: object = field(repr=False)
    parts: tuple = ()

    def check_time(self, t):
        lo, hi = self.validity
        if not lo < t < hi:
            raise SingularTime(f"{self.kind}: t={t} outside the validity interval ({lo}, {hi})")

    def __call__(self, chi):
        """Return ``psi`` as a callable ``psi(x, t)``."""
        return lambda x, t: apply(self, chi, x, t)


def apply(te: TransformElement, chi, x, t):
    """Evaluate the transformed solution psi(x, t) = P chi(xi, tau).

    Raises
    ------
    SingularTime
        If ``t`` lies outside the element's validity interval.
    """
    te.check_time(t)
    pre, xi, tau = te.pointmap(np.asarray(x, dtype=float), float(t))
    return pre * chi(xi, tau)


def named_equation(cs: CoefficientSet):
    """``"free"``, ``"oscillator"`` or ``None`` for the equation of ``cs``."""
    for name, ref in (("free", FREE), ("oscillator", OSCILLATOR)):
        if cs.same_equation(ref):
            return name
    return None


def _symmetric_validity(half_width):
    return (-MARGIN * half_width, MARGIN * half_width)


# -- primitives ---------------------------------------------------------------


def identity(context: CoefficientSet = FREE) -> TransformElement:
    return TransformElement("identity", {}, context, context, (-_INF, _INF),
                            lambda x, t: (1.0, x, t))


def galilei(V: float, x0: float = 0.0, t0: float = 0.0, phase: float = 0.0) -> TransformElement:
    """Galilei boost, space and time translation of the free particle.

    psi(x, t) = exp[i(V x / 2 - V^2 t / 4 + phase)] chi(x - V t + x0, t - t0).
    """
    def pointmap(x, t):
        pre = np.exp(1j * (0.5 * V * x - 0.25 * V * V * t + phase))
        return pre, x - V * t + x0, t - t0

    params = dict(V=V, x0=x0, t0=t0, phase=phase)
    return TransformElement("galilei", params, FREE, FREE, (-_INF, _INF), pointmap)


def dilatation(l: float) -> TransformElement:
    """psi(x, t) = chi(l x, l^2 t)."""
    if l == 0:
        raise ValueError("dilatation factor must be nonzero")
    return TransformElement("dilatation", dict(l=l), FREE, FREE, (-_INF, _INF),
                            lambda x, t: (1.0, l * x, l * l * t))


def expansion(m: float) -> TransformElement:
    """psi = (1+mt)^(-1/2) exp(i m x^2 / (4(1+mt))) chi(x/(1+mt), t/(1+mt))."""
    def pointmap(x, t):
        D = 1.0 + m * t
        if D <= 0:
            raise SingularTime(f"1 + m t = {D} at t={t}")
        return D ** -0.5 * np.exp(1j * m * x * x / (4.0 * D)), x / D, t / D

    if m > 0:
        validity = (-MARGIN / m, _INF)
    elif m < 0:
        validity = (-_INF, -MARGIN / m)
    else:
        validity = (-_INF, _INF)
    return TransformElement("expansion", dict(m=m), FREE, FREE, validity, pointmap)


def expansion_singular() -> TransformElement:
    """psi = (2t)^(-1/2) exp(i x^2 / (4t)) chi(-x/(2t), -1/(4t)), defined for t > 0."""
    def pointmap(x, t):
        return (2.0 * t) ** -0.5 * np.exp(1j * x * x / (4.0 * t)), -x / (2.0 * t), -0.25 / t

    return TransformElement("expansion_singular", {}, FREE, FREE, (0.0, _INF), pointmap)


def osc_to_free() -> TransformElement:
    """Oscillator solutions from free ones, valid for |t| < pi/4.

    psi(x, t) = exp(-(i/2) x^2 tan 2t) / sqrt(cos 2t) chi(x / cos 2t, tan(2t) / 2).
    """
    def pointmap(x, t):
        c, tn = math.cos(2 * t), math.tan(2 * t)
        return np.exp(-0.5j * x * x * tn) / math.sqrt(c), x / c, 0.5 * tn

    return TransformElement("osc_to_free", {}, OSCILLATOR, FREE,
                            _symmetric_validity(math.pi / 4), pointmap)


def free_to_osc() -> TransformElement:
    """Free-particle solutions from oscillator ones, valid for all t.

    psi(x, t) = (4t^2+1)^(-1/4) exp(i t x^2 / (4t^2+1)) chi(x / sqrt(4t^2+1), arctan(2t) / 2).
    """
    def pointmap(x, t):
        q = 4.0 * t * t + 1.0
        return q ** -0.25 * np.exp(1j * t * x * x / q), x / math.sqrt(q), 0.5 * math.atan(2 * t)

    return TransformElement("free_to_osc", {}, FREE, OSCILLATOR, (-_INF, _INF), pointmap)


def osc_reflection(shift: float = math.pi / 4) -> TransformElement:
    """psi(x, t) = chi(-x, t - shift) for the unit oscillator."""
    return TransformElement("osc_reflection", dict(shift=shift), OSCILLATOR, OSCILLATOR,
                            (-_INF, _INF), lambda x, t: (1.0, -x, t - shift))


def ansatz(cs: CoefficientSet, trajectory, validity=None) -> TransformElement:
    """The general substitution for ``cs`` along a parameter trajectory.

    ``trajectory(t)`` must return :class:`~oscgroup.kernel.KernelParameters`
    solving the parameter system for ``cs`` (with ``cs.c0``); the element
    maps solutions of the free (c0 = 0) or unit-oscillator (c0 = 1)
    equation to solutions of ``cs``.
    """
    def pointmap(x, t):
        p = trajectory(t)
        if not p.mu > 0 or p.beta == 0:
            raise SingularTime(f"mu={p.mu}, beta={p.beta} at t={t}")
        pre = np.exp(1j * (p.alpha * x * x + p.delta * x + p.kappa)) / math.sqrt(p.mu)
        return pre, p.beta * x + p.epsilon, -p.gamma

    if validity is None:
        validity = cs.domain
    target = OSCILLATOR if cs.c0 == 1 else FREE
    return TransformElement("ansatz", dict(trajectory=trajectory), cs, target,
                            tuple(validity), pointmap)


# -- composition and inversion ------------------------------------------------


def compose(t1: TransformElement, t2: TransformElement) -> TransformElement:
    """Chain ``t2`` (source -> intermediate) with ``t1`` (intermediate -> target).

    ``apply(compose(t1, t2), chi) == apply(t2, apply(t1, chi))``: ``chi``
    solves ``t1.target`` and the result solves ``t2.source``.

    Raises
    ------
    ContextMismatch
        If ``t2.target`` and ``t1.source`` are different equations.
    """
    if not t2.target.same_equation(t1.source):
        raise ContextMismatch(f"cannot chain {t2.kind} (into {t2.target.equation()}) "
                              f"with {t1.kind} (from {t1.source.equation()})")

    def pointmap(x, t):
        p2, xi2, tau2 = t2.pointmap(x, t)
        t1.check_time(tau2)
        p1, xi1, tau1 = t1.pointmap(xi2, tau2)
        return p2 * p1, xi1, tau1

    return TransformElement("composite", {}, t2.source, t1.target, t2.validity, pointmap,
                            parts=(t1, t2))


def conjugate(t0: TransformElement, s: TransformElement) -> TransformElement:
    """S^-1 T0 S: carries a symmetry ``t0`` of ``s.target`` to a symmetry of ``s.source``."""
    return compose(invert(s), compose(t0, s))


SCAN_STEP = 0.05


def _regular_end(trajectory, limit):
    """Last scan point from 0 toward ``limit`` with an evaluable trajectory and mu > 0."""
    good = 0.0
    n = max(1, int(math.ceil(abs(limit) / SCAN_STEP)))
    for k in range(1, n + 1):
        t = limit * k / n
        try:
            p = trajectory(t)
        except (OscGroupError, ArithmeticError):
            break
        if not p.mu > 0 or p.beta == 0:
            break
        good = t
    return good


def _ansatz_inverse(te: TransformElement) -> TransformElement:
    trajectory = te.params["trajectory"]
    lo, hi = te.validity
    lo = max(lo, te.source.domain[0])
    hi = min(hi, te.source.domain[1])
    # keep the bracket on the regular interval around t = 0, clear of the domain ends
    lo_t = MARGIN * _regular_end(trajectory, lo)
    hi_t = MARGIN * _regular_end(trajectory, hi)
    if lo_t == hi_t:
        raise NotInvertible("the ansatz is not regular on any interval around t = 0")
    tau_lo, tau_hi = -trajectory(lo_t).gamma, -trajectory(hi_t).gamma
    if tau_lo > tau_hi:
        tau_lo, tau_hi = tau_hi, tau_lo

    def time_of(tau):
        # -gamma is strictly monotone when a keeps its sign
        return brentq(lambda s: -trajectory(s).gamma - tau, lo_t, hi_t, xtol=1e-15, rtol=1e-15)

    def pointmap(xi, tau):
        t = time_of(tau)
        p = trajectory(t)
        x = (xi - p.epsilon) / p.beta
        pre = math.sqrt(p.mu) * np.exp(-1j * (p.alpha * x * x + p.delta * x + p.kappa))
        return pre, x, t

    return TransformElement("ansatz_inverse", dict(of=te), te.target, te.source,
                            (tau_lo, tau_hi), pointmap)


def invert(te: TransformElement) -> TransformElement:
    """Closed-form (local) inverse of an element.

    Raises
    ------
    NotInvertible
        For the singular expansion and composites containing it.
    """
    k, p = te.kind, te.params
    if k == "identity":
        return te
    if k == "galilei":
        V, x0, t0, phase = p["V"], p["x0"], p["t0"], p["phase"]
        return galilei(-V, V * t0 - x0, -t0, 0.5 * V * x0 - 0.25 * V * V * t0 - phase)
    if k == "dilatation":
        return dilatation(1.0 / p["l"])
    if k == "expansion":
        return expansion(-p["m"])
    if k == "osc_to_free":
        return free_to_osc()
    if k == "free_to_osc":
        return osc_to_free()
    if k == "osc_reflection":
        return osc_reflection(-p["shift"])
    if k == "ansatz":
        return _ansatz_inverse(te)
    if k == "ansatz_inverse":
        return p["of"]
    if k == "composite":
        t1, t2 = te.parts
        return compose(invert(t2), invert(t1))
    raise NotInvertible(f"{k} has no inverse continuous at the identity")


PRIMITIVES = {
    "galilei": galilei,
    "dilatation": dilatation,
    "expansion": expansion,
    "expansion_singular": expansion_singular,
    "osc_to_free": osc_to_free,
    "free_to_osc": free_to_osc,
    "osc_reflection": osc_reflection,
}
