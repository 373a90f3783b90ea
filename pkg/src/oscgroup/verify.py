"""Numerical oracles and the scenario check suite.

The PDE residual of a sampled space-time block ``psi`` against

    i psi_t = -a psi_xx + b x^2 psi - i c x psi_x - i d psi - f x psi + i g psi_x

is measured as the relative L2 norm of

    R = i psi_t + a psi_xx - b x^2 psi + i c x psi_x + i d psi + f x psi - i g psi_x,

normalized by the L2 norm of i psi_t, with 4th-order central differences in x
and 2nd-order central differences in t.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .characteristic import solve_characteristic, wronskian_residual
from .coefficients import CoefficientSet, lambda_factor
from .errors import GridTooCoarse, OscGroupError
from .kernel import (TRIVIAL, FundamentalSolution, KernelParameters, alpha_link_residual,
                     closed_form_params, general_solution, system_residual)
from .scenario import Scenario, sample_times
from .states import (GridState, expectation, grid_points, invariant_apply, norm,
                     oscillator_state, propagate, second_derivative, derivative)
from .transforms import (FREE, OSCILLATOR, ansatz, apply, compose, conjugate, free_to_osc,
                         galilei, invert, named_equation, osc_to_free)

MIN_LEVELS = 5
MIN_POINTS = 9


# -- PDE residual -------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SpaceTimeBlock:
    """Samples ``values[k, j] = psi(x0 + j dx, t0 + k dt)``."""

    x0: float
    dx: float
    t0: float
    dt: float
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=complex))

    @property
    def x(self) -> np.ndarray:
        return self.x0 + self.dx * np.arange(self.values.shape[1])

    @property
    def t(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.values.shape[0])

    @classmethod
    def sample(cls, psi, grid, t_center: float, dt: float, levels: int = MIN_LEVELS):
        """Sample ``psi(x, t)`` on ``levels`` time levels centred at ``t_center``."""
        x = grid_points(*grid)
        half = (levels - 1) / 2.0
        ts = t_center + dt * (np.arange(levels) - half)
        values = np.array([psi(x, float(t)) for t in ts])
        return cls(float(x[0]), float(grid[2]), float(ts[0]), dt, values)


def pde_residual(cs: CoefficientSet, block: SpaceTimeBlock, interior: bool = True) -> float:
    """Relative L2 residual of ``block`` against the equation of ``cs``.

    With ``interior`` the residual is taken where both central stencils fit
    (all but the outer time level and two grid points on each side);
    otherwise one-sided stencils cover the whole block.

    Raises
    ------
    GridTooCoarse
        With fewer than 5 time levels or 9 space points.
    """
    psi = block.values
    if psi.ndim != 2 or psi.shape[0] < MIN_LEVELS or psi.shape[1] < MIN_POINTS:
        raise GridTooCoarse(f"need at least {MIN_LEVELS} time levels and {MIN_POINTS} points, "
                            f"got shape {psi.shape}")
    x, t, dx, dt = block.x, block.t, block.dx, block.dt
    psi_t = np.gradient(psi, dt, axis=0, edge_order=2)
    psi_x = np.array([derivative(row, dx) for row in psi])
    psi_xx = np.array([second_derivative(row, dx) for row in psi])
    fn = cs.fn
    a, b, c, d, f, g = (np.asarray(getattr(fn, k)(t))[:, None] for k in "abcdfg")
    res = (1j * psi_t + a * psi_xx - b * x**2 * psi + 1j * c * x * psi_x + 1j * d * psi
           + f * x * psi - 1j * g * psi_x)
    scale = 1j * psi_t
    if interior:
        res, scale = res[1:-1, 2:-2], scale[1:-1, 2:-2]
    denom = np.linalg.norm(scale)
    if denom == 0.0:
        return float(np.linalg.norm(res))
    return float(np.linalg.norm(res) / denom)


# -- reference solutions ------------------------------------------------------


def exact_solution(equation: str, n: int = 0, init: KernelParameters = TRIVIAL):
    """Closed-form Hermite-Gauss solution ``psi(x, t)`` of the free or unit-oscillator equation."""
    case = {"free": "free_to_osc", "oscillator": "osc_to_osc"}[equation]
    return lambda x, t: oscillator_state(n, closed_form_params(case, init, t), x)


def autonomous_solution(c0: int, n: int = 0, init: KernelParameters = TRIVIAL):
    """Solution of the equation an ansatz with this ``c0`` maps from."""
    return exact_solution("oscillator" if c0 == 1 else "free", n, init)


# -- suite --------------------------------------------------------------------


class NotApplicable(Exception):
    pass


@dataclass(frozen=True)
class CheckResult:
    name: str
    value: float
    threshold: float
    status: str  # pass | fail | skip
    message: str = ""

    @property
    def passed(self) -> bool:
        return self.status != "fail"


@dataclass(frozen=True)
class Report:
    results: tuple

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def to_csv(self) -> str:
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["check", "value", "threshold", "pass"])
        for r in self.results:
            status = {"pass": "true", "fail": "false"}.get(r.status, r.status)
            writer.writerow([r.name, repr(float(r.value)), repr(float(r.threshold)), status])
        return out.getvalue()

    def to_text(self) -> str:
        lines = []
        for r in self.results:
            line = (f"{r.status.upper():4}  {r.name:<20} value={r.value:.3e}  "
                    f"threshold={r.threshold:.1e}")
            if r.message:
                line += f"  ({r.message})"
            lines.append(line)
        n_fail = sum(r.status == "fail" for r in self.results)
        lines.append(f"{len(self.results)} checks, {n_fail} failed")
        return "\n".join(lines) + "\n"


_CLOSED_FORM_CASE = {("free", 0): "free_to_free", ("oscillator", 0): "osc_to_free",
                     ("free", 1): "free_to_osc", ("oscillator", 1): "osc_to_osc"}
N_STATES = 3


class _Context:
    """Lazily computed quantities shared between checks."""

    def __init__(self, scn: Scenario):
        self.scn = scn
        self.cs = scn.cs

    @cached_property
    def fs(self):
        return FundamentalSolution(solve_characteristic(self.cs))

    @cached_property
    def trajectory(self):
        return general_solution(self.cs, self.scn.init, self.fs)

    @cached_property
    def times(self):
        return sample_times(self.scn.t0, self.scn.t1, self.scn.step)

    @cached_property
    def probe_times(self):
        # first, middle and last sample: enough for the expensive grid checks
        ts = self.times
        return sorted({ts[0], ts[len(ts) // 2], ts[-1]})

    @cached_property
    def x(self):
        return grid_points(*self.scn.grid)

    @cached_property
    def transform(self):
        return ansatz(self.cs, self.trajectory)

    def image(self, n, chi_init=TRIVIAL):
        chi = autonomous_solution(self.cs.c0, n, chi_init)
        te = self.transform
        return lambda x, t: apply(te, chi, x, t)

    def state(self, psi, t):
        return GridState(float(self.x[0]), self.scn.grid[2], psi(self.x, t), t)

    def block(self, psi, t):
        return SpaceTimeBlock.sample(psi, self.scn.grid, t, self.scn.dt)


def _rel(a, b):
    return np.max(np.abs(np.asarray(a) - np.asarray(b)) / np.maximum(1.0, np.abs(b)))


def _check_wronskian(ctx):
    cd = solve_characteristic(ctx.cs)
    return max(float(wronskian_residual(cd, t)) for t in ctx.times)


def _check_gauge(ctx):
    p0 = ctx.scn.init
    worst = 0.0
    for t in ctx.times:
        p = ctx.trajectory(t)
        expected = p0.beta * p0.mu * lambda_factor(ctx.cs, t)
        worst = max(worst, abs(p.beta * p.mu - expected) / max(1.0, abs(expected)))
    return worst


def _check_system_residual(ctx):
    return max(float(np.max(system_residual(ctx.cs, ctx.trajectory, t))) for t in ctx.times)


def _check_alpha_link(ctx):
    return max(alpha_link_residual(ctx.cs, ctx.trajectory, t) for t in ctx.times)


def _check_closed_form(ctx):
    base = named_equation(ctx.cs)
    if base is None:
        raise NotApplicable("no closed form for these coefficients")
    case = _CLOSED_FORM_CASE[base, ctx.cs.c0]
    return max(float(_rel(ctx.trajectory(t).values(),
                          closed_form_params(case, ctx.scn.init, t).values()))
               for t in ctx.times)


def _check_pde_residual(ctx):
    return max(pde_residual(ctx.cs, ctx.block(ctx.image(n), t))
               for n in range(N_STATES) for t in ctx.probe_times)


def _require_ermakov(ctx):
    if ctx.cs.c0 != 1:
        raise NotApplicable("needs c0 = 1")


def _check_eigen(ctx):
    _require_ermakov(ctx)
    worst = 0.0
    for t in ctx.probe_times:
        kp, lam = ctx.trajectory(t), lambda_factor(ctx.cs, t)
        for n in range(N_STATES):
            gs = GridState(float(ctx.x[0]), ctx.scn.grid[2], oscillator_state(n, kp, ctx.x), t)
            diff = invariant_apply(kp, lam, gs).values - (n + 0.5) * lam * gs.values
            worst = max(worst, norm(gs.with_values(diff)) / norm(gs))
    return worst


# a displaced, squeezed state of the autonomous equation (not an eigenstate)
_MIXED_INIT = KernelParameters(1.0, 0.2, 1.1, 0.0, 0.3, 0.4, 0.0)


def _check_invariant(ctx):
    _require_ermakov(ctx)
    psi = ctx.image(0, _MIXED_INIT)
    values = [expectation(ctx.trajectory(t), lambda_factor(ctx.cs, t), ctx.state(psi, t))
              for t in ctx.probe_times]
    return max(values) - min(values)


def _check_norm(ctx):
    psi = ctx.image(0, _MIXED_INIT)
    values = []
    for t in ctx.probe_times:
        p = ctx.trajectory(t)
        values.append(norm(ctx.state(psi, t)) ** 2 * p.mu * abs(p.beta))
    return max(values) - min(values)


def _check_propagator(ctx):
    psi = ctx.image(1, _MIXED_INIT)
    initial = ctx.state(psi, 0.0)
    worst = 0.0
    for t in ctx.probe_times:
        if t == 0.0:
            continue
        out = propagate(ctx.fs(t), initial, ctx.x)
        worst = max(worst, float(np.max(np.abs(out.values - psi(ctx.x, t)))))
    return worst


def _check_group_inverse(ctx):
    te = ctx.transform
    roundtrip = compose(te, invert(te))
    chi = autonomous_solution(ctx.cs.c0, 1, _MIXED_INIT)
    worst = 0.0
    for t in ctx.probe_times:
        # the round trip acts on the autonomous side, whose time is -gamma(t)
        tau = -ctx.trajectory(t).gamma
        ref = chi(ctx.x, tau)
        worst = max(worst, float(np.max(np.abs(apply(roundtrip, chi, ctx.x, tau) - ref))
                                 / np.max(np.abs(ref))))
    return worst


def _transform_residual(ctx, te, chi, cs):
    psi = te(chi)
    return max(pde_residual(cs, ctx.block(psi, t)) for t in ctx.probe_times)


def _check_osc_to_free(ctx):
    return _transform_residual(ctx, osc_to_free(), exact_solution("free", 1, _MIXED_INIT),
                               OSCILLATOR)


def _check_free_to_osc(ctx):
    return _transform_residual(ctx, free_to_osc(), exact_solution("oscillator", 1, _MIXED_INIT),
                               FREE)


def _check_similarity(ctx):
    te = conjugate(galilei(0.8, 0.3, 0.1), osc_to_free())
    return _transform_residual(ctx, te, exact_solution("oscillator", 0, _MIXED_INIT), OSCILLATOR)


def _check_galilei_composition(ctx):
    V1, V2 = 0.7, -1.3
    chi = exact_solution("free", 2, _MIXED_INIT)
    chained = compose(galilei(V1), galilei(V2))
    direct = galilei(V1 + V2)
    return max(float(np.max(np.abs(np.abs(apply(chained, chi, ctx.x, t))
                                   - np.abs(apply(direct, chi, ctx.x, t)))))
               for t in ctx.probe_times)


CHECKS = {
    "alpha_link": (_check_alpha_link, 1e-6),
    "closed_form": (_check_closed_form, 1e-9),
    "eigen": (_check_eigen, 1e-4),
    "free_to_osc": (_check_free_to_osc, 1e-4),
    "galilei_composition": (_check_galilei_composition, 1e-12),
    "gauge": (_check_gauge, 1e-8),
    "group_inverse": (_check_group_inverse, 1e-10),
    "invariant": (_check_invariant, 1e-5),
    "norm": (_check_norm, 1e-8),
    "osc_to_free": (_check_osc_to_free, 1e-4),
    "pde_residual": (_check_pde_residual, 1e-4),
    "propagator": (_check_propagator, 1e-6),
    "similarity": (_check_similarity, 1e-4),
    "system_residual": (_check_system_residual, 1e-6),
    "wronskian": (_check_wronskian, 1e-7),
}


def run_check(ctx, name) -> CheckResult:
    if name not in CHECKS:
        return CheckResult(name, math.nan, math.nan, "fail", "unknown check")
    func, threshold = CHECKS[name]
    try:
        value = float(func(ctx))
    except NotApplicable as exc:
        return CheckResult(name, math.nan, threshold, "skip", str(exc))
    except (OscGroupError, ArithmeticError, ValueError) as exc:
        return CheckResult(name, math.nan, threshold, "fail", f"{type(exc).__name__}: {exc}")
    status = "pass" if value < threshold else "fail"
    return CheckResult(name, value, threshold, status)


def run_suite(scn: Scenario) -> Report:
    """Run the scenario's checks (all applicable ones when none are listed).

    Errors inside a check are recorded as failures; the report is sorted by
    check name.
    """
    if scn.empty:
        return Report(())
    ctx = _Context(scn)
    if scn.checks is None:
        results = [r for r in (run_check(ctx, name) for name in CHECKS) if r.status != "skip"]
    else:
        results = [run_check(ctx, name) for name in scn.checks]
    return Report(tuple(sorted(results, key=lambda r: r.name)))
