"""Scenario files: line-based ``key = value`` text.

Recognized keys::

    preset          free | oscillator | driven | driven(<expr>)
    a b c d f g     coefficient expressions in t (override the preset)
    c0              0 (Riccati type) or 1 (Ermakov type)
    domain          lo:hi, time interval of the coefficient set
    init.<name>     initial value of mu, alpha, beta, gamma, delta, epsilon, kappa
    t0 t1 step      time window and spacing of the sampled trajectory
    dt              time step of the PDE-residual stencil
    grid            start:stop:step of the spatial grid
    checks          comma-separated check names, or ``all``

Blank lines and ``#`` comments are ignored. Real values may be constant
expressions such as ``pi/5`` (``π`` is accepted for ``pi``).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, replace

from .coefficients import DEFAULT_DOMAIN, NAMES, CoefficientSet, preset
from .errors import ParseError
from .expr import evaluate, is_constant, parse
from .kernel import TRIVIAL, KernelParameters

DEFAULT_GRID = (-8.0, 8.0, 1.0 / 64.0)
DEFAULT_DT = 1e-3


@dataclass(frozen=True)
class Scenario:
    """A parsed scenario; ``checks`` is ``None`` for "all applicable"."""

    cs: CoefficientSet | None = None
    preset_name: str | None = None
    init: KernelParameters = TRIVIAL
    t0: float = 0.0
    t1: float = 0.6
    step: float = 0.05
    dt: float = DEFAULT_DT
    grid: tuple = DEFAULT_GRID
    checks: tuple | None = ()

    @property
    def empty(self) -> bool:
        return self.cs is None and not self.checks


def normalize(text: str) -> str:
    """Spell ``π`` as ``pi``; ``2π`` becomes ``2*pi``."""
    return re.sub(r"(?<=[0-9.)])\s*π", "*pi", text).replace("π", "pi")


def parse_real(text: str) -> float:
    """Evaluate a constant expression such as ``-1/64`` or ``2*pi``."""
    node = parse(normalize(text.strip()))
    if not is_constant(node):
        raise ParseError(f"expected a constant, got {text!r}", 0, "constant expression")
    return float(evaluate(node, 0.0))


def parse_grid(text: str) -> tuple:
    """``start:stop:step`` -> (start, stop, step) with step > 0 and stop > start."""
    parts = normalize(text).split(":")
    if len(parts) != 3:
        raise ParseError(f"grid {text!r} must have the form start:stop:step", 0, "start:stop:step")
    start, stop, step = (parse_real(p) for p in parts)
    if not step > 0 or not stop > start:
        raise ParseError(f"grid {text!r} needs step > 0 and stop > start", 0, "increasing grid")
    return start, stop, step


def parse_init(text: str, base: KernelParameters = TRIVIAL) -> KernelParameters:
    """``"mu=1,alpha=0.3,..."``; omitted names keep their value in ``base``."""
    values = dict(zip(KernelParameters.NAMES, base.values()))
    for item in filter(None, (s.strip() for s in text.split(","))):
        name, sep, value = item.partition("=")
        name = name.strip()
        if not sep or name not in values:
            raise ParseError(f"bad initial-data item {item!r}", 0,
                             "name=value with name in " + ", ".join(KernelParameters.NAMES))
        values[name] = parse_real(value)
    return KernelParameters(**values)


def build_coefficients(preset_name, exprs, c0, domain) -> CoefficientSet:
    """Preset (default ``free``) with per-coefficient overrides."""
    cs = preset(preset_name or "free", c0=c0, domain=domain)
    if exprs:
        cs = cs.replace(**{k: parse(normalize(v)) for k, v in exprs.items()})
    return cs


def parse_scenario(text: str) -> Scenario:
    """Parse scenario text.

    Raises
    ------
    ParseError
        On unknown keys, malformed lines or invalid values; the offset is
        the byte offset of the offending line.
    """
    offset = 0
    raw = {}
    for lineno, line in enumerate(text.splitlines(keepends=True), 1):
        here, offset = offset, offset + len(line.encode("utf-8"))
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        key, sep, value = body.partition("=")
        key, value = key.strip(), value.strip()
        known = key in NAMES or key in ("preset", "c0", "domain", "t0", "t1", "step", "dt",
                                        "grid", "checks")
        if key.startswith("init.") and key[5:] in KernelParameters.NAMES:
            known = True
        if not sep or not known:
            raise ParseError(f"line {lineno}: expected 'key = value' with a known key", here,
                             "scenario key")
        raw[key] = (value, here, lineno)

    if not raw:
        return Scenario()

    def get(key, conv, default):
        if key not in raw:
            return default
        value, here, lineno = raw[key]
        try:
            return conv(value)
        except ParseError as exc:
            raise ParseError(f"line {lineno} ({key}): {exc}", here, exc.expected) from None
        except ValueError as exc:
            raise ParseError(f"line {lineno} ({key}): {exc}", here, key) from None

    def c0_conv(v):
        if v.strip() not in ("0", "1"):
            raise ValueError("c0 must be 0 or 1")
        return int(v)

    def domain_conv(v):
        lo, hi = (parse_real(p) for p in normalize(v).split(":"))
        return lo, hi

    preset_name = get("preset", str, None)
    exprs = {k: raw[k][0] for k in NAMES if k in raw}
    c0 = get("c0", c0_conv, 0)
    domain = get("domain", domain_conv, DEFAULT_DOMAIN)
    try:
        cs = build_coefficients(preset_name, exprs, c0, domain)
    except (ParseError, ValueError) as exc:
        here = raw.get("preset", next(iter(raw.values())))[1]
        raise ParseError(f"coefficients: {exc}", here, "valid coefficient set") from None

    init = TRIVIAL
    for name in KernelParameters.NAMES:
        init = replace(init, **{name: get("init." + name, parse_real, getattr(init, name))})

    def checks_conv(v):
        names = tuple(s.strip() for s in v.split(",") if s.strip())
        return None if names == ("all",) else names

    scn = Scenario(
        cs=cs,
        preset_name=preset_name,
        init=init,
        t0=get("t0", parse_real, 0.0),
        t1=get("t1", parse_real, 0.6),
        step=get("step", parse_real, 0.05),
        dt=get("dt", parse_real, DEFAULT_DT),
        grid=get("grid", parse_grid, DEFAULT_GRID),
        checks=get("checks", checks_conv, None),
    )
    if not scn.step > 0 or not scn.dt > 0:
        raise ParseError("step and dt must be positive", 0, "positive step")
    if scn.t1 < scn.t0:
        raise ParseError("t1 must not precede t0", 0, "t0 <= t1")
    return scn


def load_scenario(path) -> Scenario:
    with open(path, encoding="utf-8") as fh:
        return parse_scenario(fh.read())


def sample_times(t0: float, t1: float, step: float) -> list:
    """t0, t0 + step, ..., with t1 included when it falls on the lattice."""
    n = int(math.floor((t1 - t0) / step + 1e-9))
    return [t0 + k * step for k in range(n + 1)]
