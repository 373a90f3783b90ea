import math

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from helpers import PI, general_set, random_init, rel_dev, rk_oracle
from oscgroup.characteristic import solve_characteristic
from oscgroup.coefficients import CoefficientSet, lambda_factor, preset
from oscgroup.errors import DomainError, SingularTime
from oscgroup.kernel import (TRIVIAL, FundamentalSolution, KernelParameters, alpha_link_residual,
                             closed_form_params, ermakov_general, fundamental_solution,
                             general_solution, riccati_general, system_residual)


def fs_for(cs):
    return FundamentalSolution(solve_characteristic(cs))


def test_fundamental_free():
    p = fundamental_solution(solve_characteristic(preset("free")), 0.5)
    assert (p.alpha, p.beta, p.gamma) == pytest.approx((0.5, -1.0, 0.5), abs=1e-10)
    assert (p.delta, p.epsilon, p.kappa) == (0.0, 0.0, 0.0)
    assert p.lam == 1.0


def test_fundamental_oscillator():
    p = fundamental_solution(solve_characteristic(preset("oscillator")), PI / 8)
    assert (p.alpha, p.beta, p.gamma) == pytest.approx((0.5, -math.sqrt(2), 0.5), abs=1e-9)


def test_fundamental_driven_delta():
    cs = CoefficientSet.from_strings(f="1")
    t0, t1 = 1e-4, 0.3
    # (alpha0, delta0) started on their t -> 0 asymptotics 1/(4t), t/2
    rhs = lambda t, y: [-4 * y[0] ** 2, -4 * y[0] * y[1] + 1.0]
    ref = solve_ivp(rhs, (t0, t1), [1 / (4 * t0), t0 / 2], method="DOP853",
                    rtol=1e-12, atol=1e-12).y[1, -1]
    p = fundamental_solution(solve_characteristic(cs), t1)
    assert abs(p.delta - ref) < 1e-7
    assert abs(p.delta - t1 / 2) < 1e-7


def test_fundamental_solution_invariants():
    cs = general_set()
    fs = fs_for(cs)
    for t in (0.2, 0.6):
        p = fs(t)
        assert p.beta == pytest.approx(-p.lam / p.mu0, rel=1e-14)
    # delta0 -> g(0)/(2a(0)) = -epsilon0, kappa0 -> 0 as t -> 0
    p = fs(1e-5)
    assert p.delta == pytest.approx(0.25, abs=1e-4)
    assert p.epsilon == pytest.approx(-0.25, abs=1e-4)
    assert p.kappa == pytest.approx(0.0, abs=1e-4)


def test_fundamental_solution_residual_free():
    cs = preset("free")
    fs = fs_for(cs)

    def traj(t):
        p = fs(t)
        return KernelParameters(1.0, p.alpha, p.beta, p.gamma, p.delta, p.epsilon, p.kappa, t)
    assert np.max(system_residual(cs, traj, 0.5)) < 1e-8


def test_fundamental_caustic():
    fs = fs_for(preset("oscillator"))
    with pytest.raises(SingularTime):
        fs(PI / 2)
    with pytest.raises(SingularTime):
        fs(0.0)


def test_riccati_example():
    fs = fs_for(preset("free"))
    init = KernelParameters(1, 1, 1, 0, 0, 0, 0)
    r = riccati_general(fs, init, 1.0)
    expect = (5.0, 0.2, 0.2, -0.2, 0.0, 0.0, 0.0)
    assert np.max(np.abs(r.values() - expect)) < 1e-9
    assert np.max(np.abs(closed_form_params("free_to_free", init, 1.0).values() - expect)) < 1e-14


def test_riccati_oscillator_vs_rk():
    cs = preset("oscillator")
    init = KernelParameters(1, 0, 1, 0, 1, 0, 0)
    r = riccati_general(fs_for(cs), init, PI / 8)
    assert np.max(rel_dev(r.values(), rk_oracle(cs, init, [PI / 8])[0])) < 1e-7
    # delta = delta(0) / cos(2t) for alpha(0) = 0
    assert r.delta == pytest.approx(1 / math.cos(PI / 4), rel=1e-9)


def test_riccati_driven_vs_rk():
    cs = general_set()
    init = KernelParameters(1.2, 0.1, 0.9, 0.3, -0.4, 0.2, 0.5)
    sol = general_solution(cs, init)
    times = [0.2, 0.5, 0.8]
    ref = rk_oracle(cs, init, times)
    for t, row in zip(times, ref):
        assert np.max(rel_dev(sol(t).values(), row)) < 1e-7


def test_riccati_singular_denominator():
    # free case: 1 + 4 alpha(0) t = 0 at t = 0.5 for alpha(0) = -1/2
    fs = fs_for(preset("free"))
    with pytest.raises(SingularTime):
        riccati_general(fs, KernelParameters(1, -0.5, 1, 0, 0, 0, 0), 0.5)


def test_ermakov_free_example():
    fs = fs_for(preset("free", c0=1))
    e = ermakov_general(fs, TRIVIAL, 1.0)
    expect = (math.sqrt(5), 0.2, 1 / math.sqrt(5), -0.5 * math.atan(2), 0.0, 0.0, 0.0)
    assert np.max(np.abs(e.values() - expect)) < 1e-9
    assert np.max(np.abs(closed_form_params("free_to_osc", TRIVIAL, 1.0).values() - expect)) < 1e-14


def test_ermakov_textbook():
    fs = fs_for(preset("oscillator", c0=1))
    for t in (0.3, 1.0, -1.2, 1.9):
        e = ermakov_general(fs, TRIVIAL, t)
        assert np.max(np.abs(e.values() - (1, 0, 1, -t, 0, 0, 0))) < 1e-9
    c = closed_form_params("osc_to_osc", TRIVIAL, 0.7)
    assert np.max(np.abs(c.values() - (1, 0, 1, -0.7, 0, 0, 0))) < 1e-14


def test_ermakov_oscillator_vs_rk():
    cs = preset("oscillator", c0=1)
    init = KernelParameters(1, 0.3, 1.2, 0, 0.5, -0.2, 0)
    e = ermakov_general(fs_for(cs), init, 0.4)
    assert np.max(rel_dev(e.values(), rk_oracle(cs, init, [0.4])[0])) < 1e-6


def test_ermakov_driven_vs_rk():
    cs = general_set(c0=1)
    init = KernelParameters(0.8, -0.2, 1.1, 0.0, 0.3, -0.5, 0.1)
    sol = general_solution(cs, init)
    times = [0.25, 0.75]
    for t, row in zip(times, rk_oracle(cs, init, times)):
        assert np.max(rel_dev(sol(t).values(), row)) < 1e-6


def test_ermakov_gamma_continuous_past_caustic():
    # mu0 = sin 2t vanishes at pi/2; gamma must stay continuous across it
    fs = fs_for(preset("oscillator", c0=1))
    init = KernelParameters(1, 0.2, 0.8, 0, 0, 0, 0)
    g = [ermakov_general(fs, init, t).gamma for t in (PI / 2 - 0.01, PI / 2 + 0.01)]
    assert abs(g[1] - g[0]) < 0.05
    for t in (1.0, 1.4, 1.75, 1.95):
        assert np.max(rel_dev(ermakov_general(fs, init, t).values(),
                              closed_form_params("osc_to_osc", init, t).values())) < 1e-9


def test_ermakov_rejects_negative_mass():
    fs = fs_for(CoefficientSet.from_strings(a="-1", c0=1))
    with pytest.raises(DomainError):
        ermakov_general(fs, TRIVIAL, 0.3)


def test_zero_beta_rejected():
    fs = fs_for(preset("free"))
    bad = KernelParameters(1, 0, 0, 0, 0, 0, 0)
    with pytest.raises(ValueError):
        riccati_general(fs, bad, 0.5)
    with pytest.raises(ValueError):
        ermakov_general(fs, bad, 0.5)


@pytest.mark.parametrize("c0", [0, 1])
def test_limit_at_identity(c0):
    rng = np.random.default_rng(7)
    for cs in (preset("free", c0=c0), preset("oscillator", c0=c0), general_set(c0)):
        init = random_init(rng)
        sol = general_solution(cs, init)
        assert np.max(np.abs(sol(1e-6).values() - init.values())) < 1e-4
        assert np.max(np.abs(sol(0.0).values() - init.values())) == 0.0


@pytest.mark.parametrize("c0", [0, 1])
def test_residuals_gauge_and_alpha_link(c0):
    rng = np.random.default_rng(11 + c0)
    for cs in (preset("oscillator", c0=c0), general_set(c0)):
        init = random_init(rng)
        sol = general_solution(cs, init)
        for t in (0.3, 0.5):
            assert np.max(system_residual(cs, sol, t)) < 1e-6
            assert alpha_link_residual(cs, sol, t) < 1e-6
            p = sol(t)
            assert abs(p.beta * p.mu - init.beta * init.mu * lambda_factor(cs, t)) < 1e-8


def test_constant_trajectory_residual():
    cs = preset("oscillator")
    frozen = KernelParameters(1.0, 0.0, 1.3, 0.2, 0.0, 0.0, 0.0)
    res = system_residual(cs, frozen.at, 0.5)
    assert res[2] == pytest.approx(1.3**2, rel=1e-14)


def test_closed_forms_match_general_solutions():
    rng = np.random.default_rng(3)
    pairs = [("free_to_free", preset("free")), ("osc_to_free", preset("oscillator")),
             ("free_to_osc", preset("free", c0=1)), ("osc_to_osc", preset("oscillator", c0=1))]
    for case, cs in pairs:
        for _ in range(5):
            init = random_init(rng, wide=True)
            sol = general_solution(cs, init)
            t = rng.uniform(0.05, 0.3)
            try:
                ref = closed_form_params(case, init, t)
            except SingularTime:
                continue
            assert np.max(rel_dev(sol(t).values(), ref.values())) < 1e-9, (case, init, t)


def test_closed_form_errors():
    with pytest.raises(ValueError):
        closed_form_params("bogus", TRIVIAL, 0.1)
    with pytest.raises(SingularTime):
        closed_form_params("osc_to_free", TRIVIAL, PI / 4)
