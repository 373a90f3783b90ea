import math

import numpy as np
import pytest

from helpers import PI, general_set
from oscgroup.errors import ContextMismatch, NotInvertible, SingularTime
from oscgroup.kernel import KernelParameters, general_solution
from oscgroup.transforms import (FREE, OSCILLATOR, ansatz, apply, compose, conjugate, dilatation,
                                 expansion, expansion_singular, free_to_osc, galilei, identity,
                                 invert, osc_reflection, osc_to_free)
from oscgroup.verify import SpaceTimeBlock, exact_solution, pde_residual

X = np.linspace(-8, 8, 1025)
GRID = (-8.0, 8.0, 1 / 64)
MIXED = KernelParameters(1.0, 0.2, 1.1, 0.0, 0.3, 0.4, 0.0)
FREE_SOL = exact_solution("free", 1, MIXED)
OSC_SOL = exact_solution("oscillator", 1, MIXED)


def probe(chi):
    """Wrap ``chi`` so its arguments are recorded."""
    calls = []

    def rec(xi, tau):
        calls.append((xi, tau))
        return chi(xi, tau)
    return rec, calls


def residual(te, chi, cs, times):
    psi = te(chi)
    return max(pde_residual(cs, SpaceTimeBlock.sample(psi, GRID, t, 1e-3)) for t in times)


def sup_rel(a, b):
    return float(np.max(np.abs(a - b)) / np.max(np.abs(b)))


def test_identity_element():
    for ctx in (FREE, OSCILLATOR):
        te = identity(ctx)
        assert np.array_equal(apply(te, OSC_SOL, X, 0.4), OSC_SOL(X, 0.4))
    assert np.array_equal(apply(galilei(0.0), FREE_SOL, X, 0.3), FREE_SOL(X, 0.3))
    assert np.array_equal(apply(dilatation(1.0), FREE_SOL, X, 0.3), FREE_SOL(X, 0.3))
    assert np.array_equal(apply(expansion(0.0), FREE_SOL, X, 0.3), FREE_SOL(X, 0.3))


def test_osc_to_free_example():
    chi = lambda xi, tau: np.exp(1j * (xi + 3 * tau)) * (1 + xi * xi)
    got = apply(osc_to_free(), chi, 1.0, PI / 8)
    expect = np.exp(-0.5j) * 2**0.25 * chi(math.sqrt(2), 0.5)
    assert got == pytest.approx(expect, rel=1e-14)


def test_free_to_osc_example():
    rec, calls = probe(lambda xi, tau: 1.0 + 0j)
    pre = apply(free_to_osc(), rec, 0.0, 1.0)
    assert pre == pytest.approx(5**-0.25, rel=1e-15)
    assert calls[0][0] == 0.0
    assert calls[0][1] == pytest.approx(0.5 * math.atan(2), rel=1e-15)


def test_expansion_example():
    rec, calls = probe(lambda xi, tau: 1.0 + 0j)
    pre = apply(expansion(1.0), rec, 2.0, 1.0)
    assert pre == pytest.approx(2**-0.5 * np.exp(0.5j), rel=1e-15)
    assert (calls[0][0], calls[0][1]) == (1.0, 0.5)


def test_galilei_phase_example():
    rec, calls = probe(lambda xi, tau: 1.0 + 0j)
    assert apply(galilei(2.0), rec, 1.0, 1.0) == 1.0
    assert (calls[0][0], calls[0][1]) == (-1.0, 1.0)
    apply(galilei(0.0, x0=0.5, t0=0.25), rec, 1.0, 1.0)
    assert (calls[1][0], calls[1][1]) == (1.5, 0.75)


def test_validity_intervals():
    with pytest.raises(SingularTime):
        apply(osc_to_free(), FREE_SOL, X, PI / 4)
    with pytest.raises(SingularTime):
        apply(expansion(1.0), FREE_SOL, X, -0.95)
    with pytest.raises(SingularTime):
        apply(expansion_singular(), FREE_SOL, X, 0.0)
    with pytest.raises(ValueError):
        dilatation(0.0)


def test_compose_free_osc_identity():
    psi0 = exact_solution("oscillator", 0)
    te = compose(free_to_osc(), osc_to_free())
    assert te.source.same_equation(OSCILLATOR) and te.target.same_equation(OSCILLATOR)
    for t in np.linspace(-0.39, 0.39, 7):
        assert np.max(np.abs(apply(te, psi0, X, t) - psi0(X, t))) < 1e-10


def test_compose_order_semantics():
    t1, t2 = galilei(0.4, 0.1), dilatation(1.7)
    direct = compose(t1, t2)(FREE_SOL)(X, 0.3)
    nested = t2(t1(FREE_SOL))(X, 0.3)
    assert np.max(np.abs(direct - nested)) < 1e-15


def test_context_mismatch():
    with pytest.raises(ContextMismatch):
        compose(osc_reflection(), galilei(1.0))
    with pytest.raises(ContextMismatch):
        compose(osc_to_free(), osc_to_free())


@pytest.mark.parametrize("te,chi,t", [
    (galilei(0.9, 0.4, -0.2, 0.3), FREE_SOL, 0.5),
    (dilatation(1.3), FREE_SOL, 0.4),
    (expansion(0.8), FREE_SOL, 0.6),
    (osc_to_free(), FREE_SOL, 0.3),
    (free_to_osc(), OSC_SOL, 0.7),
    (osc_reflection(), OSC_SOL, 0.2),
    (osc_reflection(0.3), OSC_SOL, -0.5),
])
def test_local_inverse_laws(te, chi, t):
    # chi solves te.target; te(chi) solves te.source
    psi = te(chi)
    assert sup_rel(compose(te, invert(te))(chi)(X, t), chi(X, t)) < 1e-10
    assert sup_rel(compose(invert(te), te)(psi)(X, t), psi(X, t)) < 1e-10


def test_ansatz_roundtrip():
    for cs in (general_set(), general_set(c0=1)):
        te = ansatz(cs, general_solution(cs, MIXED), validity=(-0.4, 0.4))
        chi = exact_solution("oscillator" if cs.c0 == 1 else "free", 1)
        rt = compose(te, invert(te))
        trajectory = general_solution(cs, MIXED)
        for t in (-0.2, 0.1, 0.3):
            tau = -trajectory(t).gamma
            assert sup_rel(apply(rt, chi, X, tau), chi(X, tau)) < 1e-10


def test_singular_expansion_not_invertible():
    with pytest.raises(NotInvertible):
        invert(expansion_singular())
    with pytest.raises(NotInvertible):
        invert(compose(galilei(1.0), expansion_singular()))


def test_galilei_composition_modulus():
    chi = exact_solution("free", 2, MIXED)
    for t in (0.1, 0.5):
        a = np.abs(apply(compose(galilei(0.7), galilei(-1.3)), chi, X, t))
        b = np.abs(apply(galilei(-0.6), chi, X, t))
        assert np.max(np.abs(a - b)) < 1e-12


@pytest.mark.parametrize("te,chi,cs,times", [
    (galilei(0.9, 0.4, -0.2), FREE_SOL, FREE, (0.2, 0.6)),
    (dilatation(1.3), FREE_SOL, FREE, (0.2, 0.5)),
    (expansion(0.8), FREE_SOL, FREE, (0.1, 0.6)),
    (expansion(-0.5), FREE_SOL, FREE, (0.1, 0.6)),
    (expansion_singular(), FREE_SOL, FREE, (0.5, 1.0)),
    (osc_to_free(), FREE_SOL, OSCILLATOR, (0.1, 0.6)),
    (free_to_osc(), OSC_SOL, FREE, (0.2, 1.0)),
    (osc_reflection(), OSC_SOL, OSCILLATOR, (0.1, 0.6)),
])
def test_solution_to_solution(te, chi, cs, times):
    assert residual(te, chi, cs, times) < 1e-4


def test_ansatz_solution_to_solution():
    for c0 in (0, 1):
        cs = general_set(c0)
        te = ansatz(cs, general_solution(cs, MIXED))
        chi = OSC_SOL if c0 else FREE_SOL
        assert residual(te, chi, cs, (0.2, 0.5)) < 1e-4


def test_similarity_conjugate():
    te = conjugate(galilei(0.8, 0.3, 0.1), osc_to_free())
    assert te.source.same_equation(OSCILLATOR) and te.target.same_equation(OSCILLATOR)
    chi = exact_solution("oscillator", 0, MIXED)
    assert residual(te, chi, OSCILLATOR, (-0.2, 0.1, 0.3)) < 1e-4


def test_oscillator_states_to_free_family():
    # the map carrying oscillator states to free ones is the inverse of osc_to_free
    te = invert(osc_to_free())
    for n in (0, 2):
        osc_state = exact_solution("oscillator", n, MIXED)
        assert residual(te, osc_state, FREE, (0.3, 0.9)) < 1e-4


def test_compose_validity_from_inner():
    te = compose(osc_to_free(), free_to_osc())
    assert te.validity == free_to_osc().validity
    # free time 4 maps to oscillator time arctan(8)/2 > 0.9 pi/4
    apply(te, FREE_SOL, X, 2.0)
    with pytest.raises(SingularTime):
        apply(te, FREE_SOL, X, 4.0)
