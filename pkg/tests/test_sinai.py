from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from thermoshift import (LocallyConstantPotential, birkhoff_sum, certify_one_sided, exact, fixed_past,
                         periodic_point, sinai_reduce, solve_rpf)

from _systems import golden_mean, random_potential, random_transitive


def periodic_cycles(g, max_period):
    """Closed admissible walks ``c`` (as words of length p) with ``c[-1] -> c[0]``."""
    for p in range(1, max_period + 1):
        for w in g.words(p):
            if g.has_edge(w[-1], w[0]):
                yield w


def orbit_sum(phi, cycle):
    p = len(cycle)
    l, r = phi.window
    x = periodic_point(cycle, min(l, 0), p - 1 + max(r, 0))
    return birkhoff_sum(phi, x, p)


def fraction_potential(g, window, seed):
    rng = np.random.default_rng(seed)
    l, r = window
    return LocallyConstantPotential(g, window, {w: Fraction(int(rng.integers(-20, 21)), 8)
                                               for w in g.words(r - l + 1)})


def test_fixed_past_uses_least_predecessor():
    g = golden_mean()
    assert fixed_past(g, "b", 3) == ("a", "a", "a")
    assert fixed_past(g, "a", 1) == ("a",)


def test_one_sided_input_is_returned():
    g = golden_mean()
    phi = random_potential(g, (0, 1), 0)
    red = sinai_reduce(phi)
    assert red.phi is phi
    assert all(v == 0 for v in red.u.table.values())


def test_certificate_detects_dependence_on_the_past():
    g = golden_mean()
    phi = LocallyConstantPotential(g, (-1, 0), {("a", "a"): 0.0, ("a", "b"): 0.0, ("b", "a"): 1.0})
    assert not certify_one_sided(phi)
    flat = LocallyConstantPotential(g, (-1, 0), {("a", "a"): 2.0, ("a", "b"): 0.0, ("b", "a"): 2.0})
    assert certify_one_sided(flat)


@pytest.mark.parametrize("seed", range(6))
def test_exact_reduction_on_periodic_orbits(seed):
    g = random_transitive(3, seed)
    psi = fraction_potential(g, (-2, 2), seed)
    red = sinai_reduce(psi)
    assert red.phi.window == (0, 4)
    assert certify_one_sided(red.two_sided_phi)
    for c in periodic_cycles(g, 5):
        assert orbit_sum(psi, c) == orbit_sum(red.phi, c)


def test_coboundary_identity_pointwise():
    g = random_transitive(3, 4)
    psi = fraction_potential(g, (-1, 1), 4)
    red = sinai_reduce(psi)
    # phi - psi = u - u o sigma on every word covering the windows of u and u o sigma
    for w in g.words(5):
        lhs = red.two_sided_phi(w[:4]) - psi(w[:3])
        rhs = red.u(w[:3]) - red.u(w[1:4])
        assert lhs == rhs


@given(st.integers(0, 10_000), st.sampled_from([(-1, 0), (-1, 2), (-2, 1), (-3, 0)]))
@settings(max_examples=25, deadline=None)
def test_reduction_is_one_sided_and_cohomologous(seed, window):
    g = random_transitive(3, seed % 13, density=0.4)
    psi = exact(random_potential(g, window, seed))
    red = sinai_reduce(psi)
    assert red.phi.one_sided and certify_one_sided(red.two_sided_phi)
    for c in periodic_cycles(g, 3):
        assert orbit_sum(psi, c) == orbit_sum(red.phi, c)


def test_float_reduction_pressure_agrees_with_exact():
    g = random_transitive(4, 3)
    psi = random_potential(g, (-2, 2), 3)
    p_float = solve_rpf(g, sinai_reduce(psi).phi).pressure
    p_exact = solve_rpf(g, sinai_reduce(exact(psi)).phi.map_values(float)).pressure
    assert p_float == pytest.approx(p_exact, abs=1e-12)


def test_reduced_sup_is_controlled():
    g = random_transitive(3, 8)
    psi = fraction_potential(g, (-2, 2), 8)
    red = sinai_reduce(psi)
    sup_u = max(abs(v) for v in red.u.table.values())
    assert red.phi.sup() <= psi.sup() + 2 * sup_u


def test_equilibrium_cylinders_agree_with_shifted_psi():
    from thermoshift import equilibrium_measure, shift_window
    g = random_transitive(3, 5)
    psi = random_potential(g, (-2, 2), 5)
    mu_phi = equilibrium_measure(solve_rpf(g, sinai_reduce(psi).phi))
    mu_psi = equilibrium_measure(solve_rpf(g, shift_window(psi, 2)))
    for L in range(1, 6):
        for w in g.words(L):
            assert mu_phi.word_measure(w) == pytest.approx(mu_psi.word_measure(w), abs=1e-9)
