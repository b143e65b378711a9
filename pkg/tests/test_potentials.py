import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from thermoshift import (LocallyConstantPotential, PotentialError, Word, birkhoff_potential, birkhoff_sum,
                         comparison_horizon, constant_potential, full_shift, natural_distance, periodic_point,
                         recode_potential, shift_window, var_n, variation_envelope, variation_inequality_check,
                         widen)
from thermoshift.graph import higher_block

from _systems import golden_mean, random_potential, random_transitive


def brute_var(phi, n):
    """var_n by comparing every pair of hull words that agree on the agreement block."""
    l, r = phi.window
    lo = 0 if l >= 0 else -(n - 1)
    hi = n - 1
    H0, H1 = min(l, lo), max(r, hi)
    words = list(phi.graph.words(H1 - H0 + 1))
    best = 0
    for u, v in itertools.combinations(words, 2):
        if u[lo - H0:hi - H0 + 1] == v[lo - H0:hi - H0 + 1]:
            best = max(best, abs(phi(u[l - H0:r - H0 + 1]) - phi(v[l - H0:r - H0 + 1])))
    return best


def test_table_must_cover_admissible_words():
    g = golden_mean()
    with pytest.raises(PotentialError, match="misses"):
        LocallyConstantPotential(g, (0, 1), {("a", "a"): 0.0})
    with pytest.raises(PotentialError, match="not an admissible"):
        LocallyConstantPotential(g, (0, 0), {("a",): 0.0, ("b",): 0.0, ("c",): 1.0})
    with pytest.raises(PotentialError):
        LocallyConstantPotential(g, (1, 0), {})


def test_word_coordinates():
    w = Word(("a", "b", "a"), anchor=-1, two_sided=True)
    assert w[-1] == "a" and w[1] == "a" and w.last == 1
    assert w.shift(1)[-2] == "a"
    with pytest.raises(IndexError):
        w[2]
    with pytest.raises(PotentialError):
        Word(("a",), anchor=2)
    assert Word(("a", "b", "c")).shift(2).symbols == ("c",)


def test_periodic_point_and_distance():
    x = periodic_point(("a", "b"), -3, 3)
    y = periodic_point(("a", "b", "a", "a"), -3, 3)
    assert comparison_horizon(x, y) == (-3, 3)
    # they first differ at coordinate -1 or 3; the closest to 0 is |-1|
    assert natural_distance(x, y) == pytest.approx(math.exp(-1))
    assert natural_distance(x, x) == 0.0


def test_distance_only_compares_common_coordinates():
    x = Word(("a", "b", "a"))
    y = Word(("a", "b"))
    assert natural_distance(x, y) == 0.0
    with pytest.raises(PotentialError):
        natural_distance(x, Word(("a",), two_sided=True))


def test_birkhoff_sum_needs_enough_coordinates():
    g = golden_mean()
    phi = random_potential(g, (0, 1), 3)
    w = Word(("a", "b", "a"))
    assert birkhoff_sum(phi, w, 2) == phi(("a", "b")) + phi(("b", "a"))
    with pytest.raises(PotentialError, match="length 4"):
        birkhoff_sum(phi, w, 3)


def test_birkhoff_potential_matches_sum():
    g = random_transitive(3, 2)
    phi = random_potential(g, (-1, 1), 5)
    for n in (1, 2, 4):
        phin = birkhoff_potential(phi, n)
        assert phin.window == (-1, n)
        for w in g.words(n + 2):
            point = Word(w, anchor=-1, two_sided=True)
            assert phin(w) == pytest.approx(birkhoff_sum(phi, point, n), abs=1e-12)


@pytest.mark.parametrize("window", [(0, 0), (0, 1), (0, 2), (-1, 1), (-2, 1)])
def test_var_n_matches_pairwise_oracle(window):
    g = random_transitive(3, 7)
    phi = random_potential(g, window, 1)
    for n in range(1, 4):
        assert var_n(phi, n) == pytest.approx(brute_var(phi, n), abs=1e-14)


def test_var_n_vanishes_once_the_window_is_covered():
    g = full_shift("xyz")
    phi = random_potential(g, (0, 2), 9)
    assert var_n(phi, 3) == 0
    assert var_n(phi, 2) > 0
    two = random_potential(g, (-2, 1), 9)
    assert var_n(two, 3) == 0 and var_n(two, 2) > 0


def test_exact_tables_stay_exact():
    g = golden_mean()
    phi = LocallyConstantPotential(g, (0, 1), {w: Fraction(i + 1, 3) for i, w in enumerate(g.words(2))})
    assert isinstance(var_n(phi, 1), Fraction)
    assert isinstance(birkhoff_potential(phi, 3).sup(), Fraction)


@given(st.integers(0, 50), st.integers(1, 3), st.integers(1, 3))
@settings(max_examples=40, deadline=None)
def test_variation_inequality(seed, n, m):
    g = random_transitive(3, seed % 7)
    phi = random_potential(g, (-1, 2), seed)
    lhs, rhs = variation_inequality_check(phi, n, m)
    assert lhs <= rhs + 1e-12


def test_widen_and_shift_keep_values():
    g = golden_mean()
    phi = random_potential(g, (0, 1), 2)
    wide = widen(phi, (-1, 3))
    for w in g.words(5):
        assert wide(w) == phi(w[1:3])
    shifted = shift_window(phi, 2)
    assert shifted.window == (2, 3)
    x = Word(("a", "a", "b", "a"))
    assert shifted.at(x) == phi.at(x, 2)
    with pytest.raises(PotentialError):
        widen(phi, (1, 1))


@pytest.mark.parametrize("k", [1, 2, 3])
def test_recoding_preserves_values(k):
    g = random_transitive(3, 1)
    phi = random_potential(g, (0, 2), 8)
    hg, code = higher_block(g, k)
    rec = recode_potential(phi, k, (hg, code))
    assert rec.window == (0, max(0, 2 - k + 1))
    for w in g.words(6):
        bw = code.encode(w)
        assert rec(bw[:rec.size]) == phi(w[:3])


def test_variation_envelope():
    g = full_shift("ab")
    phi = LocallyConstantPotential(g, (0, 2), {w: 0.5 ** w.count("b") for w in g.words(3)}, declared_theta=0.5)
    C, theta = variation_envelope(phi)
    assert theta == 0.5
    for n in (2, 3):
        assert var_n(phi, n) <= C * theta ** n + 1e-15
    with pytest.raises(PotentialError):
        variation_envelope(constant_potential(g))
