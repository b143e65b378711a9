from math import gcd

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from thermoshift import (DirectedGraph, GraphError, cycle_graph, full_shift, higher_block, is_transitive, period,
                         power_graph, reaches, spectral_decomposition, transitive_components)

from _systems import golden_mean, period2, periodic_graph, random_transitive, two_cycle


def cycle_gcd(g: DirectedGraph) -> int:
    """gcd of all closed-walk lengths up to 2|V|, read off the adjacency powers."""
    A = g.adjacency()
    M = np.eye(len(A))
    out = 0
    for n in range(1, 2 * len(A) + 1):
        M = (M @ A > 0).astype(float)
        if np.trace(M) > 0:
            out = gcd(out, n)
    return out


@st.composite
def small_graphs(draw):
    n = draw(st.integers(1, 5))
    names = [f"s{i}" for i in range(n)]
    edges = draw(st.sets(st.tuples(st.sampled_from(names), st.sampled_from(names)), min_size=1, max_size=n * n))
    try:
        return DirectedGraph(names, edges)
    except GraphError:
        return DirectedGraph(["s0"], [("s0", "s0")])


def test_pruning_removes_dead_ends():
    g = DirectedGraph(["a", "b", "c", "d"], [("a", "b"), ("b", "a"), ("b", "c"), ("d", "a")])
    assert g.vertices == ("a", "b")
    assert set(g.removed) == {"c", "d"}


def test_empty_after_pruning_is_rejected():
    with pytest.raises(GraphError):
        DirectedGraph(["a", "b"], [("a", "b")])


def test_unknown_vertex_in_edge():
    with pytest.raises(GraphError, match="unknown vertex"):
        DirectedGraph(["a"], [("a", "z")])


def test_duplicate_vertices():
    with pytest.raises(GraphError):
        DirectedGraph(["a", "a"], [("a", "a")])


def test_words_are_lexicographic_and_admissible():
    g = golden_mean()
    words = list(g.words(3))
    assert words == sorted(words)
    assert words == [("a", "a", "a"), ("a", "a", "b"), ("a", "b", "a"), ("b", "a", "a"), ("b", "a", "b")]
    assert all(g.is_admissible(w) for w in words)


def test_reaches_exact_length():
    g = two_cycle()
    assert reaches(g, "a", "b", 1) and not reaches(g, "a", "b", 2)
    assert reaches(g, "a", "a", 4)


@pytest.mark.parametrize("g,p", [(full_shift(["x", "y"]), 1), (golden_mean(), 1), (two_cycle(), 2),
                                 (cycle_graph(list("abcde")), 5), (period2(), 2)])
def test_period_known_cases(g, p):
    assert period(g) == p


@pytest.mark.parametrize("seed", range(10))
def test_period_matches_cycle_gcd(seed):
    g = random_transitive(5, seed, density=0.15)
    assert period(g) == cycle_gcd(g)


@pytest.mark.parametrize("p", [2, 3, 4])
def test_layered_graphs(p):
    g = periodic_graph(p, seed=p)
    assert period(g) == cycle_gcd(g) == p


def test_period_needs_transitivity():
    g = DirectedGraph(["a", "b"], [("a", "a"), ("a", "b"), ("b", "b")])
    assert not is_transitive(g)
    with pytest.raises(GraphError):
        period(g)


def test_components_of_reducible_graph():
    g = DirectedGraph(list("abcd"), [("a", "a"), ("a", "b"), ("b", "c"), ("c", "b"), ("c", "d"), ("d", "d")])
    comps = transitive_components(g)
    assert [c.vertices for c in comps] == [("a",), ("b", "c"), ("d",)]
    assert all(is_transitive(c) for c in comps)


@given(small_graphs())
@settings(max_examples=60, deadline=None)
def test_spectral_classes_partition_and_rotate(g):
    for comp in transitive_components(g):
        dec = spectral_decomposition(comp)
        assert dec.period == cycle_gcd(comp)
        assert set().union(*dec.classes) == set(comp.vertices)
        assert sum(len(c) for c in dec.classes) == len(comp)
        assert comp.vertices[0] in dec.classes[0]
        for u, v in comp.edges:
            assert dec.class_of(v) == (dec.class_of(u) + 1) % dec.period


@pytest.mark.parametrize("p", [2, 3, 4])
def test_power_graph_is_mixing_and_counts_paths(p):
    g = periodic_graph(p, seed=10 + p)
    dec = spectral_decomposition(g)
    for i in range(p):
        pg = power_graph(g, dec, i)
        assert is_transitive(pg) and period(pg) == 1
        # each power-graph path of length n spells a g-path of length n * p + p - 1
        for n in (1, 2):
            spelled = {tuple(s for block in w for s in block) for w in pg.words(n + 1)}
            direct = {w for w in g.words((n + 1) * p) if dec.class_of(w[0]) == i}
            assert spelled == direct


def test_power_graph_of_period2_example():
    g = period2()
    dec = spectral_decomposition(g)
    pg = power_graph(g, dec, 0)
    assert pg.vertices == (("a", "b"), ("a", "c"))
    assert len(pg.edges) == 4


def test_power_graph_index_range():
    g = two_cycle()
    with pytest.raises(GraphError):
        power_graph(g, spectral_decomposition(g), 2)


def test_higher_block_round_trip():
    g = golden_mean()
    hg, code = higher_block(g, 2)
    assert hg.vertices == (("a", "a"), ("a", "b"), ("b", "a"))
    for w in g.words(6):
        assert code.decode(code.encode(w)) == w
        assert hg.is_admissible(code.encode(w))
    with pytest.raises(GraphError):
        code.encode(("a",))
    with pytest.raises(GraphError):
        code.decode([("a", "b"), ("a", "a")])


@given(small_graphs(), st.integers(1, 3))
@settings(max_examples=40, deadline=None)
def test_higher_block_counts_words(g, k):
    hg, code = higher_block(g, k)
    for n in (1, 2):
        assert len(list(hg.words(n))) == len(list(g.words(n + k - 1)))
