"""Cyclic classes of a periodic shift as a finite rotation factor.

For a transitive graph of period ``p`` the map ``x -> class of x_0`` sends the
shift onto the rotation ``i -> i + 1 mod p``. Conditioning the equilibrium
measure on one class gives a ``sigma**p``-invariant Markov measure on the
power graph of that class; the checks here verify the bookkeeping around
that decomposition (masses, entropies, pressures, cylinder identities).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .graph import DirectedGraph, GraphError, is_transitive, power_graph, spectral_decomposition
from .potentials import LocallyConstantPotential, PotentialError, birkhoff_potential, widen
from .rpf import MarkovMeasure, entropy, solve_rpf


def _vertex_measure(g: DirectedGraph, mu: MarkovMeasure) -> MarkovMeasure:
    """``mu`` with states relabelled as vertices of ``g`` (1-tuples are unwrapped)."""
    states = tuple(s[0] if isinstance(s, tuple) and len(s) == 1 and s[0] in g else s for s in mu.states)
    if set(states) != set(g.vertices):
        raise ValueError("measure states are not the vertices of the graph; "
                         "pass the block graph the measure was built on")
    order = [states.index(v) for v in g.vertices]
    return MarkovMeasure(g.vertices, mu.pi[order], mu.P[np.ix_(order, order)])


@dataclass
class RotationFactor:
    """Rotation factor of ``(sigma, mu)`` and the class-conditioned measures.

    ``mu_i[i]`` is the chain on the vertices of ``power_graphs[i]`` (words of
    ``p`` symbols starting in class ``i``) describing ``mu(. | X_i)`` under
    ``sigma**p``. ``class_mass[i]`` is ``mu(X_i)``.
    """

    p: int
    class_of: dict
    classes: tuple
    power_graphs: list
    mu_i: list
    class_mass: np.ndarray
    base: MarkovMeasure = field(repr=False)

    def conditioned_cylinder(self, i: int, word) -> float:
        """``mu_i[word]`` for a word at coordinate 0, computed on the power chain."""
        word = tuple(word)
        if self.class_of[word[0]] != i:
            return 0.0
        p, chain = self.p, self.mu_i[i]
        blocks = -(-len(word) // p)
        # forward pass over power-graph paths whose concatenation starts with word
        def fits(state, b):
            seg = word[b * p:(b + 1) * p]
            return state[:len(seg)] == seg

        vec = np.array([chain.pi[j] if fits(s, 0) else 0.0 for j, s in enumerate(chain.states)])
        for b in range(1, blocks):
            mask = np.array([1.0 if fits(s, b) else 0.0 for s in chain.states])
            vec = (vec @ chain.P) * mask
        return float(vec.sum())


def build_rotation_factor(g: DirectedGraph, mu: MarkovMeasure) -> RotationFactor:
    """Split ``mu`` along the cyclic classes of ``g``.

    Raises
    ------
    GraphError
        If ``g`` is not transitive.
    """
    if not is_transitive(g):
        raise GraphError("rotation factor needs a transitive graph")
    mu = _vertex_measure(g, mu)
    dec = spectral_decomposition(g)
    p = dec.period
    class_of = {v: dec.class_of(v) for v in g.vertices}
    mass = np.zeros(p)
    for v in g.vertices:
        mass[class_of[v]] += mu.pi[mu.index(v)]

    pgs, chains = [], []
    for i in range(p):
        pg = power_graph(g, dec, i)
        states = pg.vertices
        head = np.array([mu.cylinder(w) for w in states])
        n = len(states)
        Pi = np.zeros((n, n))
        for a, w in enumerate(states):
            for b, w2 in enumerate(states):
                if pg.has_edge(w, w2):
                    t = mu.index(w2[0])
                    Pi[a, b] = mu.P[mu.index(w[-1]), t] * head[b] / mu.pi[t]
        chains.append(MarkovMeasure(states, head / mass[i], Pi))
        pgs.append(pg)
    return RotationFactor(p, class_of, dec.classes, pgs, chains, mass, mu)


def entropy_identity_check(rf: RotationFactor, mu: MarkovMeasure) -> tuple[list[float], float]:
    """``([h(mu_i, sigma**p) for each i], p * h(mu, sigma))``."""
    return [entropy(c) for c in rf.mu_i], rf.p * entropy(mu)


def _power_potential(g: DirectedGraph, pg: DirectedGraph, psi: LocallyConstantPotential,
                     p: int) -> LocallyConstantPotential:
    """``psi_p = psi + ... + psi o sigma**(p-1)`` read on the power graph."""
    l, r = psi.window
    if l < 0:
        raise PotentialError("power potential needs a one-sided potential; reduce it first")
    base = birkhoff_potential(widen(psi, (0, r)), p)
    reach = base.window[1] + 1
    span = -(-reach // p)
    values = {}
    for W in pg.words(span):
        flat = tuple(s for block in W for s in block)
        values[W] = base(flat[:reach])
    return LocallyConstantPotential(pg, (0, span - 1), values)


def power_potential_pressure_check(g: DirectedGraph, psi: LocallyConstantPotential) -> tuple[float, list[float]]:
    """``(p * P(psi), [P(psi_p on power graph i) for each class i])``."""
    if psi.graph != g:
        raise PotentialError("potential lives on a different graph")
    dec = spectral_decomposition(g)
    p = dec.period
    base = solve_rpf(g, psi).pressure
    out = []
    for i in range(p):
        pg = power_graph(g, dec, i)
        out.append(solve_rpf(pg, _power_potential(g, pg, psi, p)).pressure)
    return p * base, out


@dataclass
class WitnessReport:
    index_process: bool
    pushforward: list
    pushforward_ok: bool
    return_entropy: float
    target_entropy: float
    entropy_ok: bool
    words_checked: int

    @property
    def passed(self) -> bool:
        return self.index_process and self.pushforward_ok and self.entropy_ok


def product_structure_witness(rf: RotationFactor, mu: MarkovMeasure, max_len: int = 6,
                              tol: float = 1e-9) -> WitnessReport:
    """Check the rotation bookkeeping.

    (i) class indices advance by one along every admissible word of length
    up to ``max_len``; (ii) each class has mass ``1/p``; (iii) the return
    chain on class 0 has entropy ``p * h(mu)``.
    """
    g = rf.base.graph()
    ok, count = True, 0
    for L in range(1, max_len + 1):
        for w in g.words(L):
            count += 1
            c0 = rf.class_of[w[0]]
            if any(rf.class_of[w[t]] != (c0 + t) % rf.p for t in range(L)):
                ok = False
    push = [float(m) for m in rf.class_mass]
    push_ok = all(abs(m - 1.0 / rf.p) <= tol for m in push)
    h0, target = entropy(rf.mu_i[0]), rf.p * entropy(mu)
    return WitnessReport(ok, push, push_ok, h0, target, math.isclose(h0, target, rel_tol=0, abs_tol=tol), count)
