"""Ruelle transfer operator on finite one-sided Markov shifts.

A one-sided locally constant potential is recoded to a nearest-neighbour
potential on a higher-block graph, where the transfer operator becomes the
matrix ``B(a, b) = A(a, b) exp(phi(a, b))`` acting on functions of the first
block by ``(L F)(b) = sum_a B(a, b) F(a)``. The RPF data are then

* ``h``: ``L h = lam h``, i.e. ``B.T @ h = lam * h`` (left Perron vector of B),
* ``nu``: ``L* nu = lam nu``, i.e. ``B @ nu = lam * nu`` (right Perron vector),
* ``lam``: the Perron root, ``log lam`` being the Gurevich pressure,

normalised by ``sum(nu) = 1`` and ``sum(h * nu) = 1``. The equilibrium measure
``h dnu`` is the Markov chain with ``pi = h * nu`` and
``P(a, b) = B(a, b) nu(b) / (lam nu(a))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .graph import BlockCode, DirectedGraph, GraphError, higher_block, is_transitive
from .potentials import (LocallyConstantPotential, PotentialError, constant_potential,
                         recode_potential, widen)


class ConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class TransferMatrix:
    """Nearest-neighbour form of a one-sided potential.

    ``potential`` is the recoded potential with window (0, 1) on ``graph``,
    the ``k``-block graph of the original; ``B`` is indexed by ``states``.
    """

    original: LocallyConstantPotential
    k: int
    graph: DirectedGraph
    code: BlockCode
    potential: LocallyConstantPotential
    B: np.ndarray

    @property
    def states(self) -> tuple:
        return self.graph.vertices

    def apply(self, F: np.ndarray, n: int = 1) -> np.ndarray:
        """``L**n F`` for a function of the first block, as a vector."""
        out = np.asarray(F, dtype=float)
        for _ in range(n):
            out = self.B.T @ out
        return out


def transfer_matrix(phi: LocallyConstantPotential, block_length: int | None = None) -> TransferMatrix:
    """Recode a one-sided potential so that it reads two neighbouring blocks.

    A potential with window ``(0, r)`` is recoded on ``k = max(r, 1)``-blocks
    unless a larger ``block_length`` is requested.
    """
    if not phi.one_sided:
        raise PotentialError("the transfer operator needs a one-sided potential (window l >= 0)")
    r = max(phi.window[1], 1)
    k = r if block_length is None else block_length
    if k < r:
        raise PotentialError(f"block length {k} is too short for window {phi.window}")
    wide = widen(phi, (0, k))
    hg, code = higher_block(phi.graph, k)
    rec = recode_potential(wide, k, (hg, code))
    idx = {s: i for i, s in enumerate(hg.vertices)}
    B = np.zeros((len(idx), len(idx)))
    for (a, b), v in rec.table.items():
        B[idx[a], idx[b]] = math.exp(float(v))
    return TransferMatrix(phi, k, hg, code, rec, B)


def apply_L(phi: LocallyConstantPotential, F: Mapping, n: int = 1) -> dict:
    """``L_phi**n F`` by repeated summation over one-step preimages.

    ``F`` maps every admissible word of some fixed length ``d`` of
    ``phi.graph`` to a number (a function of the first ``d`` coordinates).
    Each step sums ``exp(phi(a x)) F(a x)`` over the symbols ``a`` with
    ``a -> x_0``; the result is keyed by admissible words of the length
    needed to determine it, ``max(d - n, r, 1)`` for a window ``(l, r)``.
    """
    if not phi.one_sided:
        raise PotentialError("the transfer operator needs a one-sided potential (window l >= 0)")
    if n < 1:
        raise PotentialError("n must be positive")
    g = phi.graph
    lengths = {len(w) for w in F}
    if len(lengths) != 1:
        raise PotentialError("F must be keyed by words of one common length")
    d = lengths.pop()
    cur = {tuple(w): float(v) for w, v in F.items()}
    missing = [w for w in g.words(d) if w not in cur]
    if missing:
        raise PotentialError(f"F is undefined on {missing[0]!r}")
    l, r = phi.window
    weight = {w: math.exp(float(v)) for w, v in phi.table.items()}
    for _ in range(n):
        e = max(d - 1, r, 1)
        new = {}
        for x in g.words(e):
            total = 0.0
            for a in g.predecessors(x[0]):
                y = (a,) + x
                total += weight[y[l:r + 1]] * cur[y[:d]]
            new[x] = total
        cur, d = new, e
    return cur


def _perron(M: np.ndarray, x0: np.ndarray, tol: float, max_iter: int) -> tuple[float, np.ndarray, int]:
    """Perron root and vector of an irreducible nonnegative matrix.

    Power iteration on ``M + I``, which has the same Perron vector and is
    primitive whatever the period of ``M``.
    """
    S = M + np.eye(len(M))
    x = np.asarray(x0, dtype=float)
    if x.shape != (len(M),) or np.any(x <= 0):
        raise ValueError("initial vector must be strictly positive with one entry per state")
    x = x / x.sum()
    for it in range(1, max_iter + 1):
        y = S @ x
        y /= y.sum()
        Mx = M @ y
        lam = Mx.sum() / y.sum()
        if np.max(np.abs(Mx - lam * y)) <= tol * lam * np.max(y):
            return lam, y, it
        x = y
    raise ConvergenceError(f"power iteration did not reach relative residual {tol:g} in {max_iter} steps")


def _polish(M: np.ndarray, lam: float, x: np.ndarray) -> np.ndarray:
    """One inverse-iteration step shifted just past ``lam``; power iteration stalls near 1e-13."""
    try:
        y = np.linalg.solve(M - lam * (1 + 1e-12) * np.eye(len(M)), x)
    except np.linalg.LinAlgError:
        return x
    y = y / y.sum()
    if not np.all(y > 0) or not np.all(np.isfinite(y)):
        return x
    return y


@dataclass
class RpfSolution:
    """Perron data of ``L_phi`` on the recoded alphabet ``states``."""

    graph: DirectedGraph
    phi: LocallyConstantPotential
    transfer: TransferMatrix
    lam: float
    h: np.ndarray
    nu: np.ndarray
    phi_star: LocallyConstantPotential
    iterations: tuple[int, int]
    convergence: np.ndarray = field(repr=False)

    @property
    def pressure(self) -> float:
        return math.log(self.lam)

    @property
    def states(self) -> tuple:
        return self.transfer.states

    def h_map(self) -> dict:
        return dict(zip(self.states, self.h))

    def nu_map(self) -> dict:
        return dict(zip(self.states, self.nu))

    def residuals(self) -> dict:
        """Relative residuals of the identities the solution must satisfy."""
        B, lam, h, nu = self.transfer.B, self.lam, self.h, self.nu
        Q = np.zeros_like(B)
        for (a, b), v in self.phi_star.table.items():
            Q[self.transfer.graph.index(a), self.transfer.graph.index(b)] = math.exp(v)
        return {
            "L_h": float(np.max(np.abs(B.T @ h - lam * h)) / np.max(np.abs(lam * h))),
            "L_star_nu": float(np.sum(np.abs(B @ nu - lam * nu)) / np.sum(np.abs(lam * nu))),
            "h_dnu": abs(float(h @ nu) - 1.0),
            "L_star_1": float(np.max(np.abs(Q.T @ np.ones(len(h)) - 1.0))),
        }


def convergence_profile(B: np.ndarray, lam: float, h: np.ndarray, nu: np.ndarray, n_max: int = 20) -> np.ndarray:
    """``max_{a,b} |lam**-n L**n 1_[a](b) - nu[a] h(b)|`` for ``n = 1..n_max``.

    ``(L**n 1_[a])`` restricted to ``[b]`` is ``(B**n)[a, b]``.
    """
    limit = np.outer(nu, h)
    out = np.empty(n_max)
    Bn = np.eye(len(B))
    Bs = B / lam
    for n in range(n_max):
        Bn = Bn @ Bs
        out[n] = np.max(np.abs(Bn - limit))
    return out


def solve_rpf(g: DirectedGraph, phi: LocallyConstantPotential, init: np.ndarray | None = None,
              tol: float = 1e-13, max_iter: int = 100_000) -> RpfSolution:
    """RPF eigendata ``(lam, h, nu)`` and the normalised potential ``phi*``.

    Parameters
    ----------
    g : DirectedGraph
        Transitive graph carrying ``phi``.
    phi : LocallyConstantPotential
        One-sided potential on ``g``.
    init : ndarray, optional
        Positive starting vector for both power iterations (default uniform).

    Returns
    -------
    RpfSolution
        ``phi*(a, b) = phi(a, b) + log h(a) - log h(b) - log lam`` on the
        recoded alphabet, so that ``L_{phi*} 1 = 1``.
    """
    if phi.graph != g:
        raise PotentialError("potential is defined on a different graph")
    if not is_transitive(g):
        raise GraphError("RPF data are unique only on transitive graphs")
    tm = transfer_matrix(phi)
    n = len(tm.states)
    x0 = np.ones(n) if init is None else np.asarray(init, dtype=float)
    lam_r, nu, it_r = _perron(tm.B, x0, tol, max_iter)
    lam_l, h, it_l = _perron(tm.B.T, x0, tol, max_iter)
    # two-sided Rayleigh quotient: error is quadratic in the vector errors
    lam = float(h @ tm.B @ nu) / float(h @ nu)
    nu = _polish(tm.B, lam, nu)
    h = _polish(tm.B.T, lam, h)
    lam = float(h @ tm.B @ nu) / float(h @ nu)
    nu = nu / nu.sum()
    h = h / (h @ nu)

    idx = {s: i for i, s in enumerate(tm.states)}
    log_lam = math.log(lam)
    star = {(a, b): float(v) + math.log(h[idx[a]]) - math.log(h[idx[b]]) - log_lam
            for (a, b), v in tm.potential.table.items()}
    phi_star = LocallyConstantPotential(tm.graph, (0, 1), star)
    prof = convergence_profile(tm.B, lam, h, nu, 20)
    return RpfSolution(g, phi, tm, lam, h, nu, phi_star, (it_r, it_l), prof)


class MarkovMeasure:
    """Stationary Markov chain on the states of a (recoded) graph.

    Parameters
    ----------
    states : sequence
        State labels; for ``block_length > 1`` each state is a block of
        ``block_length`` original symbols.
    pi : array_like
        Stationary probability vector.
    P : array_like
        Row-stochastic transition matrix.
    block_length : int
        Length of the original words the states stand for.
    """

    def __init__(self, states: Sequence, pi, P, block_length: int = 1):
        self.states = tuple(states)
        self.pi = np.asarray(pi, dtype=float)
        self.P = np.asarray(P, dtype=float)
        self.block_length = block_length
        self._index = {s: i for i, s in enumerate(self.states)}
        n = len(self.states)
        if self.pi.shape != (n,) or self.P.shape != (n, n):
            raise ValueError("pi and P do not match the number of states")

    def __repr__(self) -> str:
        return f"MarkovMeasure(|states|={len(self.states)}, block_length={self.block_length})"

    @classmethod
    def from_transition(cls, states: Sequence, P, block_length: int = 1) -> "MarkovMeasure":
        """Chain with the stationary vector of an irreducible stochastic ``P``."""
        P = np.asarray(P, dtype=float)
        n = len(P)
        lhs = np.vstack([P.T - np.eye(n), np.ones(n)])
        rhs = np.zeros(n + 1)
        rhs[-1] = 1.0
        pi = np.linalg.lstsq(lhs, rhs, rcond=None)[0]
        return cls(states, pi, P, block_length)

    def index(self, s) -> int:
        try:
            return self._index[s]
        except KeyError:
            raise ValueError(f"unknown state {s!r}") from None

    def graph(self) -> DirectedGraph:
        """Support graph: an edge wherever ``P > 0``."""
        n = len(self.states)
        edges = [(self.states[i], self.states[j]) for i in range(n) for j in range(n) if self.P[i, j] > 0]
        return DirectedGraph(self.states, edges)

    def cylinder(self, seq: Sequence) -> float:
        """``mu[s_0 .. s_{n-1}] = pi(s_0) prod P(s_i, s_{i+1})`` for a state word."""
        idx = [self.index(s) for s in seq]
        if not idx:
            return 1.0
        out = self.pi[idx[0]]
        for i, j in zip(idx, idx[1:]):
            out *= self.P[i, j]
        return float(out)

    def word_measure(self, word: Sequence) -> float:
        """Measure of the cylinder ``[word]`` of original symbols at coordinate 0."""
        word = tuple(word)
        k = self.block_length
        if k == 1:
            return self.cylinder(word)
        if len(word) >= k:
            return self.cylinder([word[j:j + k] for j in range(len(word) - k + 1)])
        return float(sum(self.pi[i] for i, s in enumerate(self.states) if tuple(s[:len(word)]) == word))

    def backward_potential(self) -> LocallyConstantPotential:
        """``log(pi(a) P(a, b) / pi(b))``: the normalised potential of the chain."""
        g = self.graph()
        vals = {}
        for a, b in g.edges:
            i, j = self._index[a], self._index[b]
            vals[(a, b)] = math.log(self.pi[i] * self.P[i, j] / self.pi[j])
        return LocallyConstantPotential(g, (0, 1), vals)

    def is_stationary(self, tol: float = 1e-12) -> bool:
        return bool(np.max(np.abs(self.pi @ self.P - self.pi)) <= tol and abs(self.pi.sum() - 1) <= tol)


def equilibrium_measure(sol: RpfSolution) -> MarkovMeasure:
    B, lam, h, nu = sol.transfer.B, sol.lam, sol.h, sol.nu
    P = B * nu[None, :] / (lam * nu[:, None])
    return MarkovMeasure(sol.states, h * nu, P, sol.transfer.k)


def entropy(m: MarkovMeasure) -> float:
    """Kolmogorov-Sinai entropy ``-sum pi(a) P(a, b) log P(a, b)``."""
    P = m.P
    logs = np.zeros_like(P)
    pos = P > 0
    logs[pos] = np.log(P[pos])
    return float(-np.sum(m.pi[:, None] * P * logs)) + 0.0


def pressure_functional(m: MarkovMeasure, phi: LocallyConstantPotential) -> float:
    """``h_m(sigma) + integral phi dm`` for a Markov measure on phi's shift."""
    tm = transfer_matrix(phi, m.block_length)
    if tuple(tm.states) != m.states:
        raise ValueError("measure states do not match the recoded alphabet of the potential")
    n = len(m.states)
    integral = 0.0
    for i in range(n):
        for j in range(n):
            if m.P[i, j] <= 0:
                continue
            a, b = m.states[i], m.states[j]
            if not tm.graph.has_edge(a, b):
                raise ValueError(f"measure charges the non-edge {a!r} -> {b!r}")
            integral += m.pi[i] * m.P[i, j] * float(tm.potential((a, b)))
    return entropy(m) + integral


def parry_measure(g: DirectedGraph) -> tuple[MarkovMeasure, float]:
    """Measure of maximal entropy and the topological entropy ``log lam(A)``."""
    sol = solve_rpf(g, constant_potential(g, 0.0))
    mu = equilibrium_measure(sol)
    return mu, entropy(mu)


def truncation_pressure_sequence(gs: Sequence[DirectedGraph],
                                 phi: LocallyConstantPotential | None = None) -> list[float]:
    """Pressures ``log lam_i`` along nested transitive graphs ``gs[0] <= gs[1] <= ...``.

    ``phi`` lives on the largest graph and is restricted to each member.
    """
    gs = list(gs)
    if not gs:
        raise ValueError("empty graph sequence")
    for a, b in zip(gs, gs[1:]):
        if not a.is_subgraph_of(b):
            raise GraphError("graph sequence is not nested")
    if phi is None:
        phi = constant_potential(gs[-1], 0.0)
    elif phi.graph != gs[-1]:
        raise PotentialError("potential must live on the largest graph")
    return [solve_rpf(g, phi.restrict(g)).pressure for g in gs]
