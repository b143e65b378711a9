"""Gibbs product bounds and weak Bernoulli statistics for Markov measures.

Everything is exact linear algebra on the chain: cylinder measures are
products ``pi(s_0) P(s_0, s_1) ...`` and correlations across a gap of ``k``
steps go through ``P**k``. Nothing is sampled.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .potentials import LocallyConstantPotential, birkhoff_potential, var_n
from .rpf import ConvergenceError, MarkovMeasure

DELTA_0 = 0.35


def _sup_variation(phi_star: LocallyConstantPotential, offset: int) -> float:
    # sup_n var_{n+offset}(phi*_n); constant for n >= window reach, so n <= max(r, 1) suffices
    reach = max(phi_star.window[1], 1)
    return max(float(var_n(birkhoff_potential(phi_star, n), n + offset)) for n in range(1, reach + 1))


def distortion_constant(phi_star: LocallyConstantPotential) -> float:
    """``M = exp(sup_{n >= 1} var_{n+1} phi*_n)`` for a one-sided finite-range ``phi*``.

    Equals 1 whenever ``phi*`` reads at most two coordinates.
    """
    return math.exp(_sup_variation(phi_star, 1))


def averaging_distortion(phi_star: LocallyConstantPotential) -> float:
    """``exp(sup_{n >= 1} var_n phi*_n)``.

    Bounds ``exp(phi*_n(a, y) - phi*_n(a, z))`` for ``y, z`` that only share
    the constraint of following ``a``; this is the distortion the Gibbs
    product bound needs, and it dominates :func:`distortion_constant`.
    """
    return math.exp(_sup_variation(phi_star, 0))


def _follower_mass(mu: MarkovMeasure) -> np.ndarray:
    """``mu(sigma[a]) = sum of pi(b) over the successors b of a``."""
    return (mu.P > 0).astype(float) @ mu.pi


def gibbs_constant(mu: MarkovMeasure, s_star: Iterable, M: float) -> tuple[float, float, float]:
    """``(C*, C*_1, C*_2)`` with ``C*_1 = max M / mu(sigma[a])`` and ``C*_2 = max M / mu[a]`` over S*."""
    idx = [mu.index(s) for s in s_star]
    if not idx:
        raise ValueError("S* must be nonempty")
    follow = _follower_mass(mu)
    c1 = max(M / follow[i] for i in idx)
    c2 = max(M / mu.pi[i] for i in idx)
    return float(max(c1, c2)), float(c1), float(c2)


@dataclass
class GibbsCertificate:
    """Outcome of :func:`gibbs_ratio_bounds`.

    ``c_star`` is the a-priori constant built from ``m_average``; the same
    formula with ``m_const`` in place of ``m_average`` gives ``c_star_m``.
    ``observed`` holds the smallest and largest ratio met, ``worst_pair``
    the ``(case, a, c)`` whose ratio is farthest from 1 on a log scale.
    """

    s_star: tuple
    c_star: float
    c1: float
    c2: float
    m_const: float
    m_average: float
    c_star_m: float
    observed: tuple[float, float]
    worst_pair: tuple
    n_pairs: int

    @property
    def c_star_observed(self) -> float:
        lo, hi = self.observed
        return max(hi, 1.0 / lo)

    def holds(self, rtol: float = 1e-12) -> bool:
        lo, hi = self.observed
        return lo >= (1 - rtol) / self.c_star and hi <= (1 + rtol) * self.c_star


def _word_tables(mu: MarkovMeasure, max_len: int):
    g = mu.graph()
    out = {}
    for L in range(1, max_len + 1):
        words = list(g.words(L))
        first = np.array([mu.index(w[0]) for w in words])
        last = np.array([mu.index(w[-1]) for w in words])
        meas = np.array([mu.cylinder(w) for w in words])
        out[L] = (words, first, last, meas)
    return out


def gibbs_ratio_bounds(mu: MarkovMeasure, s_star: Iterable | None = None, max_len: int = 3,
                       phi_star: LocallyConstantPotential | None = None) -> GibbsCertificate:
    """Check ``1/C* <= mu[a, c] / (mu[a] mu[c]) <= C*`` over all short cylinders.

    Case (1): the last symbol of ``a`` lies in S* and ``[a, c]`` is nonempty.
    Case (2): the first symbol of ``a`` lies in S* and ``[c, a]`` is nonempty.
    All words of lengths ``1..max_len`` are enumerated.
    """
    s_star = tuple(mu.states) if s_star is None else tuple(s_star)
    star_idx = {mu.index(s) for s in s_star}
    if phi_star is None:
        phi_star = mu.backward_potential()
    m_const = distortion_constant(phi_star)
    m_avg = averaging_distortion(phi_star)
    c_star, c1, c2 = gibbs_constant(mu, s_star, m_avg)
    c_star_m = gibbs_constant(mu, s_star, m_const)[0]

    tables = _word_tables(mu, max_len)
    adj = mu.P > 0
    in_star = np.zeros(len(mu.states), dtype=bool)
    in_star[list(star_idx)] = True
    lo, hi, worst, worst_dev, count = math.inf, -math.inf, None, -1.0, 0
    for La in range(1, max_len + 1):
        wa, fa, la, ma = tables[La]
        for Lc in range(1, max_len + 1):
            wc, fc, lc, mc = tables[Lc]
            # mu[x y] = mu[x] P(x_last, y_0) mu[y] / pi(y_0), so ratio = P(x_last, y_0) / pi(y_0)
            for case in (1, 2):
                if case == 1:
                    ok = in_star[la][:, None] & adj[la][:, fc]
                    ratio = mu.P[la][:, fc] / mu.pi[fc][None, :]
                else:
                    ok = in_star[fa][:, None] & adj[lc][:, fa].T
                    ratio = mu.P[lc][:, fa].T / mu.pi[fa][:, None]
                if not ok.any():
                    continue
                r = ratio[ok]
                count += r.size
                lo, hi = min(lo, r.min()), max(hi, r.max())
                dev = np.abs(np.log(np.where(ok, ratio, 1.0)))
                i, j = np.unravel_index(np.argmax(dev), dev.shape)
                if dev[i, j] > worst_dev:
                    worst_dev = dev[i, j]
                    worst = (case, wa[i], wc[j])
    if count == 0:
        raise ValueError("no cylinder pair satisfies the S* condition")
    return GibbsCertificate(s_star, c_star, c1, c2, m_const, m_avg, c_star_m, (float(lo), float(hi)),
                            worst, count)


def _partition(mu: MarkovMeasure, v_prime: Iterable | None) -> list[np.ndarray]:
    n = len(mu.states)
    if v_prime is None:
        return [np.eye(n)[i] for i in range(n)]
    chosen = sorted({mu.index(v) for v in v_prime})
    cells = [np.eye(n)[i] for i in chosen]
    rest = np.ones(n)
    rest[chosen] = 0.0
    if rest.any():
        cells.append(rest)
    return cells


def _past_vectors(mu: MarkovMeasure, cells, n: int) -> np.ndarray:
    """``alpha_A(x) = mu(A and x_0 = x)`` for the cells' words on coordinates ``-n..0``."""
    cur = [mu.pi * c for c in cells]
    cur = [v for v in cur if v.any()]
    for _ in range(n):
        cur = [w for v in cur for c in cells for w in [(v @ mu.P) * c] if w.any()]
    return np.array(cur)


def _future_vectors(mu: MarkovMeasure, cells, n: int) -> np.ndarray:
    """``beta_B(y) = mu(B | x_k = y)`` for the cells' words on coordinates ``k..k+n``."""
    cur = [c.copy() for c in cells]
    for _ in range(n):
        cur = [w for v in cur for c in cells for w in [c * (mu.P @ v)] if w.any()]
    return np.array([v for v in cur if v.any()])


def wb_cell(mu: MarkovMeasure, n: int, k: int, v_prime: Iterable | None = None) -> float:
    """``sum_{A, B} |mu(A and B) - mu(A) mu(B)|`` for one ``(n, k)``.

    ``A`` runs over the join of the partition on coordinates ``-n..0`` and
    ``B`` over its join on ``k..k+n``. The partition is the 1-cylinder
    partition, or with ``v_prime`` the cells ``[v]`` (``v`` in ``v_prime``)
    plus one cell for all remaining states.
    """
    if k < 1:
        raise ValueError("k must be at least 1, otherwise the windows overlap")
    return _wb_row(mu, _partition(mu, v_prime), n, [k])[0]


def _wb_row(mu: MarkovMeasure, cells, n: int, ks) -> list[float]:
    """``WB(n, k)`` for every ``k`` in ``ks``, sharing the cylinder vectors."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    alpha = _past_vectors(mu, cells, n)
    beta = _future_vectors(mu, cells, n)
    prod = np.outer(alpha.sum(axis=1), beta @ mu.pi)
    out = []
    for k in ks:
        joint = (alpha @ np.linalg.matrix_power(mu.P, k)) @ beta.T
        out.append(float(np.abs(joint - prod).sum()))
    return out


def wb_bound(delta: float) -> float:
    return 2.0 * math.sinh(10.0 * delta) + 4.0 * delta


@dataclass
class WeakBernoulliReport:
    """Table of weak Bernoulli sums ``WB(n, k)``.

    ``K_delta`` is the smallest ``k`` from which every tabulated value stays
    below ``bound``, or None if the last column still fails.
    """

    partition_spec: tuple | None
    table: dict
    delta: float | None = None
    bound: float | None = None
    K_delta: int | None = None
    n_values: tuple = field(default=())
    k_values: tuple = field(default=())

    def rows(self):
        for (n, k), wb in sorted(self.table.items()):
            yield n, k, wb


def weak_bernoulli_statistic(mu: MarkovMeasure, v_prime: Iterable | None = None, n_max: int = 4,
                             k_max: int = 20, delta: float | None = None, workers: int = 1) -> WeakBernoulliReport:
    """Tabulate ``WB(n, k)`` for ``1 <= n <= n_max`` and ``1 <= k <= k_max``.

    ``workers > 1`` computes the rows for different ``n`` concurrently;
    results do not depend on it.
    """
    if n_max < 1 or k_max < 1:
        raise ValueError("n_max and k_max must be positive")
    spec = None if v_prime is None else tuple(sorted(v_prime))
    parts = _partition(mu, spec)
    ns, ks = range(1, n_max + 1), range(1, k_max + 1)
    # rows for different n are independent; each row reuses its cylinder vectors across k
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda n: _wb_row(mu, parts, n, ks), ns))
    else:
        rows = [_wb_row(mu, parts, n, ks) for n in ns]
    table = {(n, k): v for n, row in zip(ns, rows) for k, v in zip(ks, row)}
    report = WeakBernoulliReport(spec, table, n_values=tuple(range(1, n_max + 1)),
                                 k_values=tuple(range(1, k_max + 1)))
    if delta is not None:
        bound = wb_bound(delta)
        report.delta, report.bound = delta, bound
        K = None
        for k in range(k_max, 0, -1):
            if all(table[(n, k)] < bound for n in report.n_values):
                K = k
            else:
                break
        report.K_delta = K
    return report


def step1_pair_bound(mu: MarkovMeasure, cert: GibbsCertificate, A: Sequence, B: Sequence,
                     delta: float, k: int) -> tuple[float, float]:
    """``(|mu(A and B) - mu(A) mu(B)|, 2 sinh(10 delta) mu(A) mu(B))``.

    ``A`` is the state word on coordinates ``-n..0`` and ``B`` the one on
    ``k..k+n``; the last symbol of ``A`` and the first of ``B`` must be in S*.
    """
    A, B = tuple(A), tuple(B)
    if len(A) != len(B):
        raise ValueError("A and B must have the same length")
    if A[-1] not in cert.s_star or B[0] not in cert.s_star:
        raise ValueError("boundary symbols of A and B must lie in S*")
    if k < 1:
        raise ValueError("k must be at least 1")
    muA, muB = mu.cylinder(A), mu.cylinder(B)
    if muA == 0 or muB == 0:
        raise ValueError("A and B must be nonempty cylinders")
    Pk = np.linalg.matrix_power(mu.P, k)
    a, b = mu.index(A[-1]), mu.index(B[0])
    joint = muA * Pk[a, b] * muB / mu.pi[b]
    return abs(joint - muA * muB), 2.0 * math.sinh(10.0 * delta) * muA * muB


@dataclass
class KDeltaSearch:
    """Ingredients of the mixing threshold ``K(delta)``.

    ``gamma`` lists the chosen ``m``-cylinders (state words), ``reps`` their
    representative points (prefixes of the least admissible extension),
    ``pair_K`` the per-pair thresholds ``K(c, c')``.
    """

    K: int
    m: int
    delta: float
    gamma: list
    gamma_mass: float
    gamma_target: float
    reps: dict
    pair_K: dict
    c_star: float


def _least_extension(g, word: tuple, length: int) -> tuple:
    w = tuple(word)
    while len(w) < length:
        w = w + (g.successors(w[-1])[0],)
    return w


def search_K_delta(mu: MarkovMeasure, delta: float, gamma_mass: float | None = None,
                   k_cap: int = 10_000, settle: float = 1e-6) -> KDeltaSearch:
    """Find ``K(delta) = max K(c, c') + m`` for the normalised operator of ``mu``.

    ``K(c, c')`` is the first ``K`` with ``(L**k 1_[c])(x(c')) = exp(+-delta) mu[c]``
    for every later ``k``; "every later" is taken as every ``k`` up to the
    step where all pairs are within ``settle * delta`` of the limit.

    Raises
    ------
    ValueError
        If ``delta`` is not in ``(0, DELTA_0)``.
    ConvergenceError
        If the pairs have not settled after ``k_cap`` steps (not mixing enough).
    """
    if not 0 < delta < DELTA_0:
        raise ValueError(f"delta must lie in (0, {DELTA_0})")
    phi_star = mu.backward_potential()
    g = phi_star.graph
    m = 1
    while _sup_variation(phi_star, m) >= delta:
        m += 1
    c_star = gibbs_constant(mu, mu.states, averaging_distortion(phi_star))[0]
    target = math.exp(-delta / (2.0 * c_star ** 2)) if gamma_mass is None else gamma_mass

    words = sorted(g.words(m), key=lambda w: (-mu.cylinder(w), [mu.index(s) for s in w]))
    gamma, mass = [], 0.0
    for w in words:
        if mass >= target:
            break
        gamma.append(w)
        mass += mu.cylinder(w)
    reps = {c: _least_extension(g, c, m) for c in gamma}

    # e^{phi*(a, b)} = pi(a) P(a, b) / pi(b); the weights telescope along a word
    Q = mu.pi[:, None] * mu.P / mu.pi[None, :]
    n = len(mu.states)
    G = len(gamma)
    targets = np.array([mu.cylinder(c) for c in gamma])
    last_fail = np.full((G, G), -1)

    def prefix_weight(c, k):
        return mu.cylinder(c[:k + 1]) / mu.pi[mu.index(c[k])]

    # k < m - 1: L^k 1_[c](x) is the weight of c_0..c_k if x starts with c_k..c_{m-1}
    for k in range(m - 1):
        for i, c in enumerate(gamma):
            w = prefix_weight(c, k)
            for j, c2 in enumerate(gamma):
                val = w if reps[c2][:m - k] == c[k:] else 0.0
                if not val or abs(math.log(val / targets[i])) > delta:
                    last_fail[i, j] = k

    # from k = m - 1 on, L^k 1_[c] is a function of x_0 and evolves by F -> F Q
    F = np.zeros((G, n))
    for i, c in enumerate(gamma):
        F[i, mu.index(c[-1])] = prefix_weight(c, m - 1)
    rep_idx = np.array([mu.index(reps[c][0]) for c in gamma])
    k = m - 1
    while True:
        vals = F[:, rep_idx]
        with np.errstate(divide="ignore"):
            dev = np.abs(np.log(vals / targets[:, None]))
        last_fail[dev > delta] = k
        if np.all(dev < settle * delta):
            break
        k += 1
        if k > k_cap:
            raise ConvergenceError(f"L^k 1_[c] has not settled within {k_cap} steps at delta={delta}; "
                                   "the measure is not mixing enough")
        F = F @ Q
    pair_K = {(gamma[i], gamma[j]): int(last_fail[i, j] + 1)
              for i in range(len(gamma)) for j in range(len(gamma))}
    K = max(pair_K.values()) + m
    return KDeltaSearch(K, m, delta, gamma, mass, target, reps, pair_K, c_star)


def find_K_delta(mu: MarkovMeasure, delta: float, gamma_mass: float | None = None) -> int:
    return search_K_delta(mu, delta, gamma_mass).K
