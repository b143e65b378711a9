"""Words, cylinders and locally constant potentials on a Markov shift.

A :class:`Word` is a finite block of a point, pinned to a starting
coordinate. A :class:`LocallyConstantPotential` reads the coordinates
``l..r`` of a point and looks the resulting window word up in a table;
finite-range potentials are the class on which everything downstream is exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

from .graph import BlockCode, DirectedGraph, higher_block


class PotentialError(ValueError):
    pass


@dataclass(frozen=True)
class Word:
    """Finite word ``symbols`` occupying coordinates ``anchor, anchor + 1, ...``.

    One-sided words always start at coordinate 0.
    """

    symbols: tuple
    anchor: int = 0
    two_sided: bool = False

    def __post_init__(self):
        object.__setattr__(self, "symbols", tuple(self.symbols))
        if not self.symbols:
            raise PotentialError("a word needs at least one symbol")
        if not self.two_sided and self.anchor != 0:
            raise PotentialError("one-sided words are anchored at coordinate 0")

    def __len__(self) -> int:
        return len(self.symbols)

    @property
    def last(self) -> int:
        """Last coordinate covered by the word."""
        return self.anchor + len(self.symbols) - 1

    def __getitem__(self, coord: int):
        if not self.anchor <= coord <= self.last:
            raise IndexError(f"coordinate {coord} outside [{self.anchor}, {self.last}]")
        return self.symbols[coord - self.anchor]

    def shift(self, n: int = 1) -> "Word":
        """The word seen from ``sigma**n`` of the point."""
        if self.two_sided:
            return Word(self.symbols, self.anchor - n, True)
        if n >= len(self.symbols):
            raise PotentialError("shift consumes the whole one-sided word")
        return Word(self.symbols[n:])

    def check(self, g: DirectedGraph) -> "Word":
        if not g.is_admissible(self.symbols):
            raise PotentialError(f"word {self.symbols!r} is not admissible")
        return self


def periodic_point(cycle: Sequence, lo: int, hi: int) -> Word:
    """Coordinates ``lo..hi`` of the periodic point with ``x_i = cycle[i mod n]``."""
    n = len(cycle)
    return Word(tuple(cycle[i % n] for i in range(lo, hi + 1)), lo, two_sided=True)


def comparison_horizon(x: Word, y: Word) -> tuple[int, int]:
    """Coordinates on which both words are determined."""
    if x.two_sided != y.two_sided:
        raise PotentialError("cannot compare a one-sided word with a two-sided word")
    lo, hi = max(x.anchor, y.anchor), min(x.last, y.last)
    if lo > hi:
        raise PotentialError("words share no coordinate")
    return lo, hi


def natural_distance(x: Word, y: Word) -> float:
    """``exp(-min{|i| : x_i != y_i})`` over the commonly determined coordinates.

    Returns 0 when the words agree wherever both are determined; the range
    that was compared is given by :func:`comparison_horizon`.
    """
    lo, hi = comparison_horizon(x, y)
    diffs = [abs(i) for i in range(lo, hi + 1) if x[i] != y[i]]
    return math.exp(-min(diffs)) if diffs else 0.0


class LocallyConstantPotential:
    """Potential reading coordinates ``window[0]..window[1]`` of a point.

    Parameters
    ----------
    graph : DirectedGraph
    window : (int, int)
        ``(l, r)`` with ``l <= r``.
    values : mapping
        Table from admissible window words (tuples of length ``r - l + 1``)
        to numbers. Every admissible window word must be present. Values are
        kept as given, so ``fractions.Fraction`` tables stay exact.
    declared_theta : float, optional
        Decay rate used only by :func:`variation_envelope`.
    """

    def __init__(self, graph: DirectedGraph, window: tuple[int, int], values: Mapping,
                 declared_theta: float | None = None):
        l, r = (int(t) for t in window)
        if l > r:
            raise PotentialError(f"window {window!r} has l > r")
        if declared_theta is not None and not 0 < declared_theta < 1:
            raise PotentialError("declared theta must lie in (0, 1)")
        size = r - l + 1
        table = {}
        for key, val in values.items():
            key = tuple(key)
            if len(key) != size or not graph.is_admissible(key):
                raise PotentialError(f"table entry {key!r} is not an admissible word of length {size}")
            table[key] = val
        missing = [w for w in graph.words(size) if w not in table]
        if missing:
            raise PotentialError(f"table misses {len(missing)} admissible window words, e.g. {missing[0]!r}")
        self.graph = graph
        self.window = (l, r)
        self.table = table
        self.declared_theta = declared_theta

    def __repr__(self) -> str:
        return f"LocallyConstantPotential(window={self.window}, |table|={len(self.table)})"

    @property
    def one_sided(self) -> bool:
        return self.window[0] >= 0

    @property
    def size(self) -> int:
        return self.window[1] - self.window[0] + 1

    def sup(self):
        return max(self.table.values())

    def __call__(self, window_word: Sequence):
        try:
            return self.table[tuple(window_word)]
        except KeyError:
            raise PotentialError(f"{tuple(window_word)!r} is not an admissible window word") from None

    def at(self, w: Word, j: int = 0):
        """Value of the potential at ``sigma**j`` of the point ``w`` describes."""
        l, r = self.window
        lo, hi = j + l, j + r
        if lo < w.anchor or hi > w.last:
            raise PotentialError(
                f"evaluating at shift {j} reads coordinates {lo}..{hi}, "
                f"but the word covers {w.anchor}..{w.last}")
        return self(w.symbols[lo - w.anchor: hi - w.anchor + 1])

    def map_values(self, f: Callable) -> "LocallyConstantPotential":
        return LocallyConstantPotential(self.graph, self.window,
                                        {k: f(v) for k, v in self.table.items()}, self.declared_theta)

    def restrict(self, sub: DirectedGraph) -> "LocallyConstantPotential":
        if not sub.is_subgraph_of(self.graph):
            raise PotentialError("restriction target is not a subgraph")
        return LocallyConstantPotential(sub, self.window, {w: self.table[w] for w in sub.words(self.size)},
                                        self.declared_theta)


def constant_potential(g: DirectedGraph, c=0.0, window=(0, 0)) -> LocallyConstantPotential:
    l, r = window
    return LocallyConstantPotential(g, window, {w: c for w in g.words(r - l + 1)})


def widen(phi: LocallyConstantPotential, window: tuple[int, int]) -> LocallyConstantPotential:
    """Same function, tabulated on a larger window."""
    l, r = phi.window
    L, R = window
    if L > l or R < r:
        raise PotentialError(f"window {window!r} does not contain {phi.window!r}")
    off = l - L
    values = {w: phi.table[w[off:off + phi.size]] for w in phi.graph.words(R - L + 1)}
    return LocallyConstantPotential(phi.graph, (L, R), values, phi.declared_theta)


def shift_window(phi: LocallyConstantPotential, t: int) -> LocallyConstantPotential:
    """``phi o sigma**t``: the same table read ``t`` coordinates further right."""
    l, r = phi.window
    return LocallyConstantPotential(phi.graph, (l + t, r + t), phi.table, phi.declared_theta)


def var_n(phi: LocallyConstantPotential, n: int):
    """Exact ``var_n``: largest change of ``phi`` between points agreeing near 0.

    Points must agree on coordinates ``-(n-1)..n-1`` (for a one-sided
    potential only ``0..n-1`` matter, which is the one-sided definition).
    Admissible words over the hull of the window and the agreement range are
    grouped by their agreement block; the variation is the largest spread of
    values within a group.
    """
    if n < 1:
        raise PotentialError("var_n needs n >= 1")
    l, r = phi.window
    # negative coordinates never matter to a one-sided potential
    lo, hi = (0 if l >= 0 else -(n - 1)), n - 1
    if lo <= l and r <= hi:
        return 0 * phi.sup()
    H0, H1 = min(l, lo), max(r, hi)
    spread = {}
    for w in phi.graph.words(H1 - H0 + 1):
        key = w[lo - H0: hi - H0 + 1]
        v = phi(w[l - H0: r - H0 + 1])
        if key in spread:
            a, b = spread[key]
            spread[key] = (min(a, v), max(b, v))
        else:
            spread[key] = (v, v)
    return max(b - a for a, b in spread.values())


def birkhoff_potential(phi: LocallyConstantPotential, n: int) -> LocallyConstantPotential:
    """``phi_n = phi + phi o sigma + ... + phi o sigma**(n-1)`` as a potential."""
    if n < 1:
        raise PotentialError("Birkhoff sums need n >= 1")
    l, r = phi.window
    window = (l, r + n - 1)
    size = r + n - l
    values = {}
    for w in phi.graph.words(size):
        values[w] = sum((phi(w[j:j + phi.size]) for j in range(1, n)), phi(w[:phi.size]))
    return LocallyConstantPotential(phi.graph, window, values, phi.declared_theta)


def birkhoff_sum(phi: LocallyConstantPotential, w: Word, n: int):
    """``sum_{j<n} phi(sigma**j w)``; the word must determine every read."""
    if n < 1:
        raise PotentialError("Birkhoff sums need n >= 1")
    l, r = phi.window
    if w.anchor > l or w.last < n - 1 + r:
        if w.two_sided:
            need = f"coordinates {l}..{n - 1 + r}"
        else:
            need = f"length {n + r}" if l >= 0 else "a two-sided word (the potential reads negative coordinates)"
        raise PotentialError(f"word too short: the sum needs {need}, got {w.anchor}..{w.last}")
    total = phi.at(w, 0)
    for j in range(1, n):
        total = total + phi.at(w, j)
    return total


def variation_inequality_check(phi: LocallyConstantPotential, n: int, m: int):
    """Both sides of ``var_{n+m}(phi_n) <= sum_{j > m} var_j(phi)``.

    The right side is a finite sum because ``var_j`` vanishes once the
    agreement range covers the window.
    """
    if n < 1 or m < 1:
        raise PotentialError("n and m must be positive")
    lhs = var_n(birkhoff_potential(phi, n), n + m)
    reach = max(abs(phi.window[0]), abs(phi.window[1])) + 1
    rhs = sum((var_n(phi, j) for j in range(m + 1, reach + 1)), 0 * phi.sup())
    return lhs, rhs


def recode_potential(phi: LocallyConstantPotential, k: int,
                     block: tuple[DirectedGraph, BlockCode] | None = None) -> LocallyConstantPotential:
    """Transport ``phi`` to the ``k``-block presentation of its graph.

    The block at coordinate ``j`` holds ``x_j..x_{j+k-1}``, so a window
    ``(l, r)`` becomes ``(l, max(l, r - k + 1))``.
    """
    hg, code = block if block is not None else higher_block(phi.graph, k)
    if code.k != k:
        raise PotentialError("block code does not match k")
    l, r = phi.window
    R = max(l, r - k + 1)
    values = {}
    for bw in hg.words(R - l + 1):
        word = code.decode(bw)
        values[bw] = phi(word[:phi.size])
    return LocallyConstantPotential(hg, (l, R), values, phi.declared_theta)


def variation_envelope(phi: LocallyConstantPotential):
    """Smallest ``C`` with ``var_n <= C * theta**n`` for all ``n >= 2``.

    Uses the declared decay rate; returns ``(C, theta)``.
    """
    theta = phi.declared_theta
    if theta is None:
        raise PotentialError("potential has no declared theta")
    reach = max(abs(phi.window[0]), abs(phi.window[1])) + 1
    C = max((float(var_n(phi, n)) / theta ** n for n in range(2, reach + 1)), default=0.0)
    return C, theta
