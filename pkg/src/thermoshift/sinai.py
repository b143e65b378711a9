"""Reduction of two-sided finite-range potentials to one-sided ones.

Each vertex ``v`` gets a fixed admissible past (follow the least predecessor
repeatedly). For a point ``x`` let ``r(x)`` keep ``x`` on coordinates ``>= 0``
and replace the past by the fixed past of ``x_0``. With ``psi`` reading
coordinates ``-m..m``, the transfer function

    u(x) = sum_{n < m} [psi(sigma^n r(x)) - psi(sigma^n x)]

is a finite sum (later terms read only coordinates ``>= 0``), and
``phi = psi + u - u o sigma`` depends on ``x_0..x_{2m}`` only. Since
``phi - psi`` is a coboundary, both have the same Birkhoff sums on every
periodic orbit and the same equilibrium measures.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

from .graph import DirectedGraph
from .potentials import LocallyConstantPotential, PotentialError, constant_potential, widen


@dataclass(frozen=True)
class SinaiReduction:
    """Result of :func:`sinai_reduce`.

    Attributes
    ----------
    psi : LocallyConstantPotential
        The input potential.
    phi : LocallyConstantPotential
        One-sided cohomologous potential, window ``(0, 2m)``.
    u : LocallyConstantPotential
        Transfer function, window ``(-m, 2m - 1)``.
    past_choice : dict
        Vertex -> the fixed past ``(x_{-m}, ..., x_{-1})`` actually read.
    two_sided_phi : LocallyConstantPotential
        ``psi + u - u o sigma`` tabulated on ``(-m, 2m)`` before dropping the
        negative coordinates; it is what :func:`certify_one_sided` checks.
    """

    psi: LocallyConstantPotential
    phi: LocallyConstantPotential
    u: LocallyConstantPotential
    past_choice: dict
    two_sided_phi: LocallyConstantPotential


def fixed_past(g: DirectedGraph, v, m: int) -> tuple:
    """``(x_{-m}, ..., x_{-1})`` of the least-predecessor past of ``v``."""
    out = []
    cur = v
    for _ in range(m):
        cur = min(g.predecessors(cur))
        out.append(cur)
    return tuple(reversed(out))


def _is_exact(values) -> bool:
    return all(isinstance(v, Rational) for v in values)


def certify_one_sided(phi: LocallyConstantPotential, tol: float = 0.0) -> bool:
    """True iff the value never depends on coordinates ``< 0``.

    Admissible words over coordinates ``l..max(r, 0)`` are grouped by their
    nonnegative part; every group must carry a single value (up to ``tol``).
    """
    l, r = phi.window
    if l >= 0:
        return True
    top = max(r, 0)
    groups = {}
    for w in phi.graph.words(top - l + 1):
        v = phi(w[:phi.size])
        key = w[-l:]
        if key in groups:
            lo, hi = groups[key]
            groups[key] = (min(lo, v), max(hi, v))
        else:
            groups[key] = (v, v)
    return all(hi - lo <= tol for lo, hi in groups.values())


def sinai_reduce(psi: LocallyConstantPotential) -> SinaiReduction:
    """One-sided potential cohomologous to ``psi`` via a bounded transfer function.

    One-sided input is returned unchanged with ``u = 0``. Otherwise the window
    is widened to ``(-m, m)`` with ``m = max(-l, r)``. Arithmetic follows the
    table's number type; ``Fraction`` tables give an exact reduction.

    Raises
    ------
    PotentialError
        If the computed ``phi`` fails the one-sidedness certificate.
    """
    g = psi.graph
    l, r = psi.window
    if l >= 0:
        zero = 0 * psi.sup()
        return SinaiReduction(psi, psi, constant_potential(g, zero), {}, psi)

    m = max(-l, r)
    wide = widen(psi, (-m, m))
    span = 2 * m + 1
    past = {v: fixed_past(g, v, m) for v in g.vertices}

    # u on coordinates -m..2m-1; w[i] is coordinate i - m
    u_tab = {}
    for w in g.words(3 * m):
        rw = past[w[m]] + w[m:]
        total = 0 * wide.sup()
        for n in range(m):
            total = total + (wide(rw[n:n + span]) - wide(w[n:n + span]))
        u_tab[w] = total
    u = LocallyConstantPotential(g, (-m, 2 * m - 1), u_tab)

    # phi on coordinates -m..2m
    two = {w: wide(w[:span]) + u_tab[w[:-1]] - u_tab[w[1:]] for w in g.words(3 * m + 1)}
    two_sided = LocallyConstantPotential(g, (-m, 2 * m), two)
    if _is_exact(two.values()):
        tol = 0.0
    else:
        tol = 64 * 2.0 ** -52 * max(1.0, max(abs(float(v)) for v in psi.table.values())) * (2 * m + 1)
    if not certify_one_sided(two_sided, tol):
        raise PotentialError("reduced potential still depends on negative coordinates")

    # read phi off the representative whose past is the fixed one
    phi_tab = {}
    for w in g.words(2 * m + 1):
        phi_tab[w] = two[past[w[0]] + w]
    phi = LocallyConstantPotential(g, (0, 2 * m), phi_tab, psi.declared_theta)
    return SinaiReduction(psi, phi, u, past, two_sided)


def exact(phi: LocallyConstantPotential) -> LocallyConstantPotential:
    """Copy of ``phi`` with every value converted exactly to ``Fraction``."""
    return phi.map_values(Fraction)
