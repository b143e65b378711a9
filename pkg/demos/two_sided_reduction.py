"""Trading a two-sided potential for a one-sided one.

A potential reading x_{-2}..x_2 cannot be fed to the transfer operator
directly. Adding a bounded coboundary removes the dependence on the past;
sums along periodic orbits do not change, so neither does the pressure.
With rational table entries every step is exact.
"""

from fractions import Fraction

import numpy as np

from thermoshift import (DirectedGraph, LocallyConstantPotential, certify_one_sided, periodic_point,
                         shift_window, sinai_reduce, solve_rpf)
from thermoshift.potentials import birkhoff_sum

g = DirectedGraph(list("abc"), [("a", "a"), ("a", "b"), ("b", "c"), ("c", "a"), ("c", "b"), ("b", "a")])
rng = np.random.default_rng(0)
psi = LocallyConstantPotential(g, (-2, 2), {w: Fraction(int(rng.integers(-9, 10)), 4) for w in g.words(5)})

red = sinai_reduce(psi)
print("reduced window", red.phi.window, "one-sided:", certify_one_sided(red.two_sided_phi))
print("fixed pasts", red.past_choice)

for cycle in [("a",), ("a", "b"), ("a", "b", "c"), ("a", "b", "c", "b")]:
    p = len(cycle)
    s_psi = birkhoff_sum(psi, periodic_point(cycle, -2, p + 1), p)
    s_phi = birkhoff_sum(red.phi, periodic_point(cycle, 0, p + 3), p)
    print(f"orbit {''.join(cycle):5s} psi: {str(s_psi):>6s}  phi: {str(s_phi):>6s}")

# psi shifted two steps to the right reads x_0..x_4 and has the same pressure
p1 = solve_rpf(g, red.phi.map_values(float)).pressure
p2 = solve_rpf(g, shift_window(psi, 2).map_values(float)).pressure
print("pressure via phi", p1, " via shifted psi", p2)
