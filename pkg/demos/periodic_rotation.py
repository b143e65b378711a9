"""A period-3 shift is a rotation on top of a mixing system.

Vertices fall into three cyclic classes and every edge moves one class
forward. Conditioning the equilibrium measure on a class gives a measure
for the third power of the shift; its entropy is three times the entropy
of the original, and the pressure of the 3-step Birkhoff potential on the
power graph is three times the original pressure.
"""

import numpy as np

from thermoshift import (DirectedGraph, LocallyConstantPotential, build_rotation_factor, entropy_identity_check,
                         equilibrium_measure, period, power_potential_pressure_check, product_structure_witness,
                         solve_rpf, spectral_decomposition)

layers = [["x0", "x1"], ["y0", "y1"], ["z0", "z1"]]
edges = [("x0", "y0"), ("x0", "y1"), ("x1", "y1"), ("y0", "z0"), ("y1", "z0"), ("y1", "z1"),
         ("z0", "x0"), ("z0", "x1"), ("z1", "x0")]
g = DirectedGraph([v for layer in layers for v in layer], edges)
print("period", period(g))
print("classes", [sorted(c) for c in spectral_decomposition(g).classes])

rng = np.random.default_rng(3)
psi = LocallyConstantPotential(g, (0, 1), {w: rng.normal(scale=0.5) for w in g.words(2)})
sol = solve_rpf(g, psi)
mu = equilibrium_measure(sol)
rf = build_rotation_factor(g, mu)

print("mass of each class", np.round(rf.class_mass, 15))
lhs, rhs = entropy_identity_check(rf, mu)
print("entropies of the conditioned chains", lhs)
print("3 x entropy of mu                  ", rhs)

p_times, power = power_potential_pressure_check(g, psi)
print("3 x pressure", p_times)
print("power-graph pressures", power)

report = product_structure_witness(rf, mu)
print("class index advances along every word:", report.index_process, f"({report.words_checked} words)")
