"""Golden-mean shift: from the transfer operator to mixing.

Forbid the word "bb" on two symbols. The measure of maximal entropy is a
Markov chain; we build it from the Perron data of the transfer operator,
look at how far it is from a product measure on short cylinders, and watch
past/future correlations die out.
"""

import math

import numpy as np

from thermoshift import (DirectedGraph, constant_potential, entropy, equilibrium_measure, find_K_delta,
                         gibbs_ratio_bounds, solve_rpf, wb_bound, weak_bernoulli_statistic)

g = DirectedGraph(["a", "b"], [("a", "a"), ("a", "b"), ("b", "a")])
sol = solve_rpf(g, constant_potential(g))
mu = equilibrium_measure(sol)

print("Perron root      ", sol.lam, " (golden ratio", (1 + math.sqrt(5)) / 2, ")")
print("pressure = log lam", sol.pressure)
print("entropy of mu     ", entropy(mu))
print("transition matrix\n", np.round(mu.P, 6))
print("residuals", {k: f"{v:.1e}" for k, v in sol.residuals().items()})

# Ratios mu[a c] / (mu[a] mu[c]) stay within a fixed factor of 1.
cert = gibbs_ratio_bounds(mu, max_len=5)
print(f"\ncylinder ratios over {cert.n_pairs} pairs lie in [{cert.observed[0]:.4f}, {cert.observed[1]:.4f}]")
print(f"a-priori constant C* = {cert.c_star:.4f}")

# Weak Bernoulli sums for the 1-cylinder partition decay geometrically in the gap k.
rep = weak_bernoulli_statistic(mu, n_max=3, k_max=12)
print("\n k   WB(3, k)")
for k in range(1, 13):
    print(f"{k:2d}   {rep.table[(3, k)]:.3e}")

for delta in (0.2, 0.1, 0.05):
    K = find_K_delta(mu, delta)
    print(f"delta={delta}: K={K}, bound {wb_bound(delta):.3f}, WB(3, K+1) = {rep.table[(3, min(K + 1, 12))]:.2e}")
