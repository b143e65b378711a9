"""Thermodynamic formalism on finite Markov shifts.

Graph presentations, locally constant potentials, the Ruelle transfer
operator and its Perron data, equilibrium (Gibbs) measures, exact weak
Bernoulli statistics and the finite-rotation factor of periodic shifts.
"""

from .gibbs import (DELTA_0, GibbsCertificate, KDeltaSearch, WeakBernoulliReport, averaging_distortion,
                    distortion_constant, find_K_delta, gibbs_constant, gibbs_ratio_bounds, search_K_delta,
                    step1_pair_bound, wb_bound, wb_cell, weak_bernoulli_statistic)
from .graph import (BlockCode, DirectedGraph, GraphError, SpectralDecomposition, cycle_graph, full_shift,
                    higher_block, is_transitive, period, power_graph, reaches, spectral_decomposition,
                    transitive_components)
from .potentials import (LocallyConstantPotential, PotentialError, Word, birkhoff_potential, birkhoff_sum,
                         comparison_horizon, constant_potential, natural_distance, periodic_point,
                         recode_potential, shift_window, var_n, variation_envelope,
                         variation_inequality_check, widen)
from .rotation import (RotationFactor, WitnessReport, build_rotation_factor, entropy_identity_check,
                       power_potential_pressure_check, product_structure_witness)
from .rpf import (ConvergenceError, MarkovMeasure, RpfSolution, TransferMatrix, apply_L, convergence_profile,
                  entropy, equilibrium_measure, parry_measure, pressure_functional, solve_rpf, transfer_matrix,
                  truncation_pressure_sequence)
from .sinai import SinaiReduction, certify_one_sided, exact, fixed_past, sinai_reduce

__version__ = "0.1.0"
