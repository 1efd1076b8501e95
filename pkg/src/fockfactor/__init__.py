"""Verification toolkit for factorized lattice Hamiltonians.

The package builds bosonic Fock sectors on periodic one-dimensional
grids, assembles Gram-factorized Hamiltonians for a family of
interacting models, and numerically checks operator identities, ground
state formulas, commutation relations, and point-process functionals.
"""

from .errors import (FockFactorError, CapacityError, ConfigError,
                     ShapeError, DomainError, SingularityError,
                     UnsupportedModelError, ContractViolationError,
                     IterationError)
from .lattice import (LatticeGrid, FockSector, build_sector,
                      annihilation_matrix, field_annihilation,
                      field_creation, hop_matrix, number_matrix,
                      density_matrix, number_operator, k_matrix,
                      current_matrix, grad_density_matrix, kinetic_matrix,
                      central_kinetic_gram, permanent, symmetrized_inner,
                      condensate_state, pair_weighted_state)
from .algebra import (smear_density, smear_current, field_bracket,
                      ConvergenceRecord, fit_order, weak_residual,
                      check_current_algebra, check_normal_ordering,
                      normal_ordered_pair, normal_ordered_triple)
from .factorized import (Cotangent, HeavisideShifted, CoulombS, LinearOmega,
                         HarmonicDrift, kernel_eval, Oscillatory,
                         GeneralizedOscillatory, CalogeroSutherland,
                         DeltaGas, CoulombType, ModelSpec, model_kernel,
                         model_drift, c_operator, hhat_matrix, d_matrix,
                         hhat_via_pseudoinverse, hierarchy_matrix,
                         factorized_hamiltonian, model_potential,
                         model_hamiltonian, equivalence_shift,
                         check_equivalence, check_hierarchy_commutation,
                         SpectralResult, eigensolve, groundstate_check)
from .jastrow import (SutherlandGround, OscillatorGround, RationalGround,
                      log_psi, drift, laplacian_log_psi, potential,
                      local_energy, groundstate_energy, dunkl_apply,
                      random_admissible, thermodynamic_density,
                      thermodynamic_energy_density, energy_density)
from .measure import (PoissonEnsemble, TestFunctionGrid, MCEstimate,
                      sample_configuration, eta_pairing,
                      characteristic_functional_mc, poisson_closed_form,
                      factorial_moment_closed_form,
                      normal_ordered_moment_mc, oscillator_matrix_element,
                      positive_definiteness_check)
from .report import (CheckRecord, VerificationReport, gated_check,
                     recorded_check, TOOL_VERSION)
from .suites import SUITES, SuiteResult, run_suite

__version__ = TOOL_VERSION

__all__ = [name for name in dir() if not name.startswith("_")]
