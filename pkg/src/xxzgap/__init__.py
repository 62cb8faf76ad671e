"""Spectral gaps of the ferromagnetic XXZ chain with kink boundary fields.

Three mutually validating routes to the low-lying spectrum:

- exact: sector bases, sparse Hamiltonians, Lanczos/dense eigensolves, and
  the closed-form kink ground states that the Hamiltonian must annihilate;
- rigorous bound: the spin-ladder overlap matrix whose second eigenvalue
  delta certifies gap >= 2J (1 - delta_inv) (1 - delta);
- asymptotics: exact rational gap coefficients at the Ising point, and the
  large-spin boson/Jacobi picture with its interface phase.

The `xxz-gap` command line exposes all of it with deterministic JSON/CSV
output.
"""

from .basis import MAX_TWO_J, SectorBasis, SpinParams, local_values, sector_dimension
from .boson import (BosonComparison, InterfacePhase, OptimalScanResult,
                    TridiagonalOperator, boson_matrix, boson_vs_exact,
                    gamma_infinity, jacobi_operator, optimal_anisotropy_scan,
                    solve_interface_phase)
from .eigensolve import EigenResult, GapReport, full_spectrum, lowest_k, spectral_gap
from .errors import (ConsistencyError, DomainError, NonConvergenceError,
                     ResourceRefusal, XXZGapError)
from .ground_state import (KinkGroundState, QSeriesValue, heine_check, kink_vector,
                           residual, spin_half_norm_sq, spin_half_norm_sq_infinite)
from .hamiltonian import (SectorMatrix, assemble_sector, diag_amplitude,
                          dump_triplets, hop_amplitude, load_triplets,
                          staggered_conjugate_spectrum_check)
from .ising_perturb import (CurvatureResult, centered_two_m, curvature_degenerate,
                            curvature_nondegenerate, curvature_result,
                            curvature_table, ising_excitation_energy,
                            numeric_curvature)
from .sos_bound import (OverlapMatrix, RestrictedPartition, SosGapBound,
                        build_overlap_matrix, contingency_count, crude_tail_bound,
                        delta_and_bound, gale_ryser_feasible, partition_norm_sums,
                        restricted_partitions)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # basis
    "MAX_TWO_J", "SpinParams", "SectorBasis", "local_values", "sector_dimension",
    # hamiltonian
    "SectorMatrix", "assemble_sector", "diag_amplitude", "hop_amplitude",
    "dump_triplets", "load_triplets", "staggered_conjugate_spectrum_check",
    # eigensolve
    "EigenResult", "GapReport", "lowest_k", "spectral_gap", "full_spectrum",
    # ground state
    "KinkGroundState", "QSeriesValue", "kink_vector", "residual", "heine_check",
    "spin_half_norm_sq", "spin_half_norm_sq_infinite",
    # sos bound
    "RestrictedPartition", "OverlapMatrix", "SosGapBound", "restricted_partitions",
    "contingency_count", "gale_ryser_feasible", "build_overlap_matrix",
    "delta_and_bound", "crude_tail_bound", "partition_norm_sums",
    # ising perturbation
    "CurvatureResult", "curvature_nondegenerate", "curvature_degenerate",
    "curvature_result", "curvature_table", "ising_excitation_energy",
    "centered_two_m", "numeric_curvature",
    # boson / jacobi
    "TridiagonalOperator", "InterfacePhase", "OptimalScanResult", "BosonComparison",
    "solve_interface_phase", "boson_matrix", "jacobi_operator", "gamma_infinity",
    "optimal_anisotropy_scan", "boson_vs_exact",
    # errors
    "XXZGapError", "DomainError", "ResourceRefusal", "NonConvergenceError",
    "ConsistencyError",
]
