"""Entanglement tomography toolkit for disordered spin-1/2 chains.

Evolves periodic chains under thermal, localized, circuit, and driven
dynamics; measures entanglement entropy across every symmetry-inequivalent
bipartition; and fits the bond-additive law S = S0 + sum_j omega_j n_j to
extract entanglement bond tensions, alongside mutual-information and
level-spacing diagnostics.
"""
from ._version import __version__
from .basis import (build_sector_basis, embed_sector_state, popcount, project_full_state,
                    sample_half_filling_state, sample_random_product_state,
                    SectorBasis, StateVector)
from .bipartitions import (canonicalize, crossed_bond_vector, enumerate_representatives,
                           geometry_degeneracy, representative_table, RepresentativeSet)
from .entanglement import (entropies_for_masks, entropy_bits, entropy_of_mask,
                           haar_sector_entropy_mc, mutual_information, page_entropy_bits,
                           schmidt_spectrum)
from .errors import (BasisMismatchError, CapacityError, ConvergenceError, EnttomoError,
                     ParameterError, SchemaError)
from .evolution import (apply_gate_at, build_two_qubit_gate, diagonalize, energy_expectation,
                        evolve_krylov, evolve_spectral, floquet_step, FloquetMap,
                        make_floquet_map, materialize_floquet_unitary, rqc_step,
                        SpectralDecomposition)
from .experiment import (ExperimentConfig, load_config, parse_config_file, ProtocolResult,
                         run_haar_reference, run_protocol, run_spectral_diagnostics,
                         run_tomography, simulate)
from .operators import (build_floquet_parts, build_h_mf, build_h_nn, build_h_nnn,
                        CouplingParams, DisorderRealization, sample_disorder,
                        SparseHermitianOperator)
from .spectral_stats import (goe_surrogate_ratios, level_spacing_ratios, middle_third,
                             poisson_surrogate_ratios, RatioStats, reference_means)
from .tomography import (BondTensionRegression, build_design_matrix, fit_bond_tensions,
                         fit_geometry, FitResult, predict_entropy)

__all__ = [name for name in dir() if not name.startswith("_")]
