"""wallsep: a corner-flip interface over a hard wall, its free twin, and
the isomorphic symmetric simple exclusion process, with exact finite-state
oracles for validating every Monte Carlo path."""

__version__ = "0.1.0"

from .lattice import (HeightField, OccupationField, SiteDelta, new_flat,
                      laplacian, site_delta, height_to_occupation,
                      occupation_to_height, serialize, deserialize)
from .dynamics import (UpdateRule, ClockFamily, ScheduleKind, EvolveResult,
                       step_discrete, evolve, apply_site_sequence,
                       monotone_coupled_evolve, shared_site_coupled_evolve,
                       basic_coupled_walled_pair, discrepancy_witness,
                       WitnessReport)
from .exclusion import (StirringState, FluxCounter, FluxDecomposition,
                        ExclusionState, flat_occupation, product_measure_init,
                        initial_state, step_exclusion, evolve_exclusion,
                        flux_from_stirring, flux_decomposition, duality_check,
                        height_flux_identity_run, flat_flux_mean,
                        pooled_flux_variance)
from .observables import (EnsembleAccumulator, ScaledHistogram, FitResult,
                          accumulate, site_mean_square, scaled_distribution,
                          log_fit, exponent_fit, moment_normality,
                          replica_slope_ci)
from .oracle import (WalkPmf, PairSemigroup, ExactRing, FluxVariance,
                     walk_pmf, v_term_exact, v_term_two_ways,
                     pair_distribution, PairEvolver, flux_variance_exact,
                     exact_ring_transient, exact_ring_discrete,
                     TruncationError)
from .ising import (SpinWindow, rotate, rotate_inverse, glauber_rate,
                    spin_to_interface, ising_vs_wall_rate_audit, evolve_ising,
                    window_from_pattern, AuditReport)
from .harness import ExperimentConfig, RunManifest, run, parse_config_file
from .kernels import derive_seed
