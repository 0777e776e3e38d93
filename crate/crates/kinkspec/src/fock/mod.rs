//! Truncated bosonic Fock space over the kink's mode set.

pub mod dopri;
pub mod duhamel;
pub mod evolution;
pub mod interaction;
pub mod linear;
pub mod space;
pub mod wick;

pub use duhamel::{duhamel_experiment, DuhamelPoint, DuhamelReport, DuhamelSetup};
pub use evolution::{quadratic_evolution, unitarity_sweep, ProductState, UnitarityReport};
pub use interaction::{
    build_interaction_kernels, delta_gamma, mode_functions, monomial_norm, InteractionKernels, InteractionTerm,
    ModeFunctions,
};
pub use linear::{
    hilbert_schmidt_integral, linearized_classical_evolution, zero_mode_growth_ratio, GrowthRatio, LinearizedEvolution,
    LinearizedSystem,
};
pub use space::{apply_annihilation, apply_creation, free_energies, Applied, FockBasis, ModeSet, TruncatedFockState};
pub use wick::{apply_wick, random_kernel, weighted_norm, wick_bound_trials, wick_matrix, BoundTrial, WickKernel};
