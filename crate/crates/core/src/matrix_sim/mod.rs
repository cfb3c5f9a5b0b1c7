//! Finite-`N` Monte Carlo of independent unitary Brownian motions on `U(N)`.

mod config;
mod observables;
mod run;
mod ubm;

pub use config::{Observables, RankFraction, SimConfig, MAX_EMPIRICAL_ORDER};
pub use observables::{
    build_density_matrix, complement_jacobi, corner_jacobi, empirical_moments, gram_of_sum,
    hermitian_eigenvalues, ks_distance, moments_of_eigenvalues, trace,
};
pub use run::{
    simulate, simulate_compressed_jacobi, simulate_w, trajectory_rng, DensityCheck, Estimate,
    SimResult, SimSnapshot, SpectralSample, SpectrumKind,
};
pub use ubm::{
    evolve_ubm, sample_gue, unitarity_defect, ExpMethod, UbmStepper, REPROJECT_EVERY,
    UNITARITY_TOL,
};
