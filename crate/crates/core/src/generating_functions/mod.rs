//! Truncated power series and the generating-function identities of the
//! moment dynamics: the stationary generating function, the binomial transfer
//! between `M_t` and `ρ_t`, the first-order equations they satisfy, and the
//! characteristic curves of the equation for `ρ_t`.

mod characteristics;
mod maps;
mod rho;
mod series;

pub use characteristics::{
    characteristic_trace, h_map, initial_f, k2_curve, lambda_tilde, CharacteristicState,
    CHARACTERISTIC_ORDER,
};
pub use maps::{
    alpha_inv, alpha_inv_series, alpha_map, binomial_transfer, inverse_binomial_transfer,
    pde_prefactor, rho0_series, stationary_mgf, stationary_mgf_value,
};
pub use rho::{
    eta_t2, extract_rho_moments, laguerre, mgf_relation_check, moments_from_rho, pde0_residual,
    pde1_residual, pde2_residual, rho_t2_laguerre, time_residual, PdeResidual, RhoPath,
};
pub use series::TruncatedSeries;
