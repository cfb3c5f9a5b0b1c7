//! Moment equations of the free Jacobi process and of the averaged unitary
//! Brownian motions, their stationary values by two exact routes, and the
//! large-`k` and complement identities.

mod limits;
mod moments;
mod ode;
mod stationary;

pub use limits::{large_k_limit_check, mp_limit_check, LargeKReport, LargeKRow, MpRow};
pub use moments::{
    complement_moments, integrate_moments, integrate_moments_with, integrate_normalized,
    integrate_w_moments, JacobiParams, MomentKind, MomentVector, RadialMoments, BOUND_TOLERANCE,
    RADIAL_RESIDUAL_LIMIT,
};
pub use ode::{integrate, uniform_grid, OdeOptions};
pub use stationary::{
    catalan_difference, p_script, stationary_cdf, stationary_density, stationary_moments_appendix,
    stationary_moments_catalan, stationary_support, tk_trace, PScriptPoly, P_SCRIPT_GUARD,
};
