//! Non-crossing partitions, Catalan numbers, Legendre polynomials and the
//! free moment-cumulant calculus, all in exact rational arithmetic.
//!
//! Moment-cumulant sums use the multiplicative extension over blocks:
//! `κ_π = ∏_{V ∈ π} κ_{|V|}` evaluated on the letters of each block in
//! their original order.

mod cumulants;
mod legendre;
mod nc;

pub use cumulants::{
    compressed_jacobi_moment, cumulants_from_moments, haar_unitary_cumulant, moments_from_cumulants,
    projection_cumulants, CumulantTable, Letter,
};
pub use legendre::legendre;
pub use nc::{catalan, enumerate_nc, for_each_nc, NcPartition, NC_GUARD};
