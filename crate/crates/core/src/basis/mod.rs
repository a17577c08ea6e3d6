//! Reference-element machinery: modal Dubiner basis on the unit tetrahedron,
//! shifted-Legendre basis on `[0, 1]`, collapsed-coordinate quadrature and
//! the precomputed mass/stiffness matrices in space and time.

mod dubiner;
mod jacobi;
mod operators;
mod quadrature;
mod temporal;

pub use dubiner::{binomial, block_start, num_modes, num_modes_of_degree, SpatialBasis};
pub use jacobi::{gauss_jacobi, jacobi_value_and_derivative};
pub use operators::{build_spatial_operators, build_temporal_operators, ReferenceOperators, SpatialOperators, TemporalOperators};
pub use quadrature::{quadrature_rule, Domain, QuadratureRule, MAX_EXACTNESS};
pub use temporal::TemporalBasis;

use crate::{Error, Result, MAX_DEGREE};

pub(crate) fn check_degree(degree: usize) -> Result<()> {
    if (1..=MAX_DEGREE).contains(&degree) {
        Ok(())
    } else {
        Err(Error::UnsupportedDegree { degree, min: 1, max: MAX_DEGREE })
    }
}

/// Sum by recursive halving; keeps the rounding error of long quadrature
/// sums at O(log n) ulps and independent of thread scheduling.
pub(crate) fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 8 {
        values.iter().sum()
    } else {
        let (a, b) = values.split_at(values.len() / 2);
        pairwise_sum(a) + pairwise_sum(b)
    }
}
