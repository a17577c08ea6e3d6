//! ADER discontinuous Galerkin solver for wave propagation in 3D poroelastic
//! (Biot) media.
//!
//! The element-local space-time predictor is solved by a block-wise
//! back-substitution that exploits the degree-block structure of the
//! orthogonal Dubiner basis and the upper-triangular reactive source matrix,
//! instead of factorizing the full space-time system per element. A dense
//! LU oracle, two intermediate variants of the back-substitution and an exact
//! flop/storage cost model are provided for cross-checking.
//!
//! Module map:
//!
//! - [`material`]: Biot coefficients, the 13x13 Jacobians and wave speeds.
//! - [`basis`]: Dubiner/Legendre bases, quadrature and reference operators.
//! - [`stp`]: the space-time predictor, its oracles and the cost model.
//! - [`mesh`]: periodic tetrahedral cube meshes.
//! - [`dg`]: upwind fluxes, the corrector step and the time loop.
//! - [`planewave`]: analytic plane waves, projection, error norms and
//!   convergence studies.
//! - [`config`]: the `key = value` configuration format.
//! - [`report`]: CSV writers for tables, states and diagnostics.

// Negated float comparisons are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod basis;
pub mod config;
pub mod dg;
pub mod eigen;
mod error;
pub mod material;
pub mod mesh;
pub mod parallel;
pub mod planewave;
pub mod report;
pub mod stp;

pub use error::{Error, Result};
pub use material::{DerivedCoefficients, Jacobians, MaterialParameters, Quantity, NUM_QUANTITIES};
pub use parallel::ExecMode;

/// Highest supported polynomial degree.
pub const MAX_DEGREE: usize = 7;
