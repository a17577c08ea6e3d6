//! Element-local space-time predictor.
//!
//! For one element and one time step the predictor finds the space-time
//! polynomial `q(xi, tau) = Q[p][l][s] phi_l(xi) chi_s(tau)` solving the
//! locally implicit Galerkin system with the stiff source term. The fast
//! path ([`predict`]) marches backwards over spatial-degree blocks and
//! quantities, using that the reference stiffness couples each block only to
//! higher blocks and that the source matrix is upper triangular. The dense
//! LU path ([`predict_oracle`]) and two intermediate variants
//! ([`predict_intermediate`]) exist for cross-checking; [`cost_model`] gives
//! the exact flop and storage counts of both approaches.

mod cost;
mod intermediate;
mod operator;
mod oracle;
mod predict;
mod tensor;

pub use cost::{cost_model, CostReport};
pub use intermediate::{predict_intermediate, IntermediateStats, Variant};
pub use operator::{build_operator, StpOperator};
pub use oracle::{
    assemble_system, assemble_rhs, predict_oracle, random_instance, relative_deviation, residual, run_oracle_suite, DenseSystem,
    OracleInstance, OracleSummary,
};
pub use predict::{predict, predict_counted, FlopCounter, FlopTally, NoCount};
pub use tensor::DofTensor;
