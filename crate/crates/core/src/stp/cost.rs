use crate::basis::{check_degree, num_modes};
use crate::{Result, NUM_QUANTITIES};

/// Exact operation and storage counts of the dense LU approach and the
/// block-wise back-substitution for one element.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostReport {
    pub degree: usize,
    pub unknowns: u64,
    /// Forward and backward substitution with a precomputed LU factor.
    pub flops_lu: u64,
    pub flops_stp: u64,
    pub reduction: f64,
    /// Both triangular factors in one `s x s` array plus the pivot vector.
    pub storage_lu_bytes: u64,
    /// Resolvents, scaled Jacobians and source nonzeros.
    pub storage_stp_bytes: u64,
}

const BYTES_PER_REAL: u64 = 8;
const BYTES_PER_MB: f64 = (1u64 << 20) as f64;

impl CostReport {
    pub fn storage_lu_mb(&self) -> f64 {
        self.storage_lu_bytes as f64 / BYTES_PER_MB
    }

    pub fn storage_stp_mb(&self) -> f64 {
        self.storage_stp_bytes as f64 / BYTES_PER_MB
    }
}

pub fn cost_model(degree: usize) -> Result<CostReport> {
    check_degree(degree)?;
    let q = NUM_QUANTITIES as u64;
    let b = num_modes(degree) as u64;
    let nt = degree as u64 + 1;
    let unknowns = q * b * nt;
    let flops_lu = 2 * unknowns * unknowns;
    let flops_stp = 2 * b * (q * nt * nt + 3 * nt + 3 * nt * q * q + 3 * nt * q * b) + 3 * q * b * nt * nt;
    Ok(CostReport {
        degree,
        unknowns,
        flops_lu,
        flops_stp,
        reduction: flops_lu as f64 / flops_stp as f64,
        storage_lu_bytes: BYTES_PER_REAL * unknowns * (unknowns + 1),
        storage_stp_bytes: BYTES_PER_REAL * (q * nt * nt + 3 * q * q + 6),
    })
}
