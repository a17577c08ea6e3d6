use nalgebra::DMatrix;

use super::dubiner::{num_modes, SpatialBasis};
use super::quadrature::{quadrature_rule, Domain};
use super::{check_degree, pairwise_sum};
use crate::Result;

/// Reference-element matrices in space. The mass matrix is diagonal.
#[derive(Debug, Clone)]
pub struct SpatialOperators {
    pub degree: usize,
    /// `M_kk = int phi_k^2`.
    pub mass: Vec<f64>,
    /// `K^a_kl = int phi_k d(phi_l)/d(xi_a)`; zero unless mode `l` has higher
    /// total degree than mode `k`.
    pub stiffness: [DMatrix<f64>; 3],
    /// `M^-1 K^a`.
    pub scaled_stiffness: [DMatrix<f64>; 3],
}

/// Reference-interval matrices in time for the shifted Legendre basis.
#[derive(Debug, Clone)]
pub struct TemporalOperators {
    pub degree: usize,
    /// `S_ss = int chi_s^2 = 1 / (2s + 1)`.
    pub mass: Vec<f64>,
    /// `K_rs = int chi_r' chi_s`.
    pub stiffness: DMatrix<f64>,
    /// `W_rs = chi_r(1) chi_s(1)`.
    pub end_product: DMatrix<f64>,
    /// `w_r = chi_r(0)`.
    pub start_values: Vec<f64>,
    /// `S^-1 (W - K)`, the per-mode time-evolution matrix.
    pub evolution: DMatrix<f64>,
    /// `S^-1 w`.
    pub scaled_start: Vec<f64>,
    /// `int chi_s` over the unit interval.
    pub integrals: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct ReferenceOperators {
    pub spatial: SpatialOperators,
    pub temporal: TemporalOperators,
}

impl ReferenceOperators {
    pub fn new(degree: usize) -> Result<Self> {
        Ok(ReferenceOperators { spatial: build_spatial_operators(degree)?, temporal: build_temporal_operators(degree)? })
    }

    pub fn degree(&self) -> usize {
        self.spatial.degree
    }
}

/// Stiffness by quadrature, before the structural zeros are imposed.
pub(crate) fn raw_stiffness(basis: &SpatialBasis) -> Result<[DMatrix<f64>; 3]> {
    let n = basis.len();
    let rule = quadrature_rule(Domain::Tetrahedron, 2 * basis.degree())?;
    let evals: Vec<(Vec<f64>, Vec<[f64; 3]>)> = rule.points.iter().map(|&p| basis.evaluate_with_gradients(p)).collect();
    let mut terms = vec![0.0; rule.len()];
    Ok([0, 1, 2].map(|a| {
        DMatrix::from_fn(n, n, |k, l| {
            for (q, (v, g)) in evals.iter().enumerate() {
                terms[q] = rule.weights[q] * v[k] * g[l][a];
            }
            pairwise_sum(&terms)
        })
    }))
}

pub fn build_spatial_operators(degree: usize) -> Result<SpatialOperators> {
    check_degree(degree)?;
    let basis = SpatialBasis::new(degree)?;
    let mass: Vec<f64> = (0..basis.len()).map(|k| basis.norm_squared(k)).collect();
    let total_degree: Vec<usize> = basis.modes().iter().map(|m| m.iter().sum()).collect();
    let mut stiffness = raw_stiffness(&basis)?;
    for k_a in &mut stiffness {
        for k in 0..basis.len() {
            for l in 0..basis.len() {
                if total_degree[l] <= total_degree[k] {
                    k_a[(k, l)] = 0.0;
                }
            }
        }
    }
    let scaled_stiffness = stiffness.clone().map(|mut k_a| {
        for (k, m) in mass.iter().enumerate() {
            k_a.row_mut(k).scale_mut(1.0 / m);
        }
        k_a
    });
    debug_assert_eq!(mass.len(), num_modes(degree));
    Ok(SpatialOperators { degree, mass, stiffness, scaled_stiffness })
}

pub fn build_temporal_operators(degree: usize) -> Result<TemporalOperators> {
    check_degree(degree)?;
    let n = degree + 1;
    let mass: Vec<f64> = (0..n).map(|s| 1.0 / (2 * s + 1) as f64).collect();
    let stiffness = DMatrix::from_fn(n, n, |r, s| if s < r && (r - s) % 2 == 1 { 2.0 } else { 0.0 });
    let end_product = DMatrix::from_element(n, n, 1.0);
    let start_values: Vec<f64> = (0..n).map(|r| if r % 2 == 0 { 1.0 } else { -1.0 }).collect();
    let evolution = DMatrix::from_fn(n, n, |r, s| (end_product[(r, s)] - stiffness[(r, s)]) / mass[r]);
    let scaled_start = start_values.iter().zip(&mass).map(|(w, m)| w / m).collect();
    let integrals = (0..n).map(|s| if s == 0 { 1.0 } else { 0.0 }).collect();
    Ok(TemporalOperators { degree, mass, stiffness, end_product, start_values, evolution, scaled_start, integrals })
}
