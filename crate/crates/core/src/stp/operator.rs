use std::sync::Arc;

use nalgebra::DMatrix;

use crate::basis::ReferenceOperators;
use crate::material::{Jacobians, Mat13};
use crate::{Error, Result, NUM_QUANTITIES};

/// Element- and step-specific data of the predictor: Jacobians transformed to
/// the reference element and scaled by the step, the split source matrix and
/// the per-quantity temporal resolvents.
#[derive(Debug, Clone)]
pub struct StpOperator {
    pub(crate) reference: Arc<ReferenceOperators>,
    pub(crate) dt: f64,
    pub(crate) a_star: [Mat13; 3],
    pub(crate) e_star: Mat13,
    /// Strictly upper nonzeros `(row, col, value)` of the scaled source.
    pub(crate) upper: Vec<(usize, usize, f64)>,
    /// `(Z - E*_pp I)^-1`, row-major `(N+1) x (N+1)` blocks, one per quantity.
    pub(crate) resolvents: Vec<f64>,
}

/// Maximum entry of `R (Z - e I) - I` accepted for a resolvent.
const INVERSE_TOL: f64 = 1e-12;

/// Builds the predictor operator of an affine element.
///
/// `inverse_map_gradients[a][b]` is `d xi_a / d x_b`.
pub fn build_operator(
    jac: &Jacobians,
    inverse_map_gradients: [[f64; 3]; 3],
    dt: f64,
    reference: Arc<ReferenceOperators>,
) -> Result<StpOperator> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidTimeStep(dt));
    }
    let g = inverse_map_gradients;
    let det = g[0][0] * (g[1][1] * g[2][2] - g[1][2] * g[2][1]) - g[0][1] * (g[1][0] * g[2][2] - g[1][2] * g[2][0])
        + g[0][2] * (g[1][0] * g[2][1] - g[1][1] * g[2][0]);
    if !(det.abs() > 0.0 && det.is_finite()) {
        return Err(Error::SingularMap(det));
    }
    let a_star: [Mat13; 3] = std::array::from_fn(|a| (jac.flux[0] * g[a][0] + jac.flux[1] * g[a][1] + jac.flux[2] * g[a][2]) * dt);
    let e_star = jac.source * dt;

    let mut upper = Vec::new();
    for o in 0..NUM_QUANTITIES {
        for p in o + 1..NUM_QUANTITIES {
            if e_star[(o, p)] != 0.0 {
                upper.push((o, p, e_star[(o, p)]));
            }
        }
    }

    let z = &reference.temporal.evolution;
    let nt = z.nrows();
    let mut resolvents = Vec::with_capacity(NUM_QUANTITIES * nt * nt);
    for p in 0..NUM_QUANTITIES {
        let shifted: DMatrix<f64> = z - DMatrix::identity(nt, nt) * e_star[(p, p)];
        let singular = || Error::SingularResolvent { quantity: p, dt };
        let inv = shifted.clone().try_inverse().ok_or_else(singular)?;
        let defect = (&inv * &shifted - DMatrix::identity(nt, nt)).amax();
        if !(defect < INVERSE_TOL) {
            return Err(singular());
        }
        for r in 0..nt {
            resolvents.extend(inv.row(r).iter());
        }
    }
    Ok(StpOperator { reference, dt, a_star, e_star, upper, resolvents })
}

impl StpOperator {
    pub fn degree(&self) -> usize {
        self.reference.degree()
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn reference(&self) -> &ReferenceOperators {
        &self.reference
    }

    /// Scaled reference Jacobians, one per reference direction.
    pub fn scaled_jacobians(&self) -> &[Mat13; 3] {
        &self.a_star
    }

    pub fn scaled_source(&self) -> &Mat13 {
        &self.e_star
    }

    /// Strictly upper nonzeros of the scaled source as `(row, col, value)`.
    pub fn source_upper(&self) -> &[(usize, usize, f64)] {
        &self.upper
    }

    /// Resolvent of quantity `p`, row-major.
    pub fn resolvent(&self, p: usize) -> &[f64] {
        let nt2 = (self.degree() + 1).pow(2);
        &self.resolvents[p * nt2..(p + 1) * nt2]
    }

    /// Data specific to this operator (the reference matrices are shared):
    /// the 13 resolvents, the three scaled Jacobians and the nonzeros of the
    /// scaled source.
    pub fn payload(&self) -> Vec<f64> {
        let mut out = self.resolvents.clone();
        for a in &self.a_star {
            out.extend(a.iter());
        }
        out.extend(self.e_star.iter().filter(|v| **v != 0.0));
        out
    }
}
