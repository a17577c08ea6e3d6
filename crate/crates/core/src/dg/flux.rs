use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::basis::{quadrature_rule, Domain, SpatialBasis};
use crate::eigen::{eigen_decompose, CLUSTER_TOL};
use crate::material::Mat13;
use crate::mesh::{REFERENCE_FACES, REFERENCE_VERTICES};
use crate::{Error, Jacobians, Result, NUM_QUANTITIES};

/// Upwind splitting `A_n = A+ + A-` of a normal Jacobian into the parts
/// carrying information out of (`plus`) and into (`minus`) the element.
#[derive(Debug, Clone, PartialEq)]
pub struct FluxSplitting {
    pub plus: Mat13,
    pub minus: Mat13,
}

impl FluxSplitting {
    /// Upwind flux `A+ q_in + A- q_out`.
    pub fn flux(&self, inside: &[f64; NUM_QUANTITIES], outside: &[f64; NUM_QUANTITIES]) -> [f64; NUM_QUANTITIES] {
        std::array::from_fn(|p| (0..NUM_QUANTITIES).map(|q| self.plus[(p, q)] * inside[q] + self.minus[(p, q)] * outside[q]).sum())
    }
}

/// Splits `n_x A + n_y B + n_z C` (the source matrix does not enter) by the
/// sign of its eigenvalues. With `neighbor` given, the face Jacobian is the
/// average of both sides.
pub fn upwind_splitting(own: &Jacobians, neighbor: Option<&Jacobians>, normal: [f64; 3]) -> Result<FluxSplitting> {
    let an = match neighbor {
        Some(nb) => (own.normal(normal) + nb.normal(normal)) * 0.5,
        None => own.normal(normal),
    };
    let m = DMatrix::from_fn(NUM_QUANTITIES, NUM_QUANTITIES, |i, j| Complex64::new(an[(i, j)], 0.0));
    let eig = eigen_decompose(&m, CLUSTER_TOL)?;
    let scale = eig.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if let Some(v) = eig.values.iter().find(|v| v.im.abs() > 1e-8 * scale) {
        return Err(Error::Eigen(format!("complex eigenvalue {v} of the normal Jacobian")));
    }
    let r = &eig.vectors;
    let r_inv = r.clone().try_inverse().ok_or_else(|| Error::Eigen("eigenvector matrix is singular".into()))?;
    let part = |keep: fn(f64) -> bool| -> Mat13 {
        let lambda = DMatrix::from_fn(NUM_QUANTITIES, NUM_QUANTITIES, |i, j| {
            let v = eig.values[i].re;
            if i == j && keep(v) && v.abs() > 1e-12 * scale {
                Complex64::new(v, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let full = r * lambda * &r_inv;
        Mat13::from_fn(|i, j| full[(i, j)].re)
    };
    let plus = part(|v| v > 0.0);
    // Exact consistency: A+ + A- reproduces A_n up to rounding.
    Ok(FluxSplitting { plus, minus: an - plus })
}

/// Trace products on reference face `face`, integrated over the unit
/// triangle: `own[k][i] = int phi_k(x) phi_i(x)` and
/// `neighbor[k][i] = int phi_k(x) phi_i(x')` where `x'` is the same physical
/// point in the neighbour's reference coordinates. `neighbor_vertices` are
/// the neighbour's local vertices matching the face triple.
pub fn face_mass_matrices(basis: &SpatialBasis, face: usize, neighbor_vertices: [usize; 3]) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let rule = quadrature_rule(Domain::Triangle, 2 * basis.degree())?;
    let n = basis.len();
    let at = |verts: [usize; 3], s: f64, t: f64| -> [f64; 3] {
        let [a, b, c] = verts.map(|v| REFERENCE_VERTICES[v]);
        std::array::from_fn(|d| a[d] + s * (b[d] - a[d]) + t * (c[d] - a[d]))
    };
    let mut own = DMatrix::zeros(n, n);
    let mut nb = DMatrix::zeros(n, n);
    for (p, w) in rule.points.iter().zip(&rule.weights) {
        let vo = basis.evaluate(at(REFERENCE_FACES[face], p[0], p[1]));
        let vn = basis.evaluate(at(neighbor_vertices, p[0], p[1]));
        for k in 0..n {
            for i in 0..n {
                own[(k, i)] += w * vo[k] * vo[i];
                nb[(k, i)] += w * vo[k] * vn[i];
            }
        }
    }
    Ok((own, nb))
}
