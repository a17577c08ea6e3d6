use nalgebra::{DMatrix, DVector};

use super::predict::{check_input, initial_rhs};
use super::{DofTensor, StpOperator};
use crate::basis::num_modes;
use crate::{Error, Result, NUM_QUANTITIES};

/// The two simpler back-substitution schemes the fast predictor is derived
/// from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    /// One dense `13 (N+1)` solve per spatial mode, highest mode first.
    Alg1,
    /// Per spatial mode, quantities solved last-to-first with the
    /// per-quantity resolvents and the strictly upper source coupling.
    Alg2,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IntermediateStats {
    /// Dense per-mode solves (Alg1) or resolvent applications (Alg2).
    pub solves: usize,
    /// Executions of the strictly-upper source update.
    pub source_updates: usize,
}

/// Subtracts the coupling of mode `m` (already solved) from the right-hand
/// sides of all lower modes.
fn update_lower_modes(op: &StpOperator, q: &DofTensor, m: usize, b: &mut [f64]) {
    let nt = op.degree() + 1;
    let nb = num_modes(op.degree());
    for (a_star, khat) in op.a_star.iter().zip(&op.reference.spatial.scaled_stiffness) {
        for p in 0..NUM_QUANTITIES {
            let mut u = vec![0.0; nt];
            for c in 0..NUM_QUANTITIES {
                for (s, us) in u.iter_mut().enumerate() {
                    *us += a_star[(p, c)] * q.get(c, m, s);
                }
            }
            for l in 0..m {
                let k = khat[(l, m)];
                for s in 0..nt {
                    b[(p * nb + l) * nt + s] -= k * u[s];
                }
            }
        }
    }
}

pub fn predict_intermediate(op: &StpOperator, q0: &[f64], variant: Variant) -> Result<(DofTensor, IntermediateStats)> {
    check_input(op, q0)?;
    let degree = op.degree();
    let nt = degree + 1;
    let nb = num_modes(degree);
    let mut b = initial_rhs(op, q0);
    let mut q = DofTensor::zeros(degree);
    let mut stats = IntermediateStats::default();

    match variant {
        Variant::Alg1 => {
            let z = &op.reference.temporal.evolution;
            let n = NUM_QUANTITIES * nt;
            let block = DMatrix::from_fn(n, n, |i, j| {
                let (p, u) = (i / nt, i % nt);
                let (c, s) = (j / nt, j % nt);
                let time = if p == c { z[(u, s)] } else { 0.0 };
                let source = if u == s { op.e_star[(p, c)] } else { 0.0 };
                time - source
            });
            let lu = block.lu();
            for m in (0..nb).rev() {
                let rhs = DVector::from_fn(n, |i, _| b[((i / nt) * nb + m) * nt + i % nt]);
                let x = lu.solve(&rhs).ok_or(Error::SingularSystem)?;
                stats.solves += 1;
                for (i, v) in x.iter().enumerate() {
                    q.set(i / nt, m, i % nt, *v);
                }
                update_lower_modes(op, &q, m, &mut b);
            }
        }
        Variant::Alg2 => {
            for m in (0..nb).rev() {
                for p in (0..NUM_QUANTITIES).rev() {
                    let r = op.resolvent(p);
                    let base = (p * nb + m) * nt;
                    for u in 0..nt {
                        let v = (0..nt).map(|s| r[u * nt + s] * b[base + s]).sum();
                        q.set(p, m, u, v);
                    }
                    stats.solves += 1;
                    for &(o, _, g) in op.upper.iter().filter(|e| e.1 == p) {
                        for s in 0..nt {
                            b[(o * nb + m) * nt + s] += g * q.get(p, m, s);
                        }
                        stats.source_updates += 1;
                    }
                }
                update_lower_modes(op, &q, m, &mut b);
            }
        }
    }
    Ok((q, stats))
}
