use super::{DofTensor, StpOperator};
use crate::basis::{block_start, num_modes};
use crate::{Error, Result, NUM_QUANTITIES};

/// Receives the floating-point operation counts of the predictor kernels
/// (multiplications and additions counted separately).
pub trait FlopCounter {
    fn add(&mut self, flops: u64);
}

/// Discards all counts.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoCount;

impl FlopCounter for NoCount {
    #[inline(always)]
    fn add(&mut self, _: u64) {}
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FlopTally(pub u64);

impl FlopCounter for FlopTally {
    fn add(&mut self, flops: u64) {
        self.0 += flops;
    }
}

pub(crate) fn check_input(op: &StpOperator, q0: &[f64]) -> Result<()> {
    let expected = NUM_QUANTITIES * num_modes(op.degree());
    if q0.len() != expected {
        return Err(Error::Shape { expected, actual: q0.len() });
    }
    if q0.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteInput);
    }
    Ok(())
}

/// Initial right-hand side `b[p][l][u] = (S^-1 w)_u Q0[p][l]`.
pub(crate) fn initial_rhs(op: &StpOperator, q0: &[f64]) -> Vec<f64> {
    let start = &op.reference.temporal.scaled_start;
    q0.iter().flat_map(|&v| start.iter().map(move |s| s * v)).collect()
}

/// Solves the space-time predictor system for the element state `q0`
/// (`[quantity][spatial mode]`).
pub fn predict(op: &StpOperator, q0: &[f64]) -> Result<DofTensor> {
    predict_counted(op, q0, &mut NoCount)
}

/// [`predict`] reporting the flop count of every dense kernel to `counter`.
pub fn predict_counted<C: FlopCounter>(op: &StpOperator, q0: &[f64], counter: &mut C) -> Result<DofTensor> {
    check_input(op, q0)?;
    let degree = op.degree();
    let nt = degree + 1;
    let nb = num_modes(degree);
    let nq = NUM_QUANTITIES;
    let spatial = &op.reference.spatial;

    let mut b = initial_rhs(op, q0);
    counter.add((nq * nb * nt) as u64);
    let mut q = DofTensor::zeros(degree);
    let max_slab = (nb - block_start(degree)) * nt;
    let mut scratch = vec![0.0; nq * max_slab];

    for block in (0..=degree).rev() {
        let lo = block_start(block);
        let hi = num_modes(block);
        let d = hi - lo;
        let slab = d * nt;
        let qd = q.as_mut_slice();

        for p in (0..nq).rev() {
            let r = op.resolvent(p);
            for m in lo..hi {
                let base = (p * nb + m) * nt;
                let (rhs, out) = (&b[base..base + nt], &mut qd[base..base + nt]);
                for (u, out_u) in out.iter_mut().enumerate() {
                    let row = &r[u * nt..(u + 1) * nt];
                    *out_u = row.iter().zip(rhs).map(|(x, y)| x * y).sum();
                }
            }
            counter.add((2 * d * nt * nt) as u64);
            for &(o, _, g) in op.upper.iter().filter(|e| e.1 == p) {
                let src = &qd[(p * nb + lo) * nt..(p * nb + lo) * nt + slab];
                let dst = &mut b[(o * nb + lo) * nt..(o * nb + lo) * nt + slab];
                for (x, y) in dst.iter_mut().zip(src) {
                    *x += g * y;
                }
                counter.add((2 * slab) as u64);
            }
        }

        if block == 0 {
            break;
        }
        for (a_star, khat) in op.a_star.iter().zip(&spatial.scaled_stiffness) {
            // scratch[p][m][s] = sum_q A*[p][q] Q[q][m][s] over the block.
            let u = &mut scratch[..nq * slab];
            u.fill(0.0);
            for p in 0..nq {
                let dst = &mut u[p * slab..(p + 1) * slab];
                for c in 0..nq {
                    let a = a_star[(p, c)];
                    let src = &qd[(c * nb + lo) * nt..(c * nb + lo) * nt + slab];
                    for (x, y) in dst.iter_mut().zip(src) {
                        *x += a * y;
                    }
                }
            }
            counter.add((2 * nq * nq * slab) as u64);
            // b[p][l][s] -= sum_m Khat[l][m] scratch[p][m][s] for lower blocks.
            let kd = khat.as_slice();
            for p in 0..nq {
                let dst = &mut b[p * nb * nt..(p * nb + lo) * nt];
                for m in lo..hi {
                    let src = &u[p * slab + (m - lo) * nt..p * slab + (m - lo + 1) * nt];
                    let col = &kd[m * nb..m * nb + lo];
                    for (l, &k) in col.iter().enumerate() {
                        for (x, y) in dst[l * nt..(l + 1) * nt].iter_mut().zip(src) {
                            *x -= k * y;
                        }
                    }
                }
            }
            counter.add((2 * lo * d * nq * nt) as u64);
        }
    }
    Ok(q)
}
