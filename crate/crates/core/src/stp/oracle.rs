use std::sync::Arc;

use faer::linalg::solvers::PartialPivLu;
use faer::prelude::*;
use faer::Mat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::predict::check_input;
use super::{build_operator, predict, predict_intermediate, DofTensor, StpOperator, Variant};
use crate::basis::{num_modes, ReferenceOperators};
use crate::material::{assemble_jacobians, derive_coefficients, max_wave_speed};
use crate::{Error, ExecMode, MaterialParameters, Result, NUM_QUANTITIES};

/// Position of unknown `(quantity p, spatial mode k, temporal mode r)` in the
/// unrolled system: spatial mode slowest, temporal mode fastest.
#[inline]
fn unrolled(p: usize, k: usize, r: usize, nt: usize) -> usize {
    (k * NUM_QUANTITIES + p) * nt + r
}

/// Assembles the full space-time system matrix of an element.
pub fn assemble_system(op: &StpOperator) -> Mat<f64> {
    let degree = op.degree();
    let nt = degree + 1;
    let nb = num_modes(degree);
    let size = NUM_QUANTITIES * nb * nt;
    let sp = &op.reference.spatial;
    let tm = &op.reference.temporal;
    let mut y = Mat::<f64>::zeros(size, size);
    for k in 0..nb {
        let mkk = sp.mass[k];
        for p in 0..NUM_QUANTITIES {
            for r in 0..nt {
                let i = unrolled(p, k, r, nt);
                for s in 0..nt {
                    y[(i, unrolled(p, k, s, nt))] += (tm.end_product[(r, s)] - tm.stiffness[(r, s)]) * mkk;
                }
                for q in 0..NUM_QUANTITIES {
                    let e = op.e_star[(p, q)];
                    if e != 0.0 {
                        y[(i, unrolled(q, k, r, nt))] -= e * tm.mass[r] * mkk;
                    }
                }
                for l in 0..nb {
                    for (a_star, kj) in op.a_star.iter().zip(&sp.stiffness) {
                        let kkl = kj[(k, l)];
                        if kkl == 0.0 {
                            continue;
                        }
                        for q in 0..NUM_QUANTITIES {
                            let a = a_star[(p, q)];
                            if a != 0.0 {
                                y[(i, unrolled(q, l, r, nt))] += a * tm.mass[r] * kkl;
                            }
                        }
                    }
                }
            }
        }
    }
    y
}

/// Right-hand side `w_r M_kk Q0[p][k]` in unrolled order.
pub fn assemble_rhs(op: &StpOperator, q0: &[f64]) -> Mat<f64> {
    let degree = op.degree();
    let nt = degree + 1;
    let nb = num_modes(degree);
    let sp = &op.reference.spatial;
    let tm = &op.reference.temporal;
    let mut rhs = Mat::<f64>::zeros(NUM_QUANTITIES * nb * nt, 1);
    for k in 0..nb {
        for p in 0..NUM_QUANTITIES {
            for r in 0..nt {
                rhs[(unrolled(p, k, r, nt), 0)] = tm.start_values[r] * sp.mass[k] * q0[p * nb + k];
            }
        }
    }
    rhs
}

/// LU factorization (partial pivoting) of an element's full system.
pub struct DenseSystem {
    degree: usize,
    lu: PartialPivLu<f64>,
}

impl DenseSystem {
    pub fn factor(op: &StpOperator) -> DenseSystem {
        DenseSystem { degree: op.degree(), lu: assemble_system(op).partial_piv_lu() }
    }

    pub fn solve(&self, rhs: &Mat<f64>) -> Result<DofTensor> {
        let x = self.lu.solve(rhs);
        let nt = self.degree + 1;
        let nb = num_modes(self.degree);
        let mut out = DofTensor::zeros(self.degree);
        for k in 0..nb {
            for p in 0..NUM_QUANTITIES {
                for r in 0..nt {
                    let v = x[(unrolled(p, k, r, nt), 0)];
                    if !v.is_finite() {
                        return Err(Error::SingularSystem);
                    }
                    out.set(p, k, r, v);
                }
            }
        }
        Ok(out)
    }
}

/// Predictor by assembling and LU-factorizing the full system.
pub fn predict_oracle(op: &StpOperator, q0: &[f64]) -> Result<DofTensor> {
    check_input(op, q0)?;
    DenseSystem::factor(op).solve(&assemble_rhs(op, q0))
}

/// Max-norm residual of the full system for `q`, relative to the max norm
/// of the right-hand side. Matrix-free.
pub fn residual(op: &StpOperator, q0: &[f64], q: &DofTensor) -> f64 {
    let degree = op.degree();
    let nt = degree + 1;
    let nb = num_modes(degree);
    let sp = &op.reference.spatial;
    let tm = &op.reference.temporal;
    let mut max_res = 0.0f64;
    let mut max_rhs = 0.0f64;
    // Jacobian-weighted coefficients: aq[j][p][l][r] = sum_q A*_j[p][q] Q[q][l][r].
    let aq: Vec<Vec<f64>> = op
        .a_star
        .iter()
        .map(|a| {
            let mut out = vec![0.0; q.len()];
            for p in 0..NUM_QUANTITIES {
                for c in 0..NUM_QUANTITIES {
                    let v = a[(p, c)];
                    if v == 0.0 {
                        continue;
                    }
                    for lr in 0..nb * nt {
                        out[p * nb * nt + lr] += v * q.as_slice()[c * nb * nt + lr];
                    }
                }
            }
            out
        })
        .collect();
    for p in 0..NUM_QUANTITIES {
        for k in 0..nb {
            let mkk = sp.mass[k];
            for r in 0..nt {
                let mut time = 0.0;
                for s in 0..nt {
                    time += (tm.end_product[(r, s)] - tm.stiffness[(r, s)]) * q.get(p, k, s);
                }
                let mut source = 0.0;
                for c in 0..NUM_QUANTITIES {
                    source += op.e_star[(p, c)] * q.get(c, k, r);
                }
                let mut space = 0.0;
                for (j, kj) in sp.stiffness.iter().enumerate() {
                    for l in 0..nb {
                        space += kj[(k, l)] * aq[j][(p * nb + l) * nt + r];
                    }
                }
                let rhs = tm.start_values[r] * mkk * q0[p * nb + k];
                let res = mkk * (time - tm.mass[r] * source) + tm.mass[r] * space - rhs;
                max_res = max_res.max(res.abs());
                max_rhs = max_rhs.max(rhs.abs());
            }
        }
    }
    if max_rhs > 0.0 {
        max_res / max_rhs
    } else {
        max_res
    }
}

/// Largest deviation between two predictions, measured per quantity
/// relative to that quantity's max norm in `reference`.
pub fn relative_deviation(candidate: &DofTensor, reference: &DofTensor) -> f64 {
    let scale = reference.max_per_quantity();
    let len = reference.num_spatial_modes() * reference.num_temporal_modes();
    let (a, b) = (candidate.as_slice(), reference.as_slice());
    (0..NUM_QUANTITIES)
        .map(|p| {
            let diff = (p * len..(p + 1) * len).map(|i| (a[i] - b[i]).abs()).fold(0.0, f64::max);
            if scale[p] > 0.0 {
                diff / scale[p]
            } else {
                diff
            }
        })
        .fold(0.0, f64::max)
}

/// A random element problem: material, affine map, step and initial state.
#[derive(Debug, Clone)]
pub struct OracleInstance {
    pub material: MaterialParameters,
    /// `d xi_a / d x_b`.
    pub map_gradients: [[f64; 3]; 3],
    pub dt: f64,
    pub q0: Vec<f64>,
}

impl OracleInstance {
    pub fn operator(&self, reference: Arc<ReferenceOperators>) -> Result<StpOperator> {
        build_operator(&assemble_jacobians(&self.material)?, self.map_gradients, self.dt, reference)
    }
}

fn random_material<R: Rng>(rng: &mut R) -> MaterialParameters {
    let base = MaterialParameters::plane_wave_benchmark();
    loop {
        let mut f = |lo: f64, hi: f64| rng.random_range(lo..hi);
        let m = MaterialParameters {
            solid_bulk_modulus: base.solid_bulk_modulus * f(0.5, 2.0),
            solid_density: base.solid_density * f(0.7, 1.5),
            lame_lambda: base.lame_lambda * f(0.2, 1.5),
            lame_mu: base.lame_mu * f(0.3, 1.5),
            porosity: f(0.05, 0.5),
            permeability: 10f64.powf(f(-13.0, -11.0)),
            tortuosity: f(1.0, 3.5),
            fluid_bulk_modulus: base.fluid_bulk_modulus * f(0.5, 2.0),
            fluid_density: base.fluid_density * f(0.8, 1.2),
            viscosity: if f(0.0, 1.0) < 0.1 { 0.0 } else { 10f64.powf(f(-4.0, -2.0)) },
        };
        if m.validate().is_ok() && derive_coefficients(&m).is_ok() && assemble_jacobians(&m).is_ok() {
            return m;
        }
    }
}

/// Draws a random element problem with a step at a random fraction of the
/// CFL bound and a physically scaled initial state.
pub fn random_instance<R: Rng>(degree: usize, rng: &mut R) -> Result<OracleInstance> {
    let material = random_material(rng);
    let size = rng.random_range(1.0..10.0);
    let map_gradients: [[f64; 3]; 3] =
        std::array::from_fn(|a| std::array::from_fn(|b| size * (if a == b { 1.0 } else { 0.0 } + rng.random_range(-0.3..0.3))));
    let g_norm = map_gradients.iter().flatten().map(|v| v * v).sum::<f64>().sqrt();
    let v_max = max_wave_speed(&material)?;
    let dt = rng.random_range(0.2..1.0) * 0.5 / (2 * degree + 1) as f64 / (v_max * g_norm);
    let stress_scale = derive_coefficients(&material)?.effective_density * v_max;
    let nb = num_modes(degree);
    let q0 = (0..NUM_QUANTITIES * nb)
        .map(|i| {
            let p = i / nb;
            let scale = if p < 6 || p == 9 { stress_scale } else { 1.0 };
            scale * rng.random_range(-1.0..1.0)
        })
        .collect();
    Ok(OracleInstance { material, map_gradients, dt, q0 })
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleSummary {
    pub degree: usize,
    pub trials: usize,
    pub seed: u64,
    /// Deviation of the fast predictor from the dense LU solution.
    pub max_deviation_oracle: f64,
    pub max_deviation_alg1: f64,
    pub max_deviation_alg2: f64,
    pub max_residual: f64,
}

impl OracleSummary {
    pub fn max_deviation(&self) -> f64 {
        self.max_deviation_oracle.max(self.max_deviation_alg1).max(self.max_deviation_alg2)
    }
}

/// Compares the fast predictor against the dense LU solve and both
/// intermediate variants on `trials` seeded random instances.
pub fn run_oracle_suite(degree: usize, seed: u64, trials: usize, mode: ExecMode) -> Result<OracleSummary> {
    let reference = Arc::new(ReferenceOperators::new(degree)?);
    let results = mode.map(trials, |t| -> Result<[f64; 4]> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(t as u64));
        let inst = random_instance(degree, &mut rng)?;
        let op = inst.operator(reference.clone())?;
        let fast = predict(&op, &inst.q0)?;
        let dense = predict_oracle(&op, &inst.q0)?;
        let (alg1, _) = predict_intermediate(&op, &inst.q0, Variant::Alg1)?;
        let (alg2, _) = predict_intermediate(&op, &inst.q0, Variant::Alg2)?;
        Ok([
            relative_deviation(&fast, &dense),
            relative_deviation(&alg1, &fast),
            relative_deviation(&alg2, &fast),
            residual(&op, &inst.q0, &fast),
        ])
    });
    let mut summary = OracleSummary {
        degree,
        trials,
        seed,
        max_deviation_oracle: 0.0,
        max_deviation_alg1: 0.0,
        max_deviation_alg2: 0.0,
        max_residual: 0.0,
    };
    for r in results {
        let [d0, d1, d2, res] = r?;
        summary.max_deviation_oracle = summary.max_deviation_oracle.max(d0);
        summary.max_deviation_alg1 = summary.max_deviation_alg1.max(d1);
        summary.max_deviation_alg2 = summary.max_deviation_alg2.max(d2);
        summary.max_residual = summary.max_residual.max(res);
    }
    Ok(summary)
}
