//! Dense eigen-decomposition of small non-symmetric (complex) matrices.
//!
//! The poroelastic operators mix stresses (~1e10 Pa) with velocities, so the
//! matrix is first balanced by a diagonal similarity with power-of-two
//! factors. Eigenvalues come from a complex Schur decomposition; eigenvectors
//! of each (possibly repeated) eigenvalue are the null space of
//! `M - lambda I`, computed by SVD and brought to a canonical basis.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::{Error, Result};

type CMat = DMatrix<Complex64>;

#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<Complex64>,
    /// Eigenvectors as columns, in the order of `values`.
    pub vectors: CMat,
}

/// Default relative tolerance for grouping numerically repeated eigenvalues.
pub const CLUSTER_TOL: f64 = 1e-6;

/// Parlett-Reinsch balancing. Returns `(D^-1 M D, diag(D))`.
fn balance(m: &CMat) -> (CMat, Vec<f64>) {
    let n = m.nrows();
    let mut a = m.clone();
    let mut d = vec![1.0; n];
    let radix = 2.0f64;
    loop {
        let mut converged = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += a[(j, i)].norm();
                    r += a[(i, j)].norm();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut c2 = c;
            let mut r2 = r;
            while c2 < r2 / radix {
                c2 *= radix;
                r2 /= radix;
                f *= radix;
            }
            while c2 >= r2 * radix {
                c2 /= radix;
                r2 *= radix;
                f /= radix;
            }
            if (c2 + r2) < 0.95 * s {
                converged = false;
                d[i] *= f;
                for j in 0..n {
                    a[(i, j)] /= f;
                    a[(j, i)] *= f;
                }
            }
        }
        if converged {
            break;
        }
    }
    (a, d)
}

fn schur_eigenvalues(m: &CMat) -> Result<Vec<Complex64>> {
    let schur = nalgebra::linalg::Schur::try_new(m.clone(), 1e-15, 10_000)
        .ok_or_else(|| Error::Eigen("Schur iteration did not converge".into()))?;
    let values = schur
        .eigenvalues()
        .ok_or_else(|| Error::Eigen("Schur form is not triangular".into()))?;
    Ok(values.iter().copied().collect())
}

pub fn eigenvalues(m: &CMat) -> Result<Vec<Complex64>> {
    let (balanced, _) = balance(m);
    schur_eigenvalues(&balanced)
}

/// Smallest grouping tolerance tried before a cluster is declared defective.
const MIN_CLUSTER_TOL: f64 = 1e-13;

/// Groups eigenvalues whose distance is below `tol * scale`.
fn cluster(values: &[Complex64], tol: f64, scale: f64) -> Vec<Vec<Complex64>> {
    let mut clusters: Vec<(Vec<Complex64>, Complex64)> = Vec::new();
    for &v in values {
        match clusters.iter_mut().find(|(_, c)| (*c - v).norm() <= tol * scale) {
            Some((members, center)) => {
                members.push(v);
                *center = members.iter().sum::<Complex64>() / members.len() as f64;
            }
            None => clusters.push((vec![v], v)),
        }
    }
    clusters.into_iter().map(|(members, _)| members).collect()
}

/// Canonical basis (as rows) of the `mult`-dimensional null space of
/// `b - center I`, or `None` if that null space is smaller.
fn null_space(b: &CMat, center: Complex64, mult: usize, scale: f64) -> Result<Option<CMat>> {
    let n = b.nrows();
    let mut shifted = b.clone();
    for i in 0..n {
        shifted[(i, i)] -= center;
    }
    let svd = shifted.svd(false, true);
    let v_t = svd.v_t.ok_or_else(|| Error::Eigen("SVD did not return V".into()))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]));
    if svd.singular_values[order[mult - 1]] > 1e-10 * scale {
        return Ok(None);
    }
    let mut basis = CMat::zeros(mult, n);
    for (row, &idx) in order[..mult].iter().enumerate() {
        for c in 0..n {
            basis[(row, c)] = v_t[(idx, c)].conj();
        }
    }
    Ok(Some(canonical_basis(basis)))
}

/// Reduced row echelon form of the rows of `basis` (m x n); pivots are the
/// first column, left to right, holding an entry above 1e-3 of the largest
/// remaining magnitude.
fn canonical_basis(mut basis: CMat) -> CMat {
    let (m, n) = basis.shape();
    let mut row = 0;
    for col in 0..n {
        if row == m {
            break;
        }
        let remaining_max = (row..m).flat_map(|r| (0..n).map(move |c| (r, c))).map(|(r, c)| basis[(r, c)].norm()).fold(0.0, f64::max);
        let (best, best_val) = (row..m).map(|r| (r, basis[(r, col)].norm())).fold((row, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best_val <= 1e-3 * remaining_max {
            continue;
        }
        basis.swap_rows(row, best);
        let pivot = basis[(row, col)];
        for c in 0..n {
            basis[(row, c)] /= pivot;
        }
        for r in 0..m {
            if r != row {
                let f = basis[(r, col)];
                if f != Complex64::new(0.0, 0.0) {
                    for c in 0..n {
                        let v = basis[(row, c)];
                        basis[(r, c)] -= f * v;
                    }
                }
            }
        }
        row += 1;
    }
    basis
}

/// Unit 2-norm, first non-negligible component real and positive.
pub fn normalize(v: &mut DVector<Complex64>) {
    let norm = v.norm();
    if norm == 0.0 {
        return;
    }
    *v /= Complex64::new(norm, 0.0);
    let max = v.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if let Some(first) = v.iter().copied().find(|c| c.norm() > 1e-8 * max) {
        let phase = first / first.norm();
        *v /= phase;
    }
}

/// Relative residual `|B w - lambda w|_inf / (|B|_inf |w|_inf)` of an
/// eigenpair, measured after balancing (`B = D^-1 M D`, `w = D^-1 v`) so that
/// rows of very different magnitude count alike.
pub fn pair_residual(m: &CMat, value: Complex64, vector: &DVector<Complex64>) -> f64 {
    let (b, d) = balance(m);
    let w = DVector::from_fn(vector.len(), |i, _| vector[i] / d[i]);
    let r = &b * &w - &w * value;
    let b_norm = (0..b.nrows()).map(|i| b.row(i).iter().map(|x| x.norm()).sum::<f64>()).fold(0.0, f64::max);
    let w_norm = w.iter().map(|x| x.norm()).fold(0.0, f64::max);
    let denom = b_norm * w_norm;
    let r_norm = r.iter().map(|x| x.norm()).fold(0.0, f64::max);
    if denom == 0.0 {
        r_norm
    } else {
        r_norm / denom
    }
}

/// Full eigen-decomposition of a diagonalizable matrix. Repeated eigenvalues
/// (within `cluster_tol`) get a canonical basis of their eigenspace; a
/// defective matrix is reported as an error.
pub fn eigen_decompose(m: &CMat, cluster_tol: f64) -> Result<EigenDecomposition> {
    let n = m.nrows();
    let (balanced, d) = balance(m);
    let values = schur_eigenvalues(&balanced)?;
    let scale = balanced.iter().map(|v| v.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let value_scale = values.iter().map(|v| v.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);

    let mut out_values = Vec::with_capacity(n);
    let mut columns: Vec<DVector<Complex64>> = Vec::with_capacity(n);
    // Close but distinct eigenvalues can be grouped by mistake; such groups
    // are split with a tighter tolerance before giving up.
    let mut pending: Vec<(Vec<Complex64>, f64)> =
        cluster(&values, cluster_tol, value_scale).into_iter().rev().map(|c| (c, cluster_tol)).collect();
    while let Some((members, tol)) = pending.pop() {
        let mult = members.len();
        let center = members.iter().sum::<Complex64>() / mult as f64;
        let Some(basis) = null_space(&balanced, center, mult, scale)? else {
            if mult > 1 && tol > MIN_CLUSTER_TOL {
                let finer = tol * 1e-3;
                pending.extend(cluster(&members, finer, value_scale).into_iter().rev().map(|c| (c, finer)));
                continue;
            }
            return Err(Error::Eigen(format!("eigenvalue {center} of multiplicity {mult} is defective")));
        };
        for row in 0..mult {
            let mut v = DVector::from_fn(n, |i, _| basis[(row, i)] * d[i]);
            normalize(&mut v);
            out_values.push(center);
            columns.push(v);
        }
    }
    let vectors = CMat::from_columns(&columns);
    Ok(EigenDecomposition { values: out_values, vectors })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn repeated_eigenvalue_gets_full_eigenspace() {
        // diag(2, 2, -1) under a similarity transform.
        let p = DMatrix::from_row_slice(3, 3, &[1.0, 2.0, 0.0, 0.0, 1.0, 3.0, 1.0, 0.0, 1.0]);
        let pinv = p.clone().try_inverse().unwrap();
        let dm = DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 2.0, -1.0]));
        let m = (&p * dm * pinv).map(c);
        let eig = eigen_decompose(&m, CLUSTER_TOL).unwrap();
        assert_eq!(eig.values.len(), 3);
        for (i, v) in eig.values.iter().enumerate() {
            let col = eig.vectors.column(i).into_owned();
            assert!(pair_residual(&m, *v, &col) < 1e-12);
            assert!((col.norm() - 1.0).abs() < 1e-14);
        }
        let twos = eig.values.iter().filter(|v| (**v - c(2.0)).norm() < 1e-10).count();
        assert_eq!(twos, 2);
        // the two eigenvectors for 2 are independent
        let idx: Vec<usize> = (0..3).filter(|&i| (eig.values[i] - c(2.0)).norm() < 1e-10).collect();
        let a = eig.vectors.column(idx[0]);
        let b = eig.vectors.column(idx[1]);
        let overlap = a.dotc(&b).norm();
        assert!(overlap < 0.999);
    }

    #[test]
    fn close_distinct_eigenvalues_are_split() {
        let p = DMatrix::from_row_slice(3, 3, &[1.0, 2.0, 0.0, 0.0, 1.0, 3.0, 1.0, 0.0, 1.0]);
        let pinv = p.clone().try_inverse().unwrap();
        let dm = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 1.0, 1.0 + 1e-8]));
        let m = (&p * dm * pinv).map(c);
        let eig = eigen_decompose(&m, CLUSTER_TOL).unwrap();
        assert_eq!(eig.values.len(), 3);
        for (i, v) in eig.values.iter().enumerate() {
            assert!(pair_residual(&m, *v, &eig.vectors.column(i).into_owned()) < 1e-12);
        }
        assert_eq!(eig.values.iter().filter(|v| (**v - c(1.0)).norm() < 1e-12).count(), 2);
    }

    #[test]
    fn defective_matrix_rejected() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0]).map(c);
        assert!(eigen_decompose(&m, CLUSTER_TOL).is_err());
    }

    #[test]
    fn badly_scaled_matrix() {
        let m = DMatrix::from_row_slice(2, 2, &[0.0, 1e10, 1e-4, 0.0]).map(c);
        let eig = eigen_decompose(&m, CLUSTER_TOL).unwrap();
        let mut re: Vec<f64> = eig.values.iter().map(|v| v.re).collect();
        re.sort_by(f64::total_cmp);
        assert!((re[1] - 1e3).abs() < 1e-9);
        assert!((re[0] + 1e3).abs() < 1e-9);
    }
}
