use std::ops::{Add, Mul, Sub};

use super::check_degree;
use super::jacobi::{jacobi_value_and_derivative, recurrence};
use crate::Result;

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Number of modes of total degree `<= degree`.
pub fn num_modes(degree: usize) -> usize {
    binomial(degree + 3, 3)
}

/// Number of modes of total degree exactly `degree`.
pub fn num_modes_of_degree(degree: usize) -> usize {
    binomial(degree + 2, 2)
}

/// Index of the first mode of total degree `degree`.
pub fn block_start(degree: usize) -> usize {
    if degree == 0 {
        0
    } else {
        num_modes(degree - 1)
    }
}

/// A value together with its gradient in reference coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Dual3 {
    v: f64,
    d: [f64; 3],
}

impl Dual3 {
    const ONE: Dual3 = Dual3 { v: 1.0, d: [0.0; 3] };

    fn scale(self, s: f64) -> Dual3 {
        Dual3 { v: self.v * s, d: self.d.map(|x| x * s) }
    }
}

impl Add for Dual3 {
    type Output = Dual3;
    fn add(self, o: Dual3) -> Dual3 {
        Dual3 { v: self.v + o.v, d: [self.d[0] + o.d[0], self.d[1] + o.d[1], self.d[2] + o.d[2]] }
    }
}

impl Sub for Dual3 {
    type Output = Dual3;
    fn sub(self, o: Dual3) -> Dual3 {
        self + o.scale(-1.0)
    }
}

// Product rule for the gradient part.
#[allow(clippy::suspicious_arithmetic_impl)]
impl Mul for Dual3 {
    type Output = Dual3;
    fn mul(self, o: Dual3) -> Dual3 {
        let d = [0, 1, 2].map(|i| self.v * o.d[i] + self.d[i] * o.v);
        Dual3 { v: self.v * o.v, d }
    }
}

/// Homogenized Jacobi polynomials `Y^n P_n^{(alpha,0)}(X / Y)` for
/// `n = 0..=max`, evaluated without dividing by `Y`.
fn homogeneous_jacobi(max: usize, alpha: f64, x: Dual3, y: Dual3) -> Vec<Dual3> {
    let mut out = Vec::with_capacity(max + 1);
    out.push(Dual3::ONE);
    if max == 0 {
        return out;
    }
    let (a, b, _) = recurrence(0, alpha, 0.0);
    out.push(x.scale(a) + y.scale(b));
    let y2 = y * y;
    for n in 1..max {
        let (a, b, c) = recurrence(n, alpha, 0.0);
        let next = (x.scale(a) + y.scale(b)) * out[n] - (y2 * out[n - 1]).scale(c);
        out.push(next);
    }
    out
}

/// Orthogonal modal basis on the unit tetrahedron, ordered by total degree.
#[derive(Debug, Clone)]
pub struct SpatialBasis {
    degree: usize,
    modes: Vec<[usize; 3]>,
}

impl SpatialBasis {
    pub fn new(degree: usize) -> Result<Self> {
        check_degree(degree)?;
        Ok(Self::new_unchecked(degree))
    }

    /// Also accepts degree 0, used by tests and cost tables.
    pub(crate) fn new_unchecked(degree: usize) -> Self {
        let mut modes = Vec::with_capacity(num_modes(degree));
        for n in 0..=degree {
            for k in 0..=n {
                for j in 0..=n - k {
                    modes.push([n - j - k, j, k]);
                }
            }
        }
        SpatialBasis { degree, modes }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    /// Jacobi indices `(i, j, k)` of each mode.
    pub fn modes(&self) -> &[[usize; 3]] {
        &self.modes
    }

    /// Exact `||phi||^2` over the reference element.
    pub fn norm_squared(&self, mode: usize) -> f64 {
        let [i, j, k] = self.modes[mode];
        let (i, j, k) = (i as f64, j as f64, k as f64);
        1.0 / ((2.0 * i + 1.0) * 2.0 * (i + j + 1.0) * (2.0 * (i + j + k) + 3.0))
    }

    fn evaluate_dual(&self, p: [f64; 3]) -> Vec<Dual3> {
        let n = self.degree;
        let xi = Dual3 { v: p[0], d: [1.0, 0.0, 0.0] };
        let eta = Dual3 { v: p[1], d: [0.0, 1.0, 0.0] };
        let zeta = Dual3 { v: p[2], d: [0.0, 0.0, 1.0] };
        let one = Dual3::ONE;
        let xa = xi.scale(2.0) + eta + zeta - one;
        let ya = one - eta - zeta;
        let xb = eta.scale(2.0) + zeta - one;
        let yb = one - zeta;
        let qa = homogeneous_jacobi(n, 0.0, xa, ya);
        let qb: Vec<Vec<Dual3>> = (0..=n).map(|i| homogeneous_jacobi(n - i, 2.0 * i as f64 + 1.0, xb, yb)).collect();
        let zc = 2.0 * p[2] - 1.0;
        let pc: Vec<Vec<Dual3>> = (0..=n)
            .map(|ij| {
                let alpha = 2.0 * ij as f64 + 2.0;
                (0..=n - ij)
                    .map(|k| {
                        let (v, d) = jacobi_value_and_derivative(k, alpha, 0.0, zc);
                        Dual3 { v, d: [0.0, 0.0, 2.0 * d] }
                    })
                    .collect()
            })
            .collect();
        self.modes.iter().map(|&[i, j, k]| qa[i] * qb[i][j] * pc[i + j][k]).collect()
    }

    pub fn evaluate(&self, p: [f64; 3]) -> Vec<f64> {
        self.evaluate_dual(p).into_iter().map(|d| d.v).collect()
    }

    /// Values and reference-coordinate gradients of all modes.
    pub fn evaluate_with_gradients(&self, p: [f64; 3]) -> (Vec<f64>, Vec<[f64; 3]>) {
        self.evaluate_dual(p).into_iter().map(|d| (d.v, d.d)).unzip()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{quadrature_rule, Domain};

    #[test]
    fn counts() {
        assert_eq!(num_modes(0), 1);
        assert_eq!(num_modes(2), 10);
        assert_eq!(num_modes(7), 120);
        assert_eq!(num_modes_of_degree(3), 10);
        assert_eq!(block_start(3), 10);
        for d in 1..=7 {
            assert_eq!(SpatialBasis::new(d).unwrap().len(), num_modes(d));
            assert_eq!(block_start(d) + num_modes_of_degree(d), num_modes(d));
        }
        assert!(SpatialBasis::new(0).is_err());
        assert!(SpatialBasis::new(8).is_err());
    }

    #[test]
    fn ordering_by_degree() {
        let b = SpatialBasis::new(5).unwrap();
        for (m, ijk) in b.modes().iter().enumerate() {
            let deg = ijk.iter().sum::<usize>();
            assert!(m >= block_start(deg) && m < num_modes(deg));
        }
        assert_eq!(b.modes()[0], [0, 0, 0]);
        assert_eq!(&b.modes()[1..4], &[[1, 0, 0], [0, 1, 0], [0, 0, 1]]);
    }

    #[test]
    fn orthogonality_and_norms() {
        let basis = SpatialBasis::new(6).unwrap();
        let rule = quadrature_rule(Domain::Tetrahedron, 12).unwrap();
        let n = basis.len();
        let mut gram = vec![0.0; n * n];
        for (p, w) in rule.points.iter().zip(&rule.weights) {
            let v = basis.evaluate(*p);
            for a in 0..n {
                for b in 0..n {
                    gram[a * n + b] += w * v[a] * v[b];
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                let expected = if a == b { basis.norm_squared(a) } else { 0.0 };
                assert!((gram[a * n + b] - expected).abs() < 1e-13, "{a} {b}: {}", gram[a * n + b]);
            }
        }
        assert!((basis.norm_squared(0) - 1.0 / 6.0).abs() < 1e-16);
    }

    #[test]
    fn gradients_match_finite_differences() {
        let basis = SpatialBasis::new(7).unwrap();
        let h = 1e-6;
        for p in [[0.1, 0.2, 0.3], [0.25, 0.25, 0.25], [0.05, 0.6, 0.3], [0.0, 0.0, 0.999]] {
            let (_, g) = basis.evaluate_with_gradients(p);
            for dir in 0..3 {
                let mut pp = p;
                let mut pm = p;
                pp[dir] += h;
                pm[dir] -= h;
                let (vp, vm) = (basis.evaluate(pp), basis.evaluate(pm));
                for m in 0..basis.len() {
                    let fd = (vp[m] - vm[m]) / (2.0 * h);
                    assert!((fd - g[m][dir]).abs() < 1e-5 * (1.0 + fd.abs()), "mode {m} dir {dir}: {fd} vs {}", g[m][dir]);
                }
            }
        }
    }

    #[test]
    fn finite_at_collapsed_apex() {
        let basis = SpatialBasis::new(7).unwrap();
        let (v, g) = basis.evaluate_with_gradients([0.0, 0.0, 1.0]);
        assert!(v.iter().all(|x| x.is_finite()));
        assert!(g.iter().flatten().all(|x| x.is_finite()));
    }
}
