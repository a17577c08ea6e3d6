use nalgebra::{DMatrix, SymmetricEigen};

/// Coefficients `(a, b, c)` of `P_{n+1} = (a x + b) P_n - c P_{n-1}` for the
/// Jacobi polynomials `P^{(alpha, beta)}` on `[-1, 1]`.
pub(crate) fn recurrence(n: usize, alpha: f64, beta: f64) -> (f64, f64, f64) {
    let n = n as f64;
    if n == 0.0 {
        return (0.5 * (alpha + beta + 2.0), 0.5 * (alpha - beta), 0.0);
    }
    let s = 2.0 * n + alpha + beta;
    let denom = 2.0 * (n + 1.0) * (n + alpha + beta + 1.0) * s;
    let a = (s + 1.0) * (s + 2.0) * s / denom;
    let b = (s + 1.0) * (alpha * alpha - beta * beta) / denom;
    let c = 2.0 * (n + alpha) * (n + beta) * (s + 2.0) / denom;
    (a, b, c)
}

/// `P_n^{(alpha, beta)}(x)` and its derivative.
pub fn jacobi_value_and_derivative(n: usize, alpha: f64, beta: f64, x: f64) -> (f64, f64) {
    let (mut p0, mut d0) = (1.0, 0.0);
    if n == 0 {
        return (p0, d0);
    }
    let (a, b, _) = recurrence(0, alpha, beta);
    let (mut p1, mut d1) = (a * x + b, a);
    for k in 1..n {
        let (a, b, c) = recurrence(k, alpha, beta);
        let p2 = (a * x + b) * p1 - c * p0;
        let d2 = a * p1 + (a * x + b) * d1 - c * d0;
        p0 = p1;
        d0 = d1;
        p1 = p2;
        d1 = d2;
    }
    (p1, d1)
}

/// Gauss-Jacobi rule with `n` points for the weight `(1-x)^alpha (1+x)^beta`
/// on `[-1, 1]` (Golub-Welsch, nodes polished by Newton steps).
pub fn gauss_jacobi(n: usize, alpha: f64, beta: f64) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0);
    let ab = alpha + beta;
    let mut jm = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        let kf = k as f64;
        let s = 2.0 * kf + ab;
        jm[(k, k)] = if k == 0 { (beta - alpha) / (ab + 2.0) } else { (beta * beta - alpha * alpha) / (s * (s + 2.0)) };
        if k + 1 < n {
            let k1 = kf + 1.0;
            let s1 = 2.0 * k1 + ab;
            let num = 4.0 * k1 * (k1 + alpha) * (k1 + beta) * (k1 + ab);
            let den = s1 * s1 * (s1 + 1.0) * (s1 - 1.0);
            let off = (num / den).sqrt();
            jm[(k, k + 1)] = off;
            jm[(k + 1, k)] = off;
        }
    }
    let eig = SymmetricEigen::new(jm);
    let mu0 = 2f64.powf(ab + 1.0) * gamma(alpha + 1.0) * gamma(beta + 1.0) / gamma(ab + 2.0);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let mut x = eig.eigenvalues[i];
            for _ in 0..3 {
                let (p, dp) = jacobi_value_and_derivative(n, alpha, beta, x);
                if dp != 0.0 {
                    x -= p / dp;
                }
            }
            (x, mu0 * eig.eigenvectors[(0, i)].powi(2))
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

/// Gamma function at the non-negative integer arguments used here.
fn gamma(x: f64) -> f64 {
    assert!((x - x.round()).abs() < 1e-14 && x >= 1.0, "integer Jacobi parameters only");
    (1..x.round() as u64).map(|k| k as f64).product()
}
