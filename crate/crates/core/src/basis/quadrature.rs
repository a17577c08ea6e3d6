use super::jacobi::gauss_jacobi;
use crate::{Error, Result, MAX_DEGREE};

/// Highest polynomial exactness a rule can be requested for.
pub const MAX_EXACTNESS: usize = 2 * MAX_DEGREE + 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    /// `[0, 1]`
    Interval,
    /// `{x, y >= 0, x + y <= 1}`
    Triangle,
    /// `{x, y, z >= 0, x + y + z <= 1}`
    Tetrahedron,
}

#[derive(Debug, Clone)]
pub struct QuadratureRule {
    /// Unused trailing coordinates are zero.
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn integrate(&self, f: impl Fn([f64; 3]) -> f64) -> f64 {
        let values: Vec<f64> = self.points.iter().zip(&self.weights).map(|(&p, &w)| w * f(p)).collect();
        super::pairwise_sum(&values)
    }
}

/// Gauss rule on `[0, 1]` for the weight `(1 - x)^alpha`.
fn unit_rule(n: usize, alpha: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_jacobi(n, alpha as f64, 0.0);
    let scale = 0.5f64.powi(alpha as i32 + 1);
    (x.iter().map(|t| 0.5 * (1.0 + t)).collect(), w.iter().map(|w| w * scale).collect())
}

/// Rule exact for all polynomials of total degree `<= exactness`. Simplex
/// rules are collapsed-coordinate tensor products of Gauss-Jacobi rules.
pub fn quadrature_rule(domain: Domain, exactness: usize) -> Result<QuadratureRule> {
    if exactness > MAX_EXACTNESS {
        return Err(Error::UnsupportedQuadrature(exactness));
    }
    let n = exactness / 2 + 1;
    let mut rule = QuadratureRule { points: Vec::new(), weights: Vec::new() };
    match domain {
        Domain::Interval => {
            let (x, w) = unit_rule(n, 0);
            rule.points = x.iter().map(|&x| [x, 0.0, 0.0]).collect();
            rule.weights = w;
        }
        Domain::Triangle => {
            let (a, wa) = unit_rule(n, 0);
            let (b, wb) = unit_rule(n, 1);
            for (&b, &wb) in b.iter().zip(&wb) {
                for (&a, &wa) in a.iter().zip(&wa) {
                    rule.points.push([a * (1.0 - b), b, 0.0]);
                    rule.weights.push(wa * wb);
                }
            }
        }
        Domain::Tetrahedron => {
            let (a, wa) = unit_rule(n, 0);
            let (b, wb) = unit_rule(n, 1);
            let (c, wc) = unit_rule(n, 2);
            for (&c, &wc) in c.iter().zip(&wc) {
                for (&b, &wb) in b.iter().zip(&wb) {
                    for (&a, &wa) in a.iter().zip(&wa) {
                        rule.points.push([a * (1.0 - b) * (1.0 - c), b * (1.0 - c), c]);
                        rule.weights.push(wa * wb * wc);
                    }
                }
            }
        }
    }
    Ok(rule)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(n: u32) -> f64 {
        (1..=n).map(|k| k as f64).product()
    }

    /// Exact simplex monomial integrals: int x^i y^j z^k = i! j! k! / (i+j+k+d)!.
    fn exact(domain: Domain, e: [u32; 3]) -> f64 {
        let d = match domain {
            Domain::Interval => 1,
            Domain::Triangle => 2,
            Domain::Tetrahedron => 3,
        };
        factorial(e[0]) * factorial(e[1]) * factorial(e[2]) / factorial(e[0] + e[1] + e[2] + d)
    }

    #[test]
    fn monomial_sweep() {
        for domain in [Domain::Interval, Domain::Triangle, Domain::Tetrahedron] {
            for deg in 0..=MAX_EXACTNESS {
                let rule = quadrature_rule(domain, deg).unwrap();
                assert!(rule.weights.iter().all(|&w| w > 0.0));
                for i in 0..=deg as u32 {
                    for j in 0..=(deg as u32 - i) {
                        for k in 0..=(deg as u32 - i - j) {
                            let e = match domain {
                                Domain::Interval if j + k > 0 => continue,
                                Domain::Triangle if k > 0 => continue,
                                _ => [i, j, k],
                            };
                            let q = rule.integrate(|p| p[0].powi(e[0] as i32) * p[1].powi(e[1] as i32) * p[2].powi(e[2] as i32));
                            let ex = exact(domain, e);
                            assert!(((q - ex) / ex).abs() < 1e-13, "{domain:?} deg {deg} {e:?}: {q} vs {ex}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn midpoint_and_volume() {
        let r = quadrature_rule(Domain::Interval, 1).unwrap();
        assert_eq!(r.len(), 1);
        assert!((r.integrate(|p| p[0]) - 0.5).abs() < 1e-16);
        let t = quadrature_rule(Domain::Tetrahedron, 0).unwrap();
        assert!((t.weights.iter().sum::<f64>() - 1.0 / 6.0).abs() < 1e-16);
    }

    #[test]
    fn exactness_cap() {
        assert!(matches!(quadrature_rule(Domain::Tetrahedron, MAX_EXACTNESS + 1), Err(Error::UnsupportedQuadrature(_))));
    }
}
