use super::jacobi::jacobi_value_and_derivative;

/// Shifted Legendre polynomials `P_s(2 tau - 1)` on `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TemporalBasis {
    degree: usize,
}

impl TemporalBasis {
    pub fn new(degree: usize) -> Self {
        TemporalBasis { degree }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.degree + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn evaluate(&self, tau: f64) -> Vec<f64> {
        (0..=self.degree).map(|s| jacobi_value_and_derivative(s, 0.0, 0.0, 2.0 * tau - 1.0).0).collect()
    }

    pub fn derivative(&self, tau: f64) -> Vec<f64> {
        (0..=self.degree).map(|s| 2.0 * jacobi_value_and_derivative(s, 0.0, 0.0, 2.0 * tau - 1.0).1).collect()
    }
}
