use crate::basis::{num_modes, TemporalBasis};
use crate::{Error, Result, NUM_QUANTITIES};

/// Space-time coefficients of one element, stored `[quantity][spatial
/// mode][temporal mode]` with the temporal index fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct DofTensor {
    degree: usize,
    modes: usize,
    data: Vec<f64>,
}

impl DofTensor {
    pub fn zeros(degree: usize) -> Self {
        let modes = num_modes(degree);
        DofTensor { degree, modes, data: vec![0.0; NUM_QUANTITIES * modes * (degree + 1)] }
    }

    pub fn from_vec(degree: usize, data: Vec<f64>) -> Result<Self> {
        let mut t = DofTensor::zeros(degree);
        if data.len() != t.data.len() {
            return Err(Error::Shape { expected: t.data.len(), actual: data.len() });
        }
        t.data = data;
        Ok(t)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn num_spatial_modes(&self) -> usize {
        self.modes
    }

    pub fn num_temporal_modes(&self) -> usize {
        self.degree + 1
    }

    /// Total number of unknowns, `13 * B * (N + 1)`.
    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn index(&self, p: usize, l: usize, s: usize) -> usize {
        (p * self.modes + l) * (self.degree + 1) + s
    }

    #[inline]
    pub fn get(&self, p: usize, l: usize, s: usize) -> f64 {
        self.data[self.index(p, l, s)]
    }

    #[inline]
    pub fn set(&mut self, p: usize, l: usize, s: usize, v: f64) {
        let i = self.index(p, l, s);
        self.data[i] = v;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    /// Average over the step, `[quantity][spatial mode]`. Only the constant
    /// temporal mode has a nonzero integral.
    pub fn time_average(&self) -> Vec<f64> {
        self.data.chunks_exact(self.degree + 1).map(|c| c[0]).collect()
    }

    /// Spatial coefficients at reference time `tau`, `[quantity][spatial mode]`.
    pub fn evaluate_in_time(&self, tau: f64) -> Vec<f64> {
        let chi = TemporalBasis::new(self.degree).evaluate(tau);
        self.data.chunks_exact(self.degree + 1).map(|c| c.iter().zip(&chi).map(|(a, b)| a * b).sum()).collect()
    }

    /// Largest magnitude per quantity.
    pub fn max_per_quantity(&self) -> [f64; NUM_QUANTITIES] {
        let len = self.modes * (self.degree + 1);
        std::array::from_fn(|p| self.data[p * len..(p + 1) * len].iter().fold(0.0, |m, v| f64::max(m, v.abs())))
    }
}
