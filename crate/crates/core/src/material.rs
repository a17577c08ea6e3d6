//! Biot poroelastic material model: derived coefficients, the flux Jacobians
//! `A`, `B`, `C`, the reactive source matrix `E` and wave speeds.
//!
//! State vector ordering (13 quantities):
//! `(s_xx, s_yy, s_zz, s_xy, s_yz, s_xz, u, v, w, p, u_f, v_f, w_f)`.
//! Normal stresses are negative in compression, the pore pressure is
//! positive in compression.

use nalgebra::{DMatrix, SMatrix};
use num_complex::Complex64;

use crate::eigen;
use crate::{Error, Result};

pub const NUM_QUANTITIES: usize = 13;

pub type Mat13 = SMatrix<f64, NUM_QUANTITIES, NUM_QUANTITIES>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(usize)]
pub enum Quantity {
    SigmaXX = 0,
    SigmaYY,
    SigmaZZ,
    SigmaXY,
    SigmaYZ,
    SigmaXZ,
    U,
    V,
    W,
    Pressure,
    UF,
    VF,
    WF,
}

impl Quantity {
    pub const ALL: [Quantity; NUM_QUANTITIES] = [
        Quantity::SigmaXX,
        Quantity::SigmaYY,
        Quantity::SigmaZZ,
        Quantity::SigmaXY,
        Quantity::SigmaYZ,
        Quantity::SigmaXZ,
        Quantity::U,
        Quantity::V,
        Quantity::W,
        Quantity::Pressure,
        Quantity::UF,
        Quantity::VF,
        Quantity::WF,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Quantity::SigmaXX => "s_xx",
            Quantity::SigmaYY => "s_yy",
            Quantity::SigmaZZ => "s_zz",
            Quantity::SigmaXY => "s_xy",
            Quantity::SigmaYZ => "s_yz",
            Quantity::SigmaXZ => "s_xz",
            Quantity::U => "u",
            Quantity::V => "v",
            Quantity::W => "w",
            Quantity::Pressure => "p",
            Quantity::UF => "u_f",
            Quantity::VF => "v_f",
            Quantity::WF => "w_f",
        }
    }

    pub fn from_name(name: &str) -> Option<Quantity> {
        Quantity::ALL.into_iter().find(|q| q.name() == name)
    }
}

/// The ten Biot input parameters (SI units).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaterialParameters {
    pub solid_bulk_modulus: f64,
    pub solid_density: f64,
    pub lame_lambda: f64,
    pub lame_mu: f64,
    pub porosity: f64,
    pub permeability: f64,
    pub tortuosity: f64,
    pub fluid_bulk_modulus: f64,
    pub fluid_density: f64,
    pub viscosity: f64,
}

impl MaterialParameters {
    /// Material of the periodic plane-wave convergence benchmark.
    pub fn plane_wave_benchmark() -> Self {
        MaterialParameters {
            solid_bulk_modulus: 4.0e10,
            solid_density: 2.5e3,
            lame_lambda: 1.2e10,
            lame_mu: 1.0e10,
            porosity: 0.2,
            permeability: 6.0e-13,
            tortuosity: 3.0,
            fluid_bulk_modulus: 2.5e9,
            fluid_density: 1.04e3,
            viscosity: 1.0e-3,
        }
    }

    /// Homogeneous full-space point-source material.
    pub fn homogeneous_fullspace() -> Self {
        MaterialParameters {
            solid_bulk_modulus: 2.0e10,
            solid_density: 2.08e3,
            lame_lambda: 5.28e9,
            lame_mu: 6.4e9,
            porosity: 0.4,
            permeability: 6.0e-13,
            tortuosity: 2.0,
            fluid_bulk_modulus: 2.5e9,
            fluid_density: 1.04e3,
            viscosity: 1.0e-3,
        }
    }

    /// Upper (z > 0) half-space of the two half-space contact problem.
    pub fn contact_upper() -> Self {
        MaterialParameters {
            solid_bulk_modulus: 4.0e10,
            solid_density: 2.5e3,
            lame_lambda: 1.2e10,
            lame_mu: 1.2e10,
            porosity: 0.2,
            permeability: 6.0e-13,
            tortuosity: 2.0,
            fluid_bulk_modulus: 2.5e9,
            fluid_density: 1.04e3,
            viscosity: 0.0,
        }
    }

    /// Lower (z < 0) half-space of the two half-space contact problem.
    pub fn contact_lower() -> Self {
        MaterialParameters {
            solid_bulk_modulus: 7.6e9,
            solid_density: 2.21e3,
            lame_lambda: 3.96e9,
            lame_mu: 3.96e9,
            porosity: 0.16,
            permeability: 1.0e-13,
            tortuosity: 2.0,
            fluid_bulk_modulus: 2.5e9,
            fluid_density: 1.04e3,
            viscosity: 0.0,
        }
    }

    /// Same material with an inviscid pore fluid.
    pub fn inviscid(mut self) -> Self {
        self.viscosity = 0.0;
        self
    }

    pub fn validate(&self) -> Result<()> {
        fn positive(key: &'static str, v: f64) -> Result<()> {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidMaterial { key, reason: format!("must be positive and finite, got {v}") })
            }
        }
        positive("K_S", self.solid_bulk_modulus)?;
        positive("rho_S", self.solid_density)?;
        positive("mu_M", self.lame_mu)?;
        positive("kappa", self.permeability)?;
        positive("T", self.tortuosity)?;
        positive("K_F", self.fluid_bulk_modulus)?;
        positive("rho_F", self.fluid_density)?;
        if !self.lame_lambda.is_finite() {
            return Err(Error::InvalidMaterial { key: "lambda_M", reason: "must be finite".into() });
        }
        let km = self.lame_lambda + 2.0 / 3.0 * self.lame_mu;
        if km <= 0.0 {
            return Err(Error::InvalidMaterial {
                key: "lambda_M",
                reason: format!("matrix bulk modulus lambda_M + 2/3 mu_M = {km} must be positive"),
            });
        }
        if !(self.porosity > 0.0 && self.porosity < 1.0) {
            return Err(Error::InvalidMaterial {
                key: "phi",
                reason: format!("porosity must lie in (0, 1), got {}", self.porosity),
            });
        }
        if !(self.viscosity >= 0.0 && self.viscosity.is_finite()) {
            return Err(Error::InvalidMaterial {
                key: "nu",
                reason: format!("viscosity must be non-negative, got {}", self.viscosity),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedCoefficients {
    pub matrix_bulk_modulus: f64,
    pub coupling_modulus: f64,
    pub effective_stress_coefficient: f64,
    pub effective_density: f64,
    /// `f64::INFINITY` for an inviscid fluid.
    pub biot_frequency: f64,
}

pub fn derive_coefficients(params: &MaterialParameters) -> Result<DerivedCoefficients> {
    params.validate()?;
    let p = params;
    let km = p.lame_lambda + 2.0 / 3.0 * p.lame_mu;
    let denominator = (1.0 - km / p.solid_bulk_modulus) - p.porosity * (1.0 - p.solid_bulk_modulus / p.fluid_bulk_modulus);
    if !(denominator > 0.0) {
        return Err(Error::NonPhysical(format!(
            "(1 - K_M/K_S) - phi*(1 - K_S/K_F) = {denominator:e} must be positive \
             (K_M = {km:e}, K_S = {:e}, K_F = {:e}, phi = {})",
            p.solid_bulk_modulus, p.fluid_bulk_modulus, p.porosity
        )));
    }
    let biot_frequency = if p.viscosity == 0.0 {
        f64::INFINITY
    } else {
        p.viscosity * p.porosity / (p.tortuosity * p.permeability * p.fluid_density) / (2.0 * std::f64::consts::PI)
    };
    Ok(DerivedCoefficients {
        matrix_bulk_modulus: km,
        coupling_modulus: p.solid_bulk_modulus / denominator,
        effective_stress_coefficient: 1.0 - km / p.solid_bulk_modulus,
        effective_density: p.porosity * p.fluid_density + (1.0 - p.porosity) * p.solid_density,
        biot_frequency,
    })
}

/// Flux Jacobians (one per coordinate) and the reactive source matrix of
/// `dq/dt + A dq/dx + B dq/dy + C dq/dz = E q`.
#[derive(Debug, Clone, PartialEq)]
pub struct Jacobians {
    pub flux: [Mat13; 3],
    pub source: Mat13,
}

const SXX: usize = 0;
const SXY: usize = 3;
const SYZ: usize = 4;
const SXZ: usize = 5;
const U: usize = 6;
const P: usize = 9;
const UF: usize = 10;

/// Stress components entering the divergence of row `i` of the stress tensor,
/// paired with the derivative direction.
const STRESS_DIVERGENCE: [[(usize, usize); 3]; 3] = [
    [(0, SXX), (1, SXY), (2, SXZ)],
    [(0, SXY), (1, 1), (2, SYZ)],
    [(0, SXZ), (1, SYZ), (2, 2)],
];

pub fn assemble_jacobians(params: &MaterialParameters) -> Result<Jacobians> {
    let d = derive_coefficients(params)?;
    let p = params;
    let (lambda, mu) = (p.lame_lambda, p.lame_mu);
    let m = d.coupling_modulus;
    let alpha = d.effective_stress_coefficient;
    let rho = d.effective_density;
    let rho_f = p.fluid_density;
    // Undrained Lame parameter.
    let lambda_u = lambda + m * alpha * alpha;

    let mut flux = [Mat13::zeros(); 3];

    // Constitutive law differentiated in time; strain rates from solid
    // velocity gradients, -dzeta/dt = div v_f.
    for (dir, a) in flux.iter_mut().enumerate() {
        for normal in 0..3 {
            a[(SXX + normal, U + dir)] = -(if normal == dir { lambda_u + 2.0 * mu } else { lambda_u });
            a[(SXX + normal, UF + dir)] = -m * alpha;
        }
        a[(P, U + dir)] = m * alpha;
        a[(P, UF + dir)] = m;
    }
    flux[0][(SXY, U + 1)] = -mu;
    flux[1][(SXY, U)] = -mu;
    flux[1][(SYZ, U + 2)] = -mu;
    flux[2][(SYZ, U + 1)] = -mu;
    flux[0][(SXZ, U + 2)] = -mu;
    flux[2][(SXZ, U)] = -mu;

    // Momentum balance and Darcy's law per direction i:
    //   [rho  rho_f ] d/dt [v_i  ]   [ div(sigma)_i              ]
    //   [rho_f m_f  ]      [v_f,i] = [ -dp/dx_i - nu/kappa v_f,i ]
    let m_f = rho_f * p.tortuosity / p.porosity;
    let det = rho * m_f - rho_f * rho_f;
    if !(det > 0.0) {
        return Err(Error::NonPhysical(format!("singular density matrix (rho*rho_f*T/phi - rho_f^2 = {det:e})")));
    }
    let damping = p.viscosity / p.permeability;
    let mut source = Mat13::zeros();
    for i in 0..3 {
        for &(dir, stress) in &STRESS_DIVERGENCE[i] {
            flux[dir][(U + i, stress)] = -m_f / det;
            flux[dir][(UF + i, stress)] = rho_f / det;
        }
        flux[i][(U + i, P)] = -rho_f / det;
        flux[i][(UF + i, P)] = rho / det;
        if damping > 0.0 {
            source[(U + i, UF + i)] = rho_f * damping / det;
            source[(UF + i, UF + i)] = -rho * damping / det;
        }
    }
    Ok(Jacobians { flux, source })
}

impl Jacobians {
    /// `n_x A + n_y B + n_z C`.
    pub fn normal(&self, n: [f64; 3]) -> Mat13 {
        self.flux[0] * n[0] + self.flux[1] * n[1] + self.flux[2] * n[2]
    }
}

/// Propagation speeds of the hyperbolic part in one direction.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveSpeeds {
    /// All 13 eigenvalues of `n_x A + n_y B + n_z C`, ascending.
    pub eigenvalues: Vec<f64>,
    pub fast_p: f64,
    pub shear: f64,
    pub slow_p: f64,
}

impl WaveSpeeds {
    /// Distinct positive speeds, descending.
    pub fn distinct(&self) -> [f64; 3] {
        [self.fast_p, self.shear, self.slow_p]
    }
}

/// Relative threshold below which an eigenvalue counts as zero.
pub const ZERO_EIGENVALUE_TOL: f64 = 1e-6;

/// Speeds from the real spectrum of the normal Jacobian. `E` does not enter.
pub fn wave_speeds(jac: &Jacobians, direction: [f64; 3]) -> Result<WaveSpeeds> {
    let norm = direction.iter().map(|x| x * x).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::NonUnitDirection(norm));
    }
    let an = jac.normal(direction);
    let m = DMatrix::from_fn(NUM_QUANTITIES, NUM_QUANTITIES, |i, j| Complex64::new(an[(i, j)], 0.0));
    let values = eigen::eigenvalues(&m)?;
    let scale = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if let Some(v) = values.iter().find(|v| v.im.abs() > 1e-8 * scale) {
        return Err(Error::Eigen(format!("complex eigenvalue {v} in hyperbolic operator")));
    }
    let mut eigenvalues: Vec<f64> = values.iter().map(|v| v.re).collect();
    eigenvalues.sort_by(f64::total_cmp);

    let mut positive: Vec<f64> = eigenvalues.iter().copied().filter(|&v| v > ZERO_EIGENVALUE_TOL * scale).collect();
    positive.sort_by(|a, b| b.total_cmp(a));
    if positive.len() != 4 {
        return Err(Error::Eigen(format!("expected 4 positive eigenvalues, found {}", positive.len())));
    }
    Ok(WaveSpeeds { eigenvalues, fast_p: positive[0], shear: 0.5 * (positive[1] + positive[2]), slow_p: positive[3] })
}

/// Largest wave speed (fast P) of a material.
pub fn max_wave_speed(params: &MaterialParameters) -> Result<f64> {
    let jac = assemble_jacobians(params)?;
    Ok(wave_speeds(&jac, [1.0, 0.0, 0.0])?.fast_p)
}
