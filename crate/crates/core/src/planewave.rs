//! Analytic plane waves, L2 projection, error norms and the convergence
//! study on the periodic cube.
//!
//! A plane wave is `q(x, t) = Re sum_n alpha_n r_n exp(i (omega_n t - k.x))`
//! where `(omega_n, r_n)` are the eigenpairs of `k_x A + k_y B + k_z C - i E`.
//! Modes with `Im omega > 0` decay in time.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::basis::{num_modes, quadrature_rule, Domain, SpatialBasis};
use crate::dg::Discretization;
use crate::eigen::{eigen_decompose, pair_residual, CLUSTER_TOL};
use crate::material::assemble_jacobians;
use crate::mesh::{build_periodic_cube_mesh, Mesh};
use crate::{Error, ExecMode, MaterialParameters, Quantity, Result, NUM_QUANTITIES};

/// Relative magnitude below which a frequency counts as zero.
const ZERO_MODE_TOL: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct PlaneWaveSolution {
    pub wavenumber: [f64; 3],
    /// Nonzero modes by descending real part (ties by ascending imaginary
    /// part), then the zero modes.
    pub frequencies: Vec<Complex64>,
    /// Eigenvectors, unit 2-norm with the first nonzero entry real positive.
    pub modes: Vec<[Complex64; NUM_QUANTITIES]>,
    pub amplitudes: [f64; NUM_QUANTITIES],
}

/// Eigenpairs of the plane-wave operator for wave vector `k`, all amplitudes
/// zero.
pub fn plane_wave_modes(material: &MaterialParameters, k: [f64; 3]) -> Result<PlaneWaveSolution> {
    if k.iter().all(|&v| v == 0.0) {
        return Err(Error::Eigen("wave vector must be nonzero".into()));
    }
    let jac = assemble_jacobians(material)?;
    let an = jac.normal(k);
    let m = DMatrix::from_fn(NUM_QUANTITIES, NUM_QUANTITIES, |i, j| Complex64::new(an[(i, j)], -jac.source[(i, j)]));
    let eig = eigen_decompose(&m, CLUSTER_TOL)?;
    let scale = eig.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let tie = ZERO_MODE_TOL * scale;
    let mut order: Vec<usize> = (0..NUM_QUANTITIES).collect();
    order.sort_by(|&a, &b| {
        let (va, vb) = (eig.values[a], eig.values[b]);
        let (za, zb) = (va.norm() <= tie, vb.norm() <= tie);
        za.cmp(&zb)
            .then_with(|| if (va.re - vb.re).abs() <= tie { va.im.total_cmp(&vb.im) } else { vb.re.total_cmp(&va.re) })
            .then(a.cmp(&b))
    });
    let frequencies: Vec<Complex64> = order.iter().map(|&i| eig.values[i]).collect();
    let modes: Vec<[Complex64; NUM_QUANTITIES]> = order.iter().map(|&i| std::array::from_fn(|p| eig.vectors[(p, i)])).collect();
    for (w, r) in frequencies.iter().zip(&modes) {
        let v = nalgebra::DVector::from_column_slice(r);
        let res = pair_residual(&m, *w, &v);
        if !(res < 1e-10) {
            return Err(Error::Eigen(format!("plane-wave eigenpair residual {res:e} for omega = {w}")));
        }
    }
    Ok(PlaneWaveSolution { wavenumber: k, frequencies, modes, amplitudes: [0.0; NUM_QUANTITIES] })
}

impl PlaneWaveSolution {
    /// The benchmark wave: `k = (pi, pi, pi)`, amplitude 100 on the four
    /// leading modes.
    pub fn benchmark(material: &MaterialParameters) -> Result<Self> {
        let pi = std::f64::consts::PI;
        let mut s = plane_wave_modes(material, [pi, pi, pi])?;
        s.amplitudes[..4].fill(100.0);
        Ok(s)
    }

    pub fn with_amplitudes(mut self, amplitudes: [f64; NUM_QUANTITIES]) -> Self {
        self.amplitudes = amplitudes;
        self
    }

    /// Phase speeds `Re omega / |k|` of all modes.
    pub fn phase_speeds(&self) -> Vec<f64> {
        let k = self.wavenumber.iter().map(|v| v * v).sum::<f64>().sqrt();
        self.frequencies.iter().map(|w| w.re / k).collect()
    }

    pub fn evaluate(&self, x: [f64; 3], t: f64) -> [f64; NUM_QUANTITIES] {
        let kx: f64 = (0..3).map(|a| self.wavenumber[a] * x[a]).sum();
        let mut out = [0.0; NUM_QUANTITIES];
        for ((w, r), &alpha) in self.frequencies.iter().zip(&self.modes).zip(&self.amplitudes) {
            if alpha == 0.0 {
                continue;
            }
            let phase = (Complex64::i() * (w * t - kx)).exp() * alpha;
            for (o, rp) in out.iter_mut().zip(r) {
                *o += (rp * phase).re;
            }
        }
        out
    }
}

/// L2 projection of `field` onto the DG space, `[element][quantity][mode]`.
pub fn project<F>(mesh: &Mesh, degree: usize, exec: ExecMode, field: F) -> Result<Vec<f64>>
where
    F: Fn([f64; 3]) -> [f64; NUM_QUANTITIES] + Sync + Send,
{
    let basis = SpatialBasis::new(degree)?;
    let rule = quadrature_rule(Domain::Tetrahedron, 2 * degree + 2)?;
    let values: Vec<Vec<f64>> = rule.points.iter().map(|&p| basis.evaluate(p)).collect();
    let nb = basis.len();
    let mass: Vec<f64> = (0..nb).map(|k| basis.norm_squared(k)).collect();
    let per_element = exec.map(mesh.len(), |e| {
        let el = &mesh.elements[e];
        let mut out = vec![0.0; NUM_QUANTITIES * nb];
        for ((p, w), phi) in rule.points.iter().zip(&rule.weights).zip(&values) {
            let f = field(el.map(*p));
            for (q, fq) in f.iter().enumerate() {
                for k in 0..nb {
                    out[q * nb + k] += w * fq * phi[k];
                }
            }
        }
        for q in 0..NUM_QUANTITIES {
            for k in 0..nb {
                out[q * nb + k] /= mass[k];
            }
        }
        out
    });
    Ok(per_element.concat())
}

/// Initial condition of a plane wave.
pub fn project_initial_condition(mesh: &Mesh, solution: &PlaneWaveSolution, degree: usize, exec: ExecMode) -> Result<Vec<f64>> {
    project(mesh, degree, exec, |x| solution.evaluate(x, 0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Norm {
    L1,
    L2,
    LInf,
}

impl Norm {
    pub const ALL: [Norm; 3] = [Norm::L1, Norm::L2, Norm::LInf];

    pub fn name(self) -> &'static str {
        match self {
            Norm::L1 => "L1",
            Norm::L2 => "L2",
            Norm::LInf => "Linf",
        }
    }

    pub fn from_name(name: &str) -> Option<Norm> {
        Norm::ALL.into_iter().find(|n| n.name().eq_ignore_ascii_case(name))
    }
}

/// Errors per quantity in each norm.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport {
    pub l1: [f64; NUM_QUANTITIES],
    pub l2: [f64; NUM_QUANTITIES],
    pub linf: [f64; NUM_QUANTITIES],
}

impl ErrorReport {
    pub fn get(&self, norm: Norm, quantity: Quantity) -> f64 {
        let i = quantity.index();
        match norm {
            Norm::L1 => self.l1[i],
            Norm::L2 => self.l2[i],
            Norm::LInf => self.linf[i],
        }
    }
}

/// Errors of the DG field `dofs` against `exact`, by element quadrature of
/// exactness `2N + 2`; the maximum norm is taken over the quadrature points.
pub fn error_norms<F>(mesh: &Mesh, degree: usize, dofs: &[f64], exec: ExecMode, exact: F) -> Result<ErrorReport>
where
    F: Fn([f64; 3]) -> [f64; NUM_QUANTITIES] + Sync + Send,
{
    let basis = SpatialBasis::new(degree)?;
    let nb = basis.len();
    if dofs.len() != mesh.len() * NUM_QUANTITIES * nb {
        return Err(Error::Shape { expected: mesh.len() * NUM_QUANTITIES * nb, actual: dofs.len() });
    }
    let rule = quadrature_rule(Domain::Tetrahedron, 2 * degree + 2)?;
    let values: Vec<Vec<f64>> = rule.points.iter().map(|&p| basis.evaluate(p)).collect();
    let per_element = exec.map(mesh.len(), |e| {
        let el = &mesh.elements[e];
        let q = &dofs[e * NUM_QUANTITIES * nb..(e + 1) * NUM_QUANTITIES * nb];
        let mut acc = [[0.0; NUM_QUANTITIES]; 3];
        for ((p, w), phi) in rule.points.iter().zip(&rule.weights).zip(&values) {
            let f = exact(el.map(*p));
            for (i, fi) in f.iter().enumerate() {
                let approx: f64 = (0..nb).map(|k| q[i * nb + k] * phi[k]).sum();
                let err = (approx - fi).abs();
                acc[0][i] += el.det * w * err;
                acc[1][i] += el.det * w * err * err;
                acc[2][i] = acc[2][i].max(err);
            }
        }
        acc
    });
    let mut report = ErrorReport { l1: [0.0; NUM_QUANTITIES], l2: [0.0; NUM_QUANTITIES], linf: [0.0; NUM_QUANTITIES] };
    for acc in per_element {
        for i in 0..NUM_QUANTITIES {
            report.l1[i] += acc[0][i];
            report.l2[i] += acc[1][i];
            report.linf[i] = report.linf[i].max(acc[2][i]);
        }
    }
    report.l2 = report.l2.map(f64::sqrt);
    Ok(report)
}

/// Setup of a plane-wave convergence study.
#[derive(Debug, Clone, PartialEq)]
pub struct StudySettings {
    pub material: MaterialParameters,
    /// Convergence orders `N + 1`.
    pub orders: Vec<usize>,
    /// Subcubes per axis, ascending.
    pub subdivisions: Vec<usize>,
    pub norms: Vec<Norm>,
    pub t_end: f64,
    pub cfl_factor: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub order: usize,
    pub subdivisions: usize,
    pub h: f64,
    pub quantity: Quantity,
    pub norm: Norm,
    pub error: f64,
    /// `log(e_prev / e) / log(h_prev / h)` against the next coarser mesh.
    pub observed_order: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    pub fn row(&self, order: usize, subdivisions: usize, quantity: Quantity, norm: Norm) -> Option<&ConvergenceRow> {
        self.rows
            .iter()
            .find(|r| r.order == order && r.subdivisions == subdivisions && r.quantity == quantity && r.norm == norm)
    }
}

/// Error of one simulation: project, run to `t_end`, compare.
pub fn simulate_error(settings: &StudySettings, order: usize, subdivisions: usize, exec: ExecMode) -> Result<(f64, ErrorReport)> {
    let degree = order.checked_sub(1).ok_or(Error::UnsupportedDegree { degree: 0, min: 1, max: crate::MAX_DEGREE })?;
    let solution = PlaneWaveSolution::benchmark(&settings.material)?;
    let mesh = build_periodic_cube_mesh(subdivisions)?;
    let h = mesh.h;
    let disc = Discretization::new(mesh, degree, &settings.material)?.with_exec_mode(exec);
    let q0 = project_initial_condition(disc.mesh(), &solution, degree, exec)?;
    let (state, _) = disc.run(q0, settings.t_end, settings.cfl_factor, false)?;
    let t = state.time;
    let report = error_norms(disc.mesh(), degree, &state.dofs, exec, |x| solution.evaluate(x, t))?;
    Ok((h, report))
}

/// Runs every (order, mesh) cell and tabulates errors with observed orders.
pub fn convergence_study(settings: &StudySettings, exec: ExecMode) -> Result<ConvergenceTable> {
    for &n in &settings.subdivisions {
        build_periodic_cube_mesh(n)?;
    }
    let mut rows = Vec::new();
    for &order in &settings.orders {
        let mut previous: Option<(f64, ErrorReport)> = None;
        for &n in &settings.subdivisions {
            let (h, report) = simulate_error(settings, order, n, exec)?;
            for &norm in &settings.norms {
                for quantity in Quantity::ALL {
                    let error = report.get(norm, quantity);
                    let observed_order = previous.as_ref().map(|(hp, rp)| (rp.get(norm, quantity) / error).ln() / (hp / h).ln());
                    rows.push(ConvergenceRow { order, subdivisions: n, h, quantity, norm, error, observed_order });
                }
            }
            previous = Some((h, report));
        }
    }
    Ok(ConvergenceTable { rows })
}

/// Number of spatial coefficients per element and quantity.
pub fn modes_per_quantity(degree: usize) -> usize {
    num_modes(degree)
}
