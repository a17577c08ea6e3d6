use std::collections::HashMap;
use std::sync::Arc;

use nalgebra::{Const, DMatrix, Dyn, OMatrix};

use super::flux::{face_mass_matrices, upwind_splitting, FluxSplitting};
use crate::basis::{num_modes, ReferenceOperators, SpatialBasis};
use crate::material::{assemble_jacobians, max_wave_speed};
use crate::mesh::Mesh;
use crate::stp::{build_operator, predict, StpOperator};
use crate::{Error, ExecMode, Jacobians, MaterialParameters, Result, NUM_QUANTITIES};

/// Coefficients of one element, `13 x B`.
type Block = OMatrix<f64, Const<NUM_QUANTITIES>, Dyn>;

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationState {
    /// Spatial coefficients, `[element][quantity][mode]`.
    pub dofs: Vec<f64>,
    pub time: f64,
    /// Last step size taken.
    pub dt: f64,
    pub step: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Diagnostics {
    pub steps: usize,
    /// Regular (not shortened) step size.
    pub dt: f64,
    /// `(time, domain integral of each quantity)`, recorded after every step
    /// when requested.
    pub conserved: Vec<(f64, [f64; NUM_QUANTITIES])>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct FaceLink {
    splitting: usize,
    mass: usize,
}

/// Global time step `c / (2N + 1) * min_e d_e / v_e`, with `d_e` the insphere
/// diameter and `v_e` the fastest wave speed of the element material.
pub fn cfl_timestep(mesh: &Mesh, material: &MaterialParameters, degree: usize, cfl_factor: f64) -> Result<f64> {
    let v = max_wave_speed(material)?;
    let d = mesh.elements.iter().map(|e| e.insphere_diameter()).fold(f64::INFINITY, f64::min);
    Ok(cfl_factor / (2 * degree + 1) as f64 * d / v)
}

/// Everything needed to advance a DG state on a fixed mesh.
pub struct Discretization {
    mesh: Mesh,
    degree: usize,
    reference: Arc<ReferenceOperators>,
    jacobians: Vec<Jacobians>,
    speeds: Vec<f64>,
    element_material: Vec<usize>,
    /// `T^a[l][k] = K^a[l][k] / M_kk`.
    volume: [DMatrix<f64>; 3],
    splittings: Vec<FluxSplitting>,
    /// Transposed face trace products `(own^T, neighbour^T)`.
    face_masses: Vec<(DMatrix<f64>, DMatrix<f64>)>,
    links: Vec<[FaceLink; 4]>,
    exec: ExecMode,
}

impl Discretization {
    pub fn new(mesh: Mesh, degree: usize, material: &MaterialParameters) -> Result<Self> {
        let n = mesh.len();
        Self::with_materials(mesh, degree, std::slice::from_ref(material), vec![0; n])
    }

    /// Per-element materials. Faces between different materials use the
    /// average of both normal Jacobians.
    pub fn with_materials(mesh: Mesh, degree: usize, materials: &[MaterialParameters], element_material: Vec<usize>) -> Result<Self> {
        if element_material.len() != mesh.len() {
            return Err(Error::Shape { expected: mesh.len(), actual: element_material.len() });
        }
        if let Some(&bad) = element_material.iter().find(|&&m| m >= materials.len()) {
            return Err(Error::Mesh(format!("element material index {bad} out of range")));
        }
        let reference = Arc::new(ReferenceOperators::new(degree)?);
        let jacobians = materials.iter().map(assemble_jacobians).collect::<Result<Vec<_>>>()?;
        let speeds = materials.iter().map(max_wave_speed).collect::<Result<Vec<_>>>()?;
        let sp = &reference.spatial;
        let volume = sp.stiffness.clone().map(|k| {
            let mut t = k;
            for (c, m) in sp.mass.iter().enumerate() {
                t.column_mut(c).scale_mut(1.0 / m);
            }
            t
        });

        let basis = SpatialBasis::new(degree)?;
        let mut splittings = Vec::new();
        let mut split_index: HashMap<([i64; 3], usize, usize, bool), usize> = HashMap::new();
        let mut face_masses = Vec::new();
        let mut mass_index: HashMap<(usize, [usize; 3]), usize> = HashMap::new();
        let mut links = Vec::with_capacity(mesh.len());
        for (e, el) in mesh.elements.iter().enumerate() {
            let mut el_links = [FaceLink { splitting: 0, mass: 0 }; 4];
            for (f, face) in el.faces.iter().enumerate() {
                let (mo, mn) = (element_material[e], element_material[face.neighbor]);
                // Splittings are computed once per unordered material pair and
                // normal direction; the opposite normal reuses them negated so
                // paired faces exchange exactly opposite fluxes.
                let quantized = face.normal.map(|x| (x * 1e9).round() as i64);
                let flip = quantized.iter().find(|&&x| x != 0).is_some_and(|&x| x < 0);
                let canonical = if flip { quantized.map(|x| -x) } else { quantized };
                let pair = (mo.min(mn), mo.max(mn));
                let key = (canonical, pair.0, pair.1, flip);
                let splitting = match split_index.get(&key) {
                    Some(&i) => i,
                    None => {
                        let base_key = (canonical, pair.0, pair.1, false);
                        let base = match split_index.get(&base_key) {
                            Some(&i) => i,
                            None => {
                                let normal = if flip { face.normal.map(|x| -x) } else { face.normal };
                                let nb = (pair.0 != pair.1).then(|| &jacobians[pair.1]);
                                splittings.push(upwind_splitting(&jacobians[pair.0], nb, normal)?);
                                split_index.insert(base_key, splittings.len() - 1);
                                splittings.len() - 1
                            }
                        };
                        if flip {
                            let b = &splittings[base];
                            splittings.push(FluxSplitting { plus: -b.minus, minus: -b.plus });
                            split_index.insert(key, splittings.len() - 1);
                            splittings.len() - 1
                        } else {
                            base
                        }
                    }
                };
                let mkey = (f, face.neighbor_vertices);
                let mass = match mass_index.get(&mkey) {
                    Some(&i) => i,
                    None => {
                        let (own, nb) = face_mass_matrices(&basis, f, face.neighbor_vertices)?;
                        face_masses.push((own.transpose(), nb.transpose()));
                        mass_index.insert(mkey, face_masses.len() - 1);
                        face_masses.len() - 1
                    }
                };
                el_links[f] = FaceLink { splitting, mass };
            }
            links.push(el_links);
        }
        Ok(Discretization {
            mesh,
            degree,
            reference,
            jacobians,
            speeds,
            element_material,
            volume,
            splittings,
            face_masses,
            links,
            exec: ExecMode::default(),
        })
    }

    pub fn with_exec_mode(mut self, exec: ExecMode) -> Self {
        self.exec = exec;
        self
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn reference(&self) -> &Arc<ReferenceOperators> {
        &self.reference
    }

    /// Values per element, `13 * B`.
    pub fn element_len(&self) -> usize {
        NUM_QUANTITIES * num_modes(self.degree)
    }

    pub fn state_len(&self) -> usize {
        self.mesh.len() * self.element_len()
    }

    /// Number of distinct flux splittings and face trace matrices in use.
    pub fn cache_sizes(&self) -> (usize, usize) {
        (self.splittings.len(), self.face_masses.len())
    }

    pub fn flux_splitting(&self, element: usize, face: usize) -> &FluxSplitting {
        &self.splittings[self.links[element][face].splitting]
    }

    pub fn cfl_timestep(&self, cfl_factor: f64) -> f64 {
        let c = cfl_factor / (2 * self.degree + 1) as f64;
        self.mesh
            .elements
            .iter()
            .zip(&self.element_material)
            .map(|(el, &m)| c * el.insphere_diameter() / self.speeds[m])
            .fold(f64::INFINITY, f64::min)
    }

    /// Predictor operators of all elements for step size `dt`.
    pub fn operators(&self, dt: f64) -> Result<Vec<StpOperator>> {
        self.exec
            .map(self.mesh.len(), |e| {
                let jac = &self.jacobians[self.element_material[e]];
                build_operator(jac, self.mesh.elements[e].inverse_jacobian, dt, self.reference.clone())
            })
            .into_iter()
            .collect()
    }

    /// Integral over the domain of every quantity.
    pub fn domain_integrals(&self, dofs: &[f64]) -> [f64; NUM_QUANTITIES] {
        let nb = num_modes(self.degree);
        let m0 = self.reference.spatial.mass[0];
        let mut out = [0.0; NUM_QUANTITIES];
        for (el, chunk) in self.mesh.elements.iter().zip(dofs.chunks_exact(self.element_len())) {
            for (p, o) in out.iter_mut().enumerate() {
                *o += el.det * m0 * chunk[p * nb];
            }
        }
        out
    }

    /// Change of the coefficients of `element` over one step from the
    /// time-averaged predictor coefficients of all elements.
    fn correction(&self, element: usize, averages: &[Block], op: &StpOperator) -> Block {
        let el = &self.mesh.elements[element];
        let q = &averages[element];
        let mut delta = op.scaled_source() * q;
        for (a_star, t) in op.scaled_jacobians().iter().zip(&self.volume) {
            delta += (a_star * q) * t;
        }
        let mass = &self.reference.spatial.mass;
        for (f, face) in el.faces.iter().enumerate() {
            let link = self.links[element][f];
            let split = &self.splittings[link.splitting];
            let (own_t, nb_t) = &self.face_masses[link.mass];
            let flux = (split.plus * q) * own_t + (split.minus * &averages[face.neighbor]) * nb_t;
            let factor = 2.0 * face.area * op.dt() / el.det;
            for (k, m) in mass.iter().enumerate() {
                let s = factor / m;
                for p in 0..NUM_QUANTITIES {
                    delta[(p, k)] -= s * flux[(p, k)];
                }
            }
        }
        delta
    }

    /// Advances `state` by one step with operators built for `ops[0].dt()`.
    pub fn step(&self, state: &mut SimulationState, ops: &[StpOperator]) -> Result<()> {
        let len = self.element_len();
        let step = state.step;
        let averages: Vec<Block> = self
            .exec
            .map(self.mesh.len(), |e| {
                predict(&ops[e], &state.dofs[e * len..(e + 1) * len])
                    .map(|t| Block::from_row_slice(&t.time_average()))
                    .map_err(|err| match err {
                        Error::NonFiniteInput => Error::NonFinite { element: e, step },
                        other => other,
                    })
            })
            .into_iter()
            .collect::<Result<_>>()?;
        let nb = num_modes(self.degree);
        self.exec.try_for_each_chunk(&mut state.dofs, len, |e, chunk| {
            let delta = self.correction(e, &averages, &ops[e]);
            for p in 0..NUM_QUANTITIES {
                for k in 0..nb {
                    chunk[p * nb + k] += delta[(p, k)];
                }
            }
            if chunk.iter().all(|v| v.is_finite()) {
                Ok(())
            } else {
                Err(Error::NonFinite { element: e, step: step + 1 })
            }
        })?;
        state.dt = ops.first().map_or(0.0, |o| o.dt());
        state.time += state.dt;
        state.step += 1;
        Ok(())
    }

    /// Advances `initial` from `t = 0` to `t_end` with the global CFL step,
    /// shortening the last step to land on `t_end`.
    pub fn run(&self, initial: Vec<f64>, t_end: f64, cfl_factor: f64, log_conserved: bool) -> Result<(SimulationState, Diagnostics)> {
        if initial.len() != self.state_len() {
            return Err(Error::Shape { expected: self.state_len(), actual: initial.len() });
        }
        if !(t_end >= 0.0 && t_end.is_finite()) {
            return Err(Error::InvalidTimeStep(t_end));
        }
        let dt = self.cfl_timestep(cfl_factor);
        let steps = step_count(t_end, dt);
        let mut state = SimulationState { dofs: initial, time: 0.0, dt: 0.0, step: 0 };
        let mut diag = Diagnostics { steps, dt, conserved: Vec::new() };
        if log_conserved {
            diag.conserved.push((0.0, self.domain_integrals(&state.dofs)));
        }
        if steps == 0 {
            return Ok((state, diag));
        }
        let ops = self.operators(dt)?;
        for i in 0..steps {
            if i + 1 == steps {
                let last = t_end - dt * (steps - 1) as f64;
                if (last - dt).abs() > 1e-14 * dt {
                    let short = self.operators(last)?;
                    self.step(&mut state, &short)?;
                } else {
                    self.step(&mut state, &ops)?;
                }
                state.time = t_end;
            } else {
                self.step(&mut state, &ops)?;
            }
            if log_conserved {
                diag.conserved.push((state.time, self.domain_integrals(&state.dofs)));
            }
        }
        Ok((state, diag))
    }
}

/// `ceil(t_end / dt)`, treating ratios within rounding of an integer as exact.
pub(crate) fn step_count(t_end: f64, dt: f64) -> usize {
    let r = t_end / dt;
    let n = r.round();
    if (r - n).abs() <= 1e-12 * n.max(1.0) {
        n as usize
    } else {
        r.ceil() as usize
    }
}
