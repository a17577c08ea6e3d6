//! Discontinuous Galerkin discretization on periodic tetrahedral meshes:
//! upwind fluxes, the corrector update and the global time loop.

mod flux;
mod solver;

pub use flux::{face_mass_matrices, upwind_splitting, FluxSplitting};
pub use solver::{cfl_timestep, Diagnostics, Discretization, SimulationState};
