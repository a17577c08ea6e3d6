//! CSV emission. Every table starts with a `#` provenance comment followed by
//! a header row; rows are in a fixed order.

use std::fmt::Write as _;

use crate::basis::ReferenceOperators;
use crate::dg::Diagnostics;
use crate::planewave::ConvergenceTable;
use crate::stp::CostReport;
use crate::{Error, Quantity, Result, NUM_QUANTITIES};

/// Identifies the producing build and the configuration it ran with.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    pub version: String,
    /// Hex digest of the configuration text.
    pub config_hash: String,
}

impl Provenance {
    pub fn comment(&self) -> String {
        format!("# poro-ader {} config-sha256={}", self.version, self.config_hash)
    }
}

/// Floating-point cell with `digits` significant digits.
fn num(v: f64, digits: usize) -> String {
    format!("{:.*e}", digits.saturating_sub(1), v)
}

fn start(prov: &Provenance, header: &str) -> String {
    format!("{}\n{header}\n", prov.comment())
}

/// Cost-model table. Floats use the shortest round-trip representation.
pub fn flops_csv(rows: &[CostReport], prov: &Provenance) -> String {
    let mut s = start(prov, "N,unknowns,flops_lu,flops_stp,reduction,storage_lu_mb,storage_stp_mb");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            r.degree,
            r.unknowns,
            r.flops_lu,
            r.flops_stp,
            r.reduction,
            r.storage_lu_mb(),
            r.storage_stp_mb()
        );
    }
    s
}

pub fn convergence_csv(table: &ConvergenceTable, digits: usize, prov: &Provenance) -> String {
    let mut s = start(prov, "order,n,h,quantity,norm,error,observed_order");
    for r in &table.rows {
        let observed = r.observed_order.map(|o| format!("{o:.4}")).unwrap_or_default();
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            r.order,
            r.subdivisions,
            r.h,
            r.quantity.name(),
            r.norm.name(),
            num(r.error, digits),
            observed
        );
    }
    s
}

/// All reference matrices in long format, zeros included.
pub fn operators_csv(ops: &ReferenceOperators, digits: usize, prov: &Provenance) -> String {
    let mut s = start(prov, "matrix,row,col,value");
    let mut put = |name: &str, rows: usize, cols: usize, at: &dyn Fn(usize, usize) -> f64| {
        for i in 0..rows {
            for j in 0..cols {
                let _ = writeln!(s, "{name},{i},{j},{}", num(at(i, j), digits));
            }
        }
    };
    let sp = &ops.spatial;
    let nb = sp.mass.len();
    put("mass", nb, nb, &|i, j| if i == j { sp.mass[i] } else { 0.0 });
    for (a, axis) in ["xi", "eta", "zeta"].into_iter().enumerate() {
        put(&format!("stiffness_{axis}"), nb, nb, &|i, j| sp.stiffness[a][(i, j)]);
    }
    for (a, axis) in ["xi", "eta", "zeta"].into_iter().enumerate() {
        put(&format!("scaled_stiffness_{axis}"), nb, nb, &|i, j| sp.scaled_stiffness[a][(i, j)]);
    }
    let tm = &ops.temporal;
    let nt = tm.mass.len();
    put("time_mass", nt, nt, &|i, j| if i == j { tm.mass[i] } else { 0.0 });
    put("time_stiffness", nt, nt, &|i, j| tm.stiffness[(i, j)]);
    put("time_end_product", nt, nt, &|i, j| tm.end_product[(i, j)]);
    put("time_start_values", nt, 1, &|i, _| tm.start_values[i]);
    put("time_evolution", nt, nt, &|i, j| tm.evolution[(i, j)]);
    put("time_scaled_start", nt, 1, &|i, _| tm.scaled_start[i]);
    s
}

/// Element-wise state snapshot; `dofs` holds per element `[quantity][mode]`.
pub fn state_csv(dofs: &[f64], modes: usize, digits: usize, prov: &Provenance) -> Result<String> {
    let per_element = NUM_QUANTITIES * modes;
    if modes == 0 || !dofs.len().is_multiple_of(per_element) {
        return Err(Error::Shape { expected: dofs.len().div_ceil(per_element.max(1)).max(1) * per_element, actual: dofs.len() });
    }
    let mut s = start(prov, "element,quantity,mode,value");
    for (e, chunk) in dofs.chunks_exact(per_element).enumerate() {
        for q in Quantity::ALL {
            for k in 0..modes {
                let _ = writeln!(s, "{e},{},{k},{}", q.name(), num(chunk[q.index() * modes + k], digits));
            }
        }
    }
    Ok(s)
}

/// Per-step domain integrals of every quantity.
pub fn conservation_csv(diag: &Diagnostics, digits: usize, prov: &Provenance) -> String {
    let names: Vec<&str> = Quantity::ALL.iter().map(|q| q.name()).collect();
    let mut s = start(prov, &format!("step,time,{}", names.join(",")));
    for (step, (t, values)) in diag.conserved.iter().enumerate() {
        let cells: Vec<String> = values.iter().map(|&v| num(v, digits)).collect();
        let _ = writeln!(s, "{step},{},{}", num(*t, digits), cells.join(","));
    }
    s
}
