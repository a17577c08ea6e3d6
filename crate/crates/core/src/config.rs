//! Plain `key = value` configuration with `[section]` headers.
//!
//! ```text
//! [material]
//! K_S = 4e10
//! phi = 0.2
//!
//! [run]
//! order = 3
//! subdivisions = 4
//!
//! [study]
//! orders = 2, 3, 4
//! norms = L1, L2, Linf
//! ```
//!
//! `#` starts a comment. Every key is optional; omitted keys take the
//! defaults of [`Config::default`]. Unknown sections and keys are errors.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::planewave::{Norm, StudySettings};
use crate::{Error, MaterialParameters, Result, MAX_DEGREE};

/// Default CFL safety factor `c` in `dt = c d / ((2N + 1) v)`.
pub const DEFAULT_CFL_FACTOR: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Convergence order `N + 1`.
    pub order: usize,
    pub subdivisions: usize,
    pub t_end: f64,
    pub cfl_factor: f64,
}

impl RunConfig {
    pub fn degree(&self) -> usize {
        self.order - 1
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyConfig {
    pub orders: Vec<usize>,
    pub subdivisions: Vec<usize>,
    pub norms: Vec<Norm>,
    pub t_end: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputConfig {
    pub directory: PathBuf,
    /// Significant digits of floating-point CSV values.
    pub precision: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub material: MaterialParameters,
    pub run: RunConfig,
    pub study: StudyConfig,
    pub output: OutputConfig,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            material: MaterialParameters::plane_wave_benchmark(),
            run: RunConfig { order: 3, subdivisions: 4, t_end: 1e-4, cfl_factor: DEFAULT_CFL_FACTOR },
            study: StudyConfig {
                orders: vec![2, 3, 4],
                subdivisions: vec![4, 8],
                norms: vec![Norm::L1, Norm::L2, Norm::LInf],
                t_end: 1e-4,
            },
            output: OutputConfig { directory: PathBuf::from("."), precision: 12 },
        }
    }
}

const MATERIAL_KEYS: [&str; 10] = ["K_S", "rho_S", "lambda_M", "mu_M", "phi", "kappa", "T", "K_F", "rho_F", "nu"];
const RUN_KEYS: [&str; 4] = ["order", "subdivisions", "t_end", "cfl_factor"];
const STUDY_KEYS: [&str; 4] = ["orders", "subdivisions", "norms", "t_end"];
const OUTPUT_KEYS: [&str; 2] = ["directory", "precision"];

fn section_keys(section: &str) -> Option<&'static [&'static str]> {
    match section {
        "material" => Some(&MATERIAL_KEYS),
        "run" => Some(&RUN_KEYS),
        "study" => Some(&STUDY_KEYS),
        "output" => Some(&OUTPUT_KEYS),
        _ => None,
    }
}

fn material_field<'a>(m: &'a mut MaterialParameters, key: &str) -> &'a mut f64 {
    match key {
        "K_S" => &mut m.solid_bulk_modulus,
        "rho_S" => &mut m.solid_density,
        "lambda_M" => &mut m.lame_lambda,
        "mu_M" => &mut m.lame_mu,
        "phi" => &mut m.porosity,
        "kappa" => &mut m.permeability,
        "T" => &mut m.tortuosity,
        "K_F" => &mut m.fluid_bulk_modulus,
        "rho_F" => &mut m.fluid_density,
        "nu" => &mut m.viscosity,
        _ => unreachable!("unknown material key {key}"),
    }
}

/// One `key = value` line with its position.
struct Entry<'a> {
    line: usize,
    key: &'a str,
    value: &'a str,
}

fn parse_value<T: FromStr>(e: &Entry) -> Result<T> {
    e.value
        .parse()
        .map_err(|_| Error::Config { line: e.line, message: format!("`{}`: cannot parse `{}`", e.key, e.value) })
}

fn parse_list<T, F>(e: &Entry, item: F) -> Result<Vec<T>>
where
    F: Fn(&str) -> Option<T>,
{
    let items: Option<Vec<T>> = e.value.split(',').map(|s| item(s.trim())).collect();
    match items {
        Some(v) if !v.is_empty() => Ok(v),
        _ => Err(Error::Config { line: e.line, message: format!("`{}`: cannot parse list `{}`", e.key, e.value) }),
    }
}

impl FromStr for Config {
    type Err = Error;

    fn from_str(text: &str) -> Result<Config> {
        let mut cfg = Config::default();
        let mut section: Option<&str> = None;
        // (section, key) -> line, for duplicate detection and diagnostics.
        let mut seen: HashMap<(&str, &str), usize> = HashMap::new();

        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(name) = content.strip_prefix('[') {
                let name = name
                    .strip_suffix(']')
                    .ok_or_else(|| Error::Config { line, message: format!("malformed section header `{content}`") })?
                    .trim();
                if section_keys(name).is_none() {
                    return Err(Error::Config { line, message: format!("unknown section `[{name}]`") });
                }
                section = Some(name);
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| Error::Config { line, message: format!("expected `key = value`, got `{content}`") })?;
            let sec = section.ok_or_else(|| Error::Config { line, message: format!("key `{key}` outside of any section") })?;
            let keys = section_keys(sec).unwrap_or(&[]);
            let Some(&key) = keys.iter().find(|&&k| k == key) else {
                return Err(Error::Config { line, message: format!("unknown key `{key}` in section `[{sec}]`") });
            };
            if value.is_empty() {
                return Err(Error::Config { line, message: format!("`{key}`: missing value") });
            }
            if let Some(first) = seen.insert((sec, key), line) {
                return Err(Error::Config { line, message: format!("`{key}` already set on line {first}") });
            }
            let e = Entry { line, key, value };
            match (sec, key) {
                ("material", k) => *material_field(&mut cfg.material, k) = parse_value(&e)?,
                ("run", "order") => cfg.run.order = parse_value(&e)?,
                ("run", "subdivisions") => cfg.run.subdivisions = parse_value(&e)?,
                ("run", "t_end") => cfg.run.t_end = parse_value(&e)?,
                ("run", "cfl_factor") => cfg.run.cfl_factor = parse_value(&e)?,
                ("study", "orders") => cfg.study.orders = parse_list(&e, |s| s.parse().ok())?,
                ("study", "subdivisions") => cfg.study.subdivisions = parse_list(&e, |s| s.parse().ok())?,
                ("study", "norms") => cfg.study.norms = parse_list(&e, Norm::from_name)?,
                ("study", "t_end") => cfg.study.t_end = parse_value(&e)?,
                ("output", "directory") => cfg.output.directory = PathBuf::from(value),
                ("output", "precision") => cfg.output.precision = parse_value(&e)?,
                _ => unreachable!(),
            }
        }

        cfg.validate().map_err(|err| attach_line(err, &seen))?;
        Ok(cfg)
    }
}

/// Adds the line number of the offending key to a validation error when the
/// key was set explicitly.
fn attach_line(err: Error, seen: &HashMap<(&str, &str), usize>) -> Error {
    let (section, key, message) = match &err {
        Error::InvalidMaterial { key, reason } => ("material", *key, reason),
        Error::ConfigValue { key, message } => match key.split_once('.') {
            Some((section, key)) => (section, key, message),
            None => return err,
        },
        _ => return err,
    };
    match seen.get(&(section, key)) {
        Some(&line) => Error::Config { line, message: format!("`{key}`: {message}") },
        None => err,
    }
}

fn check_order(key: &str, order: usize) -> Result<()> {
    if (2..=MAX_DEGREE + 1).contains(&order) {
        Ok(())
    } else {
        Err(Error::ConfigValue { key: key.into(), message: format!("order must lie in 2..={}, got {order}", MAX_DEGREE + 1) })
    }
}

fn check_mesh(key: &str, n: usize) -> Result<()> {
    if n >= 2 && n.is_multiple_of(2) {
        Ok(())
    } else {
        Err(Error::ConfigValue { key: key.into(), message: format!("subdivisions must be even and at least 2, got {n}") })
    }
}

fn check_time(key: &str, t: f64) -> Result<()> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(Error::ConfigValue { key: key.into(), message: format!("must be finite and non-negative, got {t}") })
    }
}

impl Config {
    /// Checks every value against the preconditions of the modules it feeds.
    pub fn validate(&self) -> Result<()> {
        self.material.validate()?;
        check_order("run.order", self.run.order)?;
        check_mesh("run.subdivisions", self.run.subdivisions)?;
        check_time("run.t_end", self.run.t_end)?;
        if !(self.run.cfl_factor > 0.0 && self.run.cfl_factor <= 1.0) {
            return Err(Error::ConfigValue {
                key: "run.cfl_factor".into(),
                message: format!("must lie in (0, 1], got {}", self.run.cfl_factor),
            });
        }
        for &o in &self.study.orders {
            check_order("study.orders", o)?;
        }
        for &n in &self.study.subdivisions {
            check_mesh("study.subdivisions", n)?;
        }
        if !self.study.subdivisions.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::ConfigValue {
                key: "study.subdivisions".into(),
                message: "must be strictly ascending".into(),
            });
        }
        check_time("study.t_end", self.study.t_end)?;
        if !(1..=17).contains(&self.output.precision) {
            return Err(Error::ConfigValue {
                key: "output.precision".into(),
                message: format!("must lie in 1..=17, got {}", self.output.precision),
            });
        }
        Ok(())
    }

    /// Study setup from the `[material]`, `[run]` and `[study]` blocks.
    pub fn study_settings(&self) -> StudySettings {
        StudySettings {
            material: self.material,
            orders: self.study.orders.clone(),
            subdivisions: self.study.subdivisions.clone(),
            norms: self.study.norms.clone(),
            t_end: self.study.t_end,
            cfl_factor: self.run.cfl_factor,
        }
    }

    /// Canonical text form; parsing it yields the same configuration.
    pub fn to_text(&self) -> String {
        fn join<T: ToString>(v: &[T]) -> String {
            v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
        }
        let mut m = self.material;
        let mut s = String::from("[material]\n");
        for key in MATERIAL_KEYS {
            let _ = writeln!(s, "{key} = {:e}", *material_field(&mut m, key));
        }
        let r = &self.run;
        let _ = write!(
            s,
            "\n[run]\norder = {}\nsubdivisions = {}\nt_end = {:e}\ncfl_factor = {}\n",
            r.order, r.subdivisions, r.t_end, r.cfl_factor
        );
        let st = &self.study;
        let norms: Vec<&str> = st.norms.iter().map(|n| n.name()).collect();
        let _ = write!(
            s,
            "\n[study]\norders = {}\nsubdivisions = {}\nnorms = {}\nt_end = {:e}\n",
            join(&st.orders),
            join(&st.subdivisions),
            norms.join(", "),
            st.t_end
        );
        let _ = write!(
            s,
            "\n[output]\ndirectory = {}\nprecision = {}\n",
            self.output.directory.display(),
            self.output.precision
        );
        s
    }
}

/// Reads and validates a configuration file.
pub fn parse_config(path: &Path) -> Result<Config> {
    std::fs::read_to_string(path)?.parse()
}
