use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sha2::{Digest, Sha256};

use poroelastic_ader::basis::ReferenceOperators;
use poroelastic_ader::config::{parse_config, Config};
use poroelastic_ader::dg::Discretization;
use poroelastic_ader::material::{assemble_jacobians, derive_coefficients, wave_speeds};
use poroelastic_ader::mesh::build_periodic_cube_mesh;
use poroelastic_ader::planewave::{convergence_study, error_norms, modes_per_quantity, project_initial_condition, Norm, PlaneWaveSolution};
use poroelastic_ader::report::{self, Provenance};
use poroelastic_ader::stp::{cost_model, run_oracle_suite};
use poroelastic_ader::{Error, ExecMode, Quantity, MAX_DEGREE};

/// Environment variable overriding `[output] directory`.
const OUTPUT_DIR_ENV: &str = "PORO_OUTPUT_DIR";

/// Deviation above which the oracle suite reports a numerical failure.
const ORACLE_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Parser)]
#[command(name = "poro-ader", version, about = "ADER-DG solver for 3D poroelastic waves")]
struct Cli {
    /// Configuration file (`key = value` with `[section]` headers).
    #[arg(long, short, global = true)]
    config: Option<PathBuf>,

    /// Run element loops on a single thread.
    #[arg(long, global = true)]
    sequential: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Plane-wave convergence study from the `[study]` block.
    Convergence,
    /// Flop and storage counts of dense LU vs block back-substitution.
    Flops {
        #[arg(long, default_value_t = 2)]
        min_degree: usize,
        #[arg(long, default_value_t = 6)]
        max_degree: usize,
    },
    /// Random predictor equivalence suite against the dense solve.
    Oracle(OracleArgs),
    /// One plane-wave simulation from the `[run]` block with a conservation log.
    Run {
        /// Also write the final state to `state.csv`.
        #[arg(long)]
        snapshot: bool,
    },
    /// Wave speeds of the configured material.
    Speeds,
    /// Reference matrices as CSV.
    DumpOperators {
        /// Polynomial degree; defaults to the `[run]` order minus one.
        #[arg(long)]
        degree: Option<usize>,
    },
    /// Echo the effective configuration.
    DumpConfig,
}

#[derive(Debug, Args)]
struct OracleArgs {
    /// Convergence order N + 1.
    #[arg(long, conflicts_with = "degree")]
    order: Option<usize>,
    /// Polynomial degree N.
    #[arg(long)]
    degree: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    trials: usize,
}

#[derive(Debug)]
enum Failure {
    Validation(String),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.to_string())
        } else {
            Failure::Validation(e.to_string())
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Validation(e.to_string())
    }
}

struct Context {
    config: Config,
    provenance: Provenance,
    exec: ExecMode,
    output_dir: PathBuf,
}

impl Context {
    fn load(cli: &Cli) -> Result<Context, Failure> {
        let config = match &cli.config {
            Some(path) => parse_config(path).map_err(|e| Failure::Validation(format!("{}: {e}", path.display())))?,
            None => Config::default(),
        };
        let hash = Sha256::digest(config.to_text().as_bytes());
        let provenance = Provenance {
            version: env!("CARGO_PKG_VERSION").to_string(),
            config_hash: hash.iter().map(|b| format!("{b:02x}")).collect(),
        };
        let output_dir = std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from).unwrap_or_else(|| config.output.directory.clone());
        let exec = if cli.sequential { ExecMode::Sequential } else { ExecMode::Parallel };
        Ok(Context { config, provenance, exec, output_dir })
    }

    /// Writes `csv` to `<output>/<name>` and echoes it on stdout.
    fn emit(&self, name: &str, csv: &str) -> Result<(), Failure> {
        std::fs::create_dir_all(&self.output_dir)?;
        let path = self.output_dir.join(name);
        std::fs::write(&path, csv)?;
        print!("{csv}");
        eprintln!("wrote {}", path.display());
        Ok(())
    }

    fn digits(&self) -> usize {
        self.config.output.precision
    }
}

fn check_degree(degree: usize) -> Result<(), Failure> {
    if (1..=MAX_DEGREE).contains(&degree) {
        Ok(())
    } else {
        Err(Failure::Validation(format!("degree {degree} outside 1..={MAX_DEGREE}")))
    }
}

fn convergence(ctx: &Context) -> Result<(), Failure> {
    let settings = ctx.config.study_settings();
    let table = convergence_study(&settings, ctx.exec)?;
    ctx.emit("convergence.csv", &report::convergence_csv(&table, ctx.digits(), &ctx.provenance))
}

fn flops(ctx: &Context, min: usize, max: usize) -> Result<(), Failure> {
    check_degree(min)?;
    check_degree(max)?;
    let rows = (min..=max).map(cost_model).collect::<Result<Vec<_>, _>>()?;
    ctx.emit("flops.csv", &report::flops_csv(&rows, &ctx.provenance))
}

fn oracle(ctx: &Context, args: &OracleArgs) -> Result<(), Failure> {
    let degree = match (args.order, args.degree) {
        (Some(o), _) => o.checked_sub(1).ok_or_else(|| Failure::Validation("order must be at least 2".into()))?,
        (None, Some(d)) => d,
        (None, None) => ctx.config.run.degree(),
    };
    check_degree(degree)?;
    if args.trials == 0 {
        return Err(Failure::Validation("trials must be positive".into()));
    }
    let s = run_oracle_suite(degree, args.seed, args.trials, ctx.exec)?;
    println!("{}", ctx.provenance.comment());
    println!("degree {} order {} trials {} seed {}", s.degree, s.degree + 1, s.trials, s.seed);
    println!("max-deviation-dense {:.3e}", s.max_deviation_oracle);
    println!("max-deviation-alg1 {:.3e}", s.max_deviation_alg1);
    println!("max-deviation-alg2 {:.3e}", s.max_deviation_alg2);
    println!("max-residual {:.3e}", s.max_residual);
    println!("max-deviation {:.3e}", s.max_deviation());
    let worst = s.max_deviation().max(s.max_residual);
    if worst < ORACLE_TOLERANCE {
        Ok(())
    } else {
        Err(Failure::Numerical(format!("oracle deviation {worst:.3e} exceeds {ORACLE_TOLERANCE:e}")))
    }
}

fn run(ctx: &Context, snapshot: bool) -> Result<(), Failure> {
    let rc = &ctx.config.run;
    let material = &ctx.config.material;
    let degree = rc.degree();
    let solution = PlaneWaveSolution::benchmark(material)?;
    let mesh = build_periodic_cube_mesh(rc.subdivisions)?;
    let disc = Discretization::new(mesh, degree, material)?.with_exec_mode(ctx.exec);
    let q0 = project_initial_condition(disc.mesh(), &solution, degree, ctx.exec)?;
    let (state, diag) = disc.run(q0, rc.t_end, rc.cfl_factor, true)?;
    let t = state.time;
    let errors = error_norms(disc.mesh(), degree, &state.dofs, ctx.exec, |x| solution.evaluate(x, t))?;

    ctx.emit("conservation.csv", &report::conservation_csv(&diag, ctx.digits(), &ctx.provenance))?;
    if snapshot {
        let csv = report::state_csv(&state.dofs, modes_per_quantity(degree), ctx.digits(), &ctx.provenance)?;
        std::fs::write(ctx.output_dir.join("state.csv"), csv)?;
    }
    eprintln!("steps {} dt {:.6e} t_end {:.6e}", diag.steps, diag.dt, t);
    for q in [Quantity::SigmaXX, Quantity::U, Quantity::Pressure, Quantity::UF] {
        eprintln!(
            "error {:>5}  L1 {:.4e}  L2 {:.4e}  Linf {:.4e}",
            q.name(),
            errors.get(Norm::L1, q),
            errors.get(Norm::L2, q),
            errors.get(Norm::LInf, q)
        );
    }
    Ok(())
}

fn speeds(ctx: &Context) -> Result<(), Failure> {
    let material = &ctx.config.material;
    let jac = assemble_jacobians(material)?;
    let s = wave_speeds(&jac, [1.0, 0.0, 0.0])?;
    let d = derive_coefficients(material)?;
    println!("fast_p {:.4}", s.fast_p);
    println!("shear {:.4}", s.shear);
    println!("slow_p {:.4}", s.slow_p);
    println!("biot_frequency {:.4}", d.biot_frequency);
    println!("max {:.1}", s.fast_p);
    Ok(())
}

fn dump_operators(ctx: &Context, degree: Option<usize>) -> Result<(), Failure> {
    let degree = degree.unwrap_or(ctx.config.run.degree());
    check_degree(degree)?;
    let ops = ReferenceOperators::new(degree)?;
    ctx.emit("operators.csv", &report::operators_csv(&ops, ctx.digits(), &ctx.provenance))
}

fn dispatch(cli: &Cli) -> Result<(), Failure> {
    let ctx = Context::load(cli)?;
    match &cli.command {
        Command::Convergence => convergence(&ctx),
        Command::Flops { min_degree, max_degree } => flops(&ctx, *min_degree, *max_degree),
        Command::Oracle(args) => oracle(&ctx, args),
        Command::Run { snapshot } => run(&ctx, *snapshot),
        Command::Speeds => speeds(&ctx),
        Command::DumpOperators { degree } => dump_operators(&ctx, *degree),
        Command::DumpConfig => {
            print!("{}", ctx.config.to_text());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            ExitCode::from(2)
        }
    }
}
