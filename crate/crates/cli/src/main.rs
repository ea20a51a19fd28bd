//! `liemag`: inspect left-invariant geometry of three-dimensional Lie groups
//! and classify their left-invariant unit magnetic fields.
//!
//! Exit codes: 0 success or match, 1 field not magnetic (`check`), 2 usage
//! error, 3 verification mismatch.

use std::io::{IsTerminal, Write};
use std::process::ExitCode;
use std::time::Instant;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use liemag::frame::FrameVector;
use liemag::reproduce::{Table, DEFAULT_GRID_N, DEFAULT_SAMPLES, DEFAULT_SEED};
use liemag::tolerances::{Tolerances, RESIDUAL};
use liemag::Structure;

use liemag_cli::render::{self, Format};
use liemag_cli::report::{self, Body, Report, SolveMode};

const USAGE: u8 = 2;
/// Input fields within this distance of unit length are normalized.
const UNIT_SLACK: f64 = 1e-6;

#[derive(Parser)]
#[command(name = "liemag", version, about = "Unit magnetic fields on three-dimensional Lie groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[arg(long, value_enum, default_value_t = Format::Md, global = true)]
    format: Format,
    /// Residual threshold for membership decisions.
    #[arg(long, default_value_t = RESIDUAL, global = true, value_parser = positive)]
    tolerance: f64,
    /// Record wall-clock time in the report.
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Args)]
#[command(group(ArgGroup::new("structure").required(true).args(["unimodular", "nonunimodular"])))]
struct StructureArgs {
    /// Structure constants c1,c2,c3 of a Milnor frame.
    #[arg(long, value_name = "C1,C2,C3", value_parser = triple, allow_hyphen_values = true)]
    unimodular: Option<[f64; 3]>,
    /// Parameters alpha,beta of a non-unimodular frame.
    #[arg(long, value_name = "ALPHA,BETA", value_parser = pair, allow_hyphen_values = true)]
    nonunimodular: Option<[f64; 2]>,
}

impl StructureArgs {
    fn structure(&self) -> liemag::Result<Structure> {
        match (self.unimodular, self.nonunimodular) {
            (Some([a, b, c]), _) => Structure::unimodular(a, b, c),
            (_, Some([a, b])) => Structure::nonunimodular(a, b),
            _ => unreachable!("clap requires one structure flag"),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Connection, curvature and classification data of a structure.
    Describe {
        #[command(flatten)]
        structure: StructureArgs,
    },
    /// Test whether a unit vector is magnetic.
    Check {
        #[command(flatten)]
        structure: StructureArgs,
        #[arg(long, value_name = "X1,X2,X3", value_parser = triple, allow_hyphen_values = true)]
        x: [f64; 3],
        /// Charge; solved for when absent.
        #[arg(long, allow_hyphen_values = true)]
        q: Option<f64>,
    },
    /// All unit magnetic fields, in closed form and/or by numeric scan.
    #[command(group(ArgGroup::new("mode").args(["numeric", "symbolic", "both"])))]
    Solve {
        #[command(flatten)]
        structure: StructureArgs,
        #[arg(long, default_value_t = 128)]
        grid_n: usize,
        #[arg(long)]
        numeric: bool,
        #[arg(long)]
        symbolic: bool,
        /// Closed form, scan, and their comparison.
        #[arg(long)]
        both: bool,
    },
    /// Verify a whole classification table on sampled structures.
    Reproduce {
        #[arg(value_enum)]
        which: Which,
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_GRID_N)]
        grid_n: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Which {
    Unimodular,
    Nonunimodular,
}

fn reals<const N: usize>(s: &str) -> Result<[f64; N], String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != N {
        return Err(format!("expected {N} comma-separated numbers, got {}", parts.len()));
    }
    let mut out = [0.0f64; N];
    for (o, p) in out.iter_mut().zip(parts) {
        *o = p.parse().map_err(|e| format!("{p:?}: {e}"))?;
        if !o.is_finite() {
            return Err(format!("{p:?} is not finite"));
        }
    }
    Ok(out)
}

fn triple(s: &str) -> Result<[f64; 3], String> {
    reals(s)
}

fn pair(s: &str) -> Result<[f64; 2], String> {
    reals(s)
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(t) if t.is_finite() && t > 0.0 => Ok(t),
        _ => Err(format!("{s:?} is not a positive number")),
    }
}

fn unit(x: [f64; 3]) -> Result<FrameVector, String> {
    let v = FrameVector::from_array(x);
    if (v.norm() - 1.0).abs() > UNIT_SLACK {
        return Err(format!("|x| = {} is not within {UNIT_SLACK} of 1", v.norm()));
    }
    Ok(v.normalized().expect("nonzero"))
}

fn run(cli: &Cli) -> Result<Body, String> {
    let tol = Tolerances::with_residual(cli.tolerance);
    let e = |e: liemag::Error| e.to_string();
    Ok(match &cli.command {
        Command::Describe { structure } => {
            Body::Describe(Box::new(report::describe(&structure.structure().map_err(e)?)))
        }
        Command::Check { structure, x, q } => {
            let s = structure.structure().map_err(e)?;
            Body::Check(report::check(&s, unit(*x)?, *q, &tol).map_err(e)?)
        }
        Command::Solve { structure, grid_n, numeric, both, .. } => {
            let mode = if *both {
                SolveMode::Both
            } else if *numeric {
                SolveMode::Numeric
            } else {
                SolveMode::Symbolic
            };
            let s = structure.structure().map_err(e)?;
            Body::Solve(report::solve(&s, mode, *grid_n, &tol).map_err(e)?)
        }
        Command::Reproduce { which, samples, seed, grid_n } => {
            let table = match which {
                Which::Unimodular => Table::Unimodular,
                Which::Nonunimodular => Table::Nonunimodular,
            };
            Body::Reproduce(report::reproduce_table(table, *samples, *seed, *grid_n, &tol).map_err(e)?)
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let body = match run(&cli) {
        Ok(b) => b,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(USAGE);
        }
    };
    let report =
        Report { tolerance: cli.tolerance, body, timing_ms: cli.timing.then(|| start.elapsed().as_secs_f64() * 1e3) };
    let color = std::io::stdout().is_terminal() && std::env::var_os("NO_COLOR").is_none();
    match render::render(&report, cli.format, color) {
        Ok(text) => {
            let _ = std::io::stdout().write_all(text.as_bytes());
        }
        Err(err) => {
            eprintln!("error: {err}");
            return ExitCode::FAILURE;
        }
    }
    ExitCode::from(report.exit_code() as u8)
}
