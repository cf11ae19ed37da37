//! The `nahm` batch interface.

mod commands;
mod input;
mod table;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::FlowForm;
use crate::error::{Error, Result};

pub use input::{FamilyMeta, InputDocument, Metadata, Pair};
pub use table::{read_trajectory, write_trajectory};

pub const EXIT_OK: u8 = 0;
pub const EXIT_IO: u8 = 1;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_BLOW_UP: u8 = 3;
pub const EXIT_DRIFT: u8 = 4;
pub const EXIT_NOT_RIBBON: u8 = 5;

#[derive(Debug, Parser)]
#[command(
    name = "nahm",
    version,
    about = "Nahm flows on co-Higgs data over the projective line"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate the flow and write traj.csv.
    Integrate(Common),
    /// Drift of the spectral invariants along a trajectory table.
    Invariants(Common),
    /// Solve for the fixed-point witness ψ and sample the support curve.
    FixedPoint(Common),
    /// Rank-2 parabolic moduli: marked point, vector field, induced motion.
    Rank2(Common),
    /// Square root of the spectral data, sheaf case and divisor.
    Ribbon(Common),
    /// Singularity type of the rank-2 fixed-point family's image curve.
    Classify(Common),
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Input JSON document (or traj.csv for `invariants` and `ribbon`).
    #[arg(long = "input", short = 'i')]
    pub inputs: Vec<PathBuf>,
    /// Integrate up to this time.
    #[arg(long)]
    pub t_end: Option<f64>,
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
    /// Reinterpret the input under another flow form.
    #[arg(long)]
    pub form: Option<FlowForm>,
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    /// Tolerance for the rank-2 motion laws.
    #[arg(long, default_value_t = crate::moduli::LAW_TOL)]
    pub law_tol: f64,
    #[arg(long, default_value_t = crate::algebra::TAU_RANK)]
    pub tau_rank: f64,
    #[arg(long, default_value_t = crate::fixed_points::TAU_FIX)]
    pub tau_fix: f64,
    /// Samples per circle for the divisor scan.
    #[arg(long, default_value_t = crate::ribbon::DEFAULT_GRID)]
    pub grid: usize,
    /// Extension degree for the divisor degree check.
    #[arg(long)]
    pub d: Option<i64>,
    /// Worker threads for several inputs.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Build the rank-2 fixed-point family: `A` or `A,BRANCH` with BRANCH
    /// one of node, cusp, two-lines; `A` is complex, e.g. `1`, `-0.5+2i`.
    #[arg(long)]
    pub family: Option<String>,
}

pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io(_) => EXIT_IO,
        Error::BlowUp { .. } => EXIT_BLOW_UP,
        Error::NotPerfectSquare(_) => EXIT_NOT_RIBBON,
        _ => EXIT_INPUT,
    }
}

/// Writes `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    use std::io::Write;
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text =
        serde_json::to_string_pretty(value).map_err(|e| Error::Input(format!("json: {e}")))?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

/// One unit of work: a verb applied to one input (or to none, for
/// `--family`), writing into `out`.
pub(crate) struct Job<'a> {
    pub verb: &'static str,
    pub input: Option<&'a Path>,
    pub out: PathBuf,
    pub args: &'a Common,
}

fn verb_name(c: &Command) -> &'static str {
    match c {
        Command::Integrate(_) => "integrate",
        Command::Invariants(_) => "invariants",
        Command::FixedPoint(_) => "fixed-point",
        Command::Rank2(_) => "rank2",
        Command::Ribbon(_) => "ribbon",
        Command::Classify(_) => "classify",
    }
}

fn output_dir(args: &Common, input: &Path) -> PathBuf {
    if args.inputs.len() <= 1 {
        return args.out.clone();
    }
    let stem = input
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    args.out.join(stem)
}

/// Runs the parsed command line and returns the process exit code.
pub fn run(cli: Cli) -> u8 {
    let verb = verb_name(&cli.command);
    let args = match &cli.command {
        Command::Integrate(a)
        | Command::Invariants(a)
        | Command::FixedPoint(a)
        | Command::Rank2(a)
        | Command::Ribbon(a)
        | Command::Classify(a) => a,
    };
    if args.inputs.is_empty()
        && !(args.family.is_some() && matches!(verb, "fixed-point" | "classify"))
    {
        eprintln!("nahm {verb}: --input is required");
        return EXIT_INPUT;
    }
    if args.jobs == 0 {
        eprintln!("nahm {verb}: --jobs must be at least 1");
        return EXIT_INPUT;
    }
    let jobs: Vec<Job> = if args.inputs.is_empty() {
        vec![Job {
            verb,
            input: None,
            out: args.out.clone(),
            args,
        }]
    } else {
        args.inputs
            .iter()
            .map(|p| Job {
                verb,
                input: Some(p.as_path()),
                out: output_dir(args, p),
                args,
            })
            .collect()
    };
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs)
        .build()
    {
        Ok(p) => p,
        Err(e) => {
            eprintln!("nahm {verb}: {e}");
            return EXIT_IO;
        }
    };
    let codes: Vec<u8> = pool.install(|| {
        jobs.par_iter()
            .map(|job| {
                let label = job
                    .input
                    .map_or("--family".to_string(), |p| p.display().to_string());
                match commands::dispatch(job) {
                    Ok(code) => {
                        println!("{label}: {} (exit {code})", job.out.display());
                        code
                    }
                    Err(e) => {
                        eprintln!("nahm {verb}: {label}: {e}");
                        exit_code(&e)
                    }
                }
            })
            .collect()
    });
    codes.into_iter().max().unwrap_or(EXIT_OK)
}
