//! `giant-atom`: writes CSV tables and a JSON manifest for each run.

mod commands;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(
    name = "giant-atom",
    version,
    about = "Giant atom in a 1D waveguide: relaxation, poles, dark states and bound fields"
)]
struct Cli {
    /// Worker threads for parallel stages [default: all cores]
    #[arg(long, global = true, env = "GIANT_ATOM_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate β(t) and optionally sample the field p(x, t)
    Simulate(SimulateArgs),
    /// Roots of the characteristic equation in a rectangle of the s plane
    Poles(PolesArgs),
    /// Oscillating dark-state pairs, plus single dark states for given parameters
    DarkSearch(DarkSearchArgs),
    /// Pair lattice and dark-condition lines over an (Ωτ, γτ) window
    Scan(ScanArgs),
    /// Long-time bound-state profile of one dark mode
    Field(FieldArgs),
    /// Bound state in the limit of infinitely many coupling points
    Continuum(ContinuumArgs),
}

/// The atom. Frequencies are in units of 2π.
#[derive(Debug, Args)]
pub struct AtomArgs {
    /// Number of coupling points N
    #[arg(long)]
    pub n_legs: usize,
    /// γτ/2π
    #[arg(long)]
    pub gamma_tau_2pi: f64,
    /// Ωτ/2π
    #[arg(long, required_unless_present = "dark_n", conflicts_with = "dark_n")]
    pub omega_tau_2pi: Option<f64>,
    /// Set Ωτ so that mode n is dark instead of giving --omega-tau-2pi
    #[arg(long)]
    pub dark_n: Option<i64>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub atom: AtomArgs,
    /// End time in units of τ
    #[arg(long)]
    pub t_max: f64,
    /// Integration steps per τ
    #[arg(long, default_value_t = giant_atom::dde::DEFAULT_STEPS_PER_TAU)]
    pub steps_per_tau: usize,
    /// Write every k-th integration step to beta.csv
    #[arg(long, default_value_t = 1)]
    pub sample_every: usize,
    /// Also write pxt.csv (long format t, x, p)
    #[arg(long)]
    pub field: bool,
    /// Time spacing of the pxt.csv snapshots, units of τ
    #[arg(long, default_value_t = 0.5)]
    pub field_dt: f64,
    /// Spatial spacing of pxt.csv, units of vτ
    #[arg(long, default_value_t = 0.02)]
    pub dx: f64,
    /// pxt.csv covers [-margin, N-1+margin]
    #[arg(long, default_value_t = 1.0)]
    pub x_margin: f64,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct PolesArgs {
    #[command(flatten)]
    pub atom: AtomArgs,
    /// Left edge of the search rectangle, units of 1/τ
    #[arg(long, default_value_t = giant_atom::spectral::DEFAULT_RE_MIN, allow_hyphen_values = true)]
    pub re_min: f64,
    /// Centre of the Im s range [default: -Ωτ]
    #[arg(long, allow_hyphen_values = true)]
    pub im_center: Option<f64>,
    /// Half-width of the Im s range [default: π|re_min|]
    #[arg(long)]
    pub im_halfwidth: Option<f64>,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct DarkSearchArgs {
    /// Number of coupling points N
    #[arg(long)]
    pub n_legs: usize,
    #[arg(long, default_value_t = giant_atom::darkstates::DEFAULT_PQ_MAX)]
    pub p_max: u32,
    #[arg(long, default_value_t = giant_atom::darkstates::DEFAULT_PQ_MAX)]
    pub q_max: u32,
    /// γτ/2π for listing single dark states (needs --omega-tau-2pi)
    #[arg(long, requires = "omega_tau_2pi")]
    pub gamma_tau_2pi: Option<f64>,
    /// Ωτ/2π for listing single dark states (needs --gamma-tau-2pi)
    #[arg(long, requires = "gamma_tau_2pi")]
    pub omega_tau_2pi: Option<f64>,
    /// Largest mode index checked for single dark states
    #[arg(long, default_value_t = 60)]
    pub n_max: i64,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    /// Number of coupling points N
    #[arg(long)]
    pub n_legs: usize,
    /// Upper edge of the window in Ωτ/2π
    #[arg(long, default_value_t = 10.0)]
    pub omega_tau_2pi_max: f64,
    /// Upper edge of the window in γτ/2π
    #[arg(long, default_value_t = 1.0)]
    pub gamma_tau_2pi_max: f64,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct FieldArgs {
    /// Number of coupling points N
    #[arg(long)]
    pub n_legs: usize,
    /// γτ/2π; Ωτ follows from the dark condition of --dark-n
    #[arg(long)]
    pub gamma_tau_2pi: f64,
    /// Dark mode n
    #[arg(long)]
    pub dark_n: i64,
    /// Spatial spacing, units of vτ
    #[arg(long, default_value_t = giant_atom::field::DEFAULT_DX)]
    pub dx: f64,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct ContinuumArgs {
    /// Mode n
    #[arg(long, default_value_t = 1)]
    pub n: i64,
    /// ΓT/2π [default: the value maximising the bound intensity, n²π]
    #[arg(long)]
    pub gamma_t_2pi: Option<f64>,
    /// Length L of the coupling region
    #[arg(long, default_value_t = 1.0)]
    pub length: f64,
    /// Number of profile samples on [0, L]
    #[arg(long, default_value_t = 401)]
    pub points: usize,
    /// Also tabulate the comb pair (N+n, N-n) on this many coupling points
    #[arg(long)]
    pub comb_n_legs: Option<usize>,
    #[arg(long)]
    pub out_dir: PathBuf,
}

fn configure_threads(threads: Option<usize>) -> CliResult<()> {
    let Some(n) = threads else {
        return Ok(());
    };
    if n == 0 {
        return Err(CliError::Usage("--threads must be >= 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(format!("thread pool: {e}")))
}

fn run(cli: Cli) -> CliResult<String> {
    configure_threads(cli.threads)?;
    match cli.command {
        Command::Simulate(a) => commands::simulate(&a),
        Command::Poles(a) => commands::poles(&a),
        Command::DarkSearch(a) => commands::dark_search(&a),
        Command::Scan(a) => commands::scan(&a),
        Command::Field(a) => commands::field(&a),
        Command::Continuum(a) => commands::continuum(&a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match run(cli) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
