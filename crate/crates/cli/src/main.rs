//! `pat`: phantoms, simulated measurements, reconstructions and diagnostics.

mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::Settings;
use crate::error::CliError;

#[derive(Parser, Debug)]
#[command(
    name = "pat",
    version,
    about = "Matrix-free 2D photoacoustic tomography"
)]
struct Cli {
    /// key=value file with defaults for any long flag; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Worker threads for data-parallel loops (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Rasterize a phantom into a PATB field.
    Phantom(PhantomArgs),
    /// Simulate noisy boundary measurements of a phantom.
    Simulate(SimulateArgs),
    /// Regularized reconstruction from measurements.
    Reconstruct(ReconstructArgs),
    /// Condition numbers of the dense forward matrix for growing sensor counts.
    Conditioning(ConditioningArgs),
    /// Check the kernel identities behind the smoothing operators.
    FiltersCheck(FiltersCheckArgs),
}

#[derive(Args, Debug)]
pub struct GridArgs {
    /// Pixels per side.
    #[arg(long)]
    pub n: Option<usize>,
    /// Side length of the domain in meters.
    #[arg(long)]
    pub size: Option<f64>,
    /// Sound speed in m/s.
    #[arg(long = "sound-speed")]
    pub sound_speed: Option<f64>,
    /// Periodic padding multiplier of the wave solver.
    #[arg(long)]
    pub pad: Option<usize>,
}

#[derive(Args, Debug)]
pub struct PhantomArgs {
    #[command(flatten)]
    pub grid: GridArgs,
    /// `paper-like` or `none`; defaults to `paper-like` unless shapes are given.
    #[arg(long)]
    pub preset: Option<String>,
    /// Circle `x,y,radius,value` in meters; repeatable, drawn in order after the preset.
    #[arg(long)]
    pub circle: Vec<String>,
    /// Rectangle `x,y,width,height,value` (lower-left corner) in meters; repeatable.
    #[arg(long)]
    pub rect: Vec<String>,
    #[arg(long)]
    pub background: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SensorArgs {
    /// one, two, full or incremental.
    #[arg(long)]
    pub geometry: Option<String>,
    /// Sensor count, or `full` for every boundary pixel the geometry allows.
    #[arg(long)]
    pub sensors: Option<String>,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    /// Phantom PATB field; its grid is the simulation grid.
    #[arg(long)]
    pub phantom: Option<PathBuf>,
    /// Reconstruction grid size (default: half the phantom grid).
    #[arg(long)]
    pub n: Option<usize>,
    /// Simulate on the reconstruction grid itself, lifting the 2x refinement guard.
    #[arg(long = "same-grid")]
    pub same_grid: bool,
    #[command(flatten)]
    pub sensors: SensorArgs,
    /// Samples on the reconstruction time axis.
    #[arg(long)]
    pub nt: Option<usize>,
    #[arg(long)]
    pub dt: Option<f64>,
    /// Simulation step (default: dt scaled by the grid refinement).
    #[arg(long = "sim-dt")]
    pub sim_dt: Option<f64>,
    /// Noise std as a fraction of the largest clean sample.
    #[arg(long)]
    pub noise: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub pad: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ReconstructArgs {
    /// Measurements (PATB sensor data).
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub sensors: SensorArgs,
    /// Smoothness index of the H^s penalty.
    #[arg(long)]
    pub s: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    /// fourier, wavelet or dense.
    #[arg(long)]
    pub backend: Option<String>,
    /// Daubechies family `dbN` (default chosen from s).
    #[arg(long)]
    pub wavelet: Option<String>,
    #[arg(long)]
    pub depth: Option<usize>,
    #[arg(long)]
    pub iters: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    /// Matérn prior smoothness; with `--prior-rho` and `--beta` this sets s and alpha.
    #[arg(long = "prior-nu")]
    pub prior_nu: Option<f64>,
    /// Matérn prior length scale in pixels.
    #[arg(long = "prior-rho")]
    pub prior_rho: Option<f64>,
    /// Inverse noise level: the misfit is weighted by beta².
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long = "noise-mean")]
    pub noise_mean: Option<f64>,
    #[arg(long = "prior-mean")]
    pub prior_mean: Option<f64>,
    /// Ground-truth field; adds the relative error to the manifest.
    #[arg(long)]
    pub truth: Option<PathBuf>,
    /// Also write a cross section of this row to `<out>.section.csv`.
    #[arg(long = "section-row")]
    pub section_row: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ConditioningArgs {
    /// Pixels per side (any size >= 2).
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub size: Option<f64>,
    #[arg(long = "sound-speed")]
    pub sound_speed: Option<f64>,
    #[arg(long)]
    pub pad: Option<usize>,
    #[arg(long = "max-sensors")]
    pub max_sensors: Option<usize>,
    #[arg(long)]
    pub nt: Option<usize>,
    /// Time step (default: one pixel per step at the sound speed).
    #[arg(long)]
    pub dt: Option<f64>,
    /// Memory budget for the dense matrix in MiB.
    #[arg(long = "budget-mib")]
    pub budget_mib: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct FiltersCheckArgs {
    /// Relative error injected into the expected constants (fault injection).
    #[arg(long = "perturb-constant", hide = true, default_value_t = 0.0)]
    pub perturb_constant: f64,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let settings = Settings::load(cli.config.as_deref())?;
    if let Some(threads) = settings.pick_opt(cli.threads, "threads")? {
        if threads == 0 {
            return Err(CliError::Usage("--threads must be >= 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Failure(format!("thread pool: {e}")))?;
    }
    match cli.command {
        Command::Phantom(a) => commands::phantom(&a, &settings),
        Command::Simulate(a) => commands::simulate(&a, &settings),
        Command::Reconstruct(a) => commands::reconstruct(&a, &settings),
        Command::Conditioning(a) => commands::conditioning(&a, &settings),
        Command::FiltersCheck(a) => commands::filters_check(&a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("pat: {e}");
            e.exit_code()
        }
    }
}
