//! `fsbl`: boundary-layer similarity solvers as a command line.
//!
//! Every command writes plain data artifacts (CSV, JSON, PGM) plus a run
//! manifest; nothing is plotted in-process. Reruns with identical flags
//! produce bit-identical files.
//!
//! Exit codes: 0 success, 1 usage, 2 solver failure, 3 verification failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

mod artifacts;
mod commands;

use commands::CliError;

#[derive(Parser)]
#[command(name = "fsbl", version, about = "Falkner-Skan and pseudo-similarity boundary-layer solvers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct OutputOpts {
    /// Directory for artifacts
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// Write artifacts under <out-dir>/fixtures/<command> for regression golden files
    #[arg(long)]
    golden: bool,
}

#[derive(Args, Clone)]
struct StepOpts {
    /// Integration step
    #[arg(long, default_value_t = 1e-3, allow_negative_numbers = true)]
    h: f64,
    /// Integration horizon
    #[arg(long, default_value_t = 100.0, allow_negative_numbers = true)]
    t_max: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the Falkner-Skan BVP for the skin friction f''(0)
    SolveFs {
        /// External-velocity exponent; warned outside [0, 1]
        #[arg(long, allow_negative_numbers = true)]
        m: f64,
        #[command(flatten)]
        step: StepOpts,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Integrate one pseudo-similarity profile from (zeta, d)
    SolvePseudo {
        /// Suction/injection parameter (positive means suction)
        #[arg(long, allow_negative_numbers = true)]
        tau: f64,
        /// Wall-to-stream velocity ratio theta(0)
        #[arg(long, allow_negative_numbers = true)]
        zeta: f64,
        /// Initial slope theta'(0)
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        d: f64,
        /// Fail with exit 2 if the run does not converge
        #[arg(long)]
        expect_converge: bool,
        #[command(flatten)]
        step: StepOpts,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Shoot a range of initial slopes and report the admissible interval
    SweepD {
        #[arg(long, allow_negative_numbers = true)]
        tau: f64,
        #[arg(long, allow_negative_numbers = true)]
        zeta: f64,
        #[arg(long, default_value_t = -2.0, allow_negative_numbers = true)]
        d_min: f64,
        #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
        d_max: f64,
        /// Number of probes (at least 3; the interval scan needs 9)
        #[arg(long, default_value_t = 41)]
        n: usize,
        /// Worker threads for the probe sweep
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[command(flatten)]
        step: StepOpts,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Raster the basin of attraction over a (zeta, d) grid
    Basin {
        /// Suction parameter; must be positive
        #[arg(long, allow_negative_numbers = true)]
        tau: f64,
        #[arg(long, default_value_t = -0.9, allow_negative_numbers = true)]
        zeta_min: f64,
        #[arg(long, default_value_t = 1.9, allow_negative_numbers = true)]
        zeta_max: f64,
        #[arg(long, default_value_t = -2.0, allow_negative_numbers = true)]
        d_min: f64,
        #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
        d_max: f64,
        #[arg(long, default_value_t = 40)]
        nz: usize,
        #[arg(long, default_value_t = 40)]
        nd: usize,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[command(flatten)]
        step: StepOpts,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Reconstruct the stream function and verify the momentum-equation residual
    FieldCheck {
        #[arg(long, allow_negative_numbers = true)]
        tau: f64,
        #[arg(long, allow_negative_numbers = true)]
        zeta: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        d: f64,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        x_min: f64,
        #[arg(long, default_value_t = 2.0)]
        x_max: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        y_min: f64,
        #[arg(long, default_value_t = 2.0)]
        y_max: f64,
        #[arg(long, default_value_t = 21)]
        nx: usize,
        #[arg(long, default_value_t = 21)]
        ny: usize,
        /// Offset f' by this amount first (negative control)
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        perturb: f64,
        /// chain (analytic derivatives) or fd (central differences of psi)
        #[arg(long, default_value = "chain")]
        method: String,
        /// Residual above this fails the check with exit 3
        #[arg(long, default_value_t = 1e-4)]
        threshold: f64,
        #[command(flatten)]
        step: StepOpts,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Fit U_e^2 = c1 x^{2m} + c2 to a CSV of (x, Ue) samples
    FitUe {
        /// Input CSV with header and two columns x,Ue
        input: PathBuf,
        /// Warn if the fitted c2 is nonzero (far-field condition forces c2 = 0)
        #[arg(long)]
        far_field: bool,
        #[command(flatten)]
        out: OutputOpts,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::SolveFs { m, step, out } => commands::solve_fs(m, &step, &out),
        Command::SolvePseudo { tau, zeta, d, expect_converge, step, out } => {
            commands::solve_pseudo(tau, zeta, d, expect_converge, &step, &out)
        }
        Command::SweepD { tau, zeta, d_min, d_max, n, jobs, step, out } => {
            commands::sweep_d(tau, zeta, d_min, d_max, n, jobs, &step, &out)
        }
        Command::Basin { tau, zeta_min, zeta_max, d_min, d_max, nz, nd, jobs, step, out } => {
            commands::basin(tau, (zeta_min, zeta_max), (d_min, d_max), (nz, nd), jobs, &step, &out)
        }
        Command::FieldCheck {
            tau,
            zeta,
            d,
            x_min,
            x_max,
            y_min,
            y_max,
            nx,
            ny,
            perturb,
            method,
            threshold,
            step,
            out,
        } => commands::field_check(
            tau,
            zeta,
            d,
            (x_min, x_max),
            (y_min, y_max),
            (nx, ny),
            perturb,
            &method,
            threshold,
            &step,
            &out,
        ),
        Command::FitUe { input, far_field, out } => commands::fit_ue(&input, far_field, &out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Solver(_) => 2,
            CliError::Verification(_) => 3,
            CliError::Io(_) => 2,
        }
    }
}
