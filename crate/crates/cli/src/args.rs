use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64 as C64;

/// Exact steady states of boundary-driven XXZ brickwork circuits.
#[derive(Debug, Parser)]
#[command(name = "xxz-ness", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Assemble the steady state and print a summary.
    Ness {
        #[command(flatten)]
        circuit: CircuitArgs,
        /// Include the full density matrix (N <= 7).
        #[arg(long)]
        matrix: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Evaluate every exchange, boundary and fixed-point residual.
    Verify {
        #[command(flatten)]
        circuit: CircuitArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Sweep the anisotropy eta/pi over (0, 1) and tabulate the helix indicators.
    Scan {
        #[command(flatten)]
        circuit: CircuitArgs,
        /// Number of grid points strictly inside (0, 1).
        #[arg(long, default_value_t = 2001)]
        grid: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Compare the assembled state with dense power iteration.
    Oracle {
        #[command(flatten)]
        circuit: CircuitArgs,
        /// Convergence tolerance (Frobenius norm of one-cycle change).
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        /// Iteration cap [default: 200 N].
        #[arg(long)]
        max_iter: Option<usize>,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RegimeArg {
    /// Easy plane: |q| = 1, real lambda.
    Epr,
    /// Easy axis: real q, |lambda| = 1.
    Ear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct CircuitArgs {
    /// Number of sites (odd).
    #[arg(long, default_value_t = 5)]
    pub n: usize,
    /// Unitarity regime of the gate.
    #[arg(long, value_enum, default_value_t = RegimeArg::Epr)]
    pub regime: RegimeArg,
    /// Anisotropy parameter q as a complex number [default: e^{0.4i} (epr), 1.5 (ear)].
    #[arg(long, value_parser = parse_complex)]
    pub q: Option<C64>,
    /// Easy plane only: q = e^{i eta} [default: 0.4].
    #[arg(long, allow_hyphen_values = true)]
    pub eta: Option<f64>,
    /// Easy plane only: lambda = e^{lambda_log} [default: 0.9].
    #[arg(long, allow_hyphen_values = true)]
    pub lambda_log: Option<f64>,
    /// Easy axis only: lambda = e^{i lambda_phase} [default: 0.7].
    #[arg(long, allow_hyphen_values = true)]
    pub lambda_phase: Option<f64>,
    /// Left target, stereographic coordinate [default: 1].
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub z: Option<C64>,
    /// Left target polar angle, with --z-phi.
    #[arg(long, requires = "z_phi", allow_hyphen_values = true)]
    pub z_theta: Option<f64>,
    /// Left target azimuth, with --z-theta.
    #[arg(long, requires = "z_theta", allow_hyphen_values = true)]
    pub z_phi: Option<f64>,
    /// Right target, stereographic coordinate [default: 0.5].
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub w: Option<C64>,
    /// Right target polar angle, with --w-phi.
    #[arg(long, requires = "w_phi", allow_hyphen_values = true)]
    pub w_theta: Option<f64>,
    /// Right target azimuth, with --w-theta.
    #[arg(long, requires = "w_theta", allow_hyphen_values = true)]
    pub w_phi: Option<f64>,
    /// Set w = z lambda.
    #[arg(long)]
    pub w_resonant: bool,
    /// Set w = q^{N+1-2m} z lambda with m = --kinks.
    #[arg(long)]
    pub helix: bool,
    /// Kink count used by --helix.
    #[arg(long, default_value_t = 0, requires = "helix")]
    pub kinks: u32,
    /// Replace the right reset by the unitary V(alpha, beta, gamma); unset angles are 0.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    /// Euler angle beta of the right unitary.
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<f64>,
    /// Euler angle gamma of the right unitary.
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Write to this file instead of standard output.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Output format [default: csv for scan, json otherwise].
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

/// Accepts `1`, `0.5-0.2i`, `2i` and the like.
pub fn parse_complex(s: &str) -> Result<C64, String> {
    s.trim()
        .parse::<C64>()
        .map_err(|e| format!("not a complex number: {s:?} ({e})"))
}
