use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Default seed for every Monte Carlo command.
pub const DEFAULT_SEED: u64 = 0xC0FFEE;

#[derive(Debug, Parser)]
#[command(
    name = "cone-exit",
    version,
    about = "Cone exit times of planar Brownian motion"
)]
#[command(arg_required_else_help = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Option<Command>,

    /// Print m = π/(2c) for a half-angle c (radians) and exit.
    #[arg(long, value_name = "C", allow_negative_numbers = true)]
    pub m_from_c: Option<f64>,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Write output to PATH instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// Worker threads for Monte Carlo commands (results do not depend on it).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Variant {
    K,
    KTilde,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Skew,
    Planar,
    Both,
}

/// Exactly one of `--m` or `--c`.
#[derive(Debug, Clone, Copy, Args)]
#[group(required = true, multiple = false)]
pub struct Order {
    /// Transform order m.
    #[arg(long, allow_negative_numbers = true)]
    pub m: Option<f64>,
    /// Cone half-angle c in radians; m = π/(2c).
    #[arg(long, allow_negative_numbers = true)]
    pub c: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate φ_m and φ̃_m over an x grid.
    Eval {
        #[command(flatten)]
        order: Order,
        /// Transform arguments, comma separated or repeated.
        #[arg(long, required = true, value_delimiter = ',', num_args = 1.., allow_negative_numbers = true)]
        x: Vec<f64>,
    },
    /// Polynomial coefficients, exponential scales and law structure for integer m.
    Factor {
        #[command(flatten)]
        order: Order,
        /// Root-finding tolerance.
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Lévy density of K or K̃ over a z grid.
    Levy {
        #[command(flatten)]
        order: Order,
        #[arg(long, required = true, value_delimiter = ',', num_args = 1.., allow_negative_numbers = true)]
        z: Vec<f64>,
        #[arg(long, value_enum, default_value_t = Variant::K)]
        variant: Variant,
        /// Arguments for the Frullani exponent check.
        #[arg(long, value_delimiter = ',', num_args = 1.., default_value = "1", allow_negative_numbers = true)]
        x: Vec<f64>,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Arcsine Thorin exponent against 2·log G₊(x).
    Thorin {
        #[arg(long, required = true, value_delimiter = ',', num_args = 1.., allow_negative_numbers = true)]
        x: Vec<f64>,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Small-angle asymptotics across an ε ladder.
    Asym {
        #[command(flatten)]
        order: Order,
        #[arg(long, required = true, value_delimiter = ',', num_args = 1.., allow_negative_numbers = true)]
        x: Vec<f64>,
        #[arg(long, value_delimiter = ',', num_args = 1.., default_value = "0.1,0.01,0.001")]
        eps: Vec<f64>,
    },
    /// Monte Carlo check of the factorized law and, for m = 1, 2, the exact exit-time samplers.
    McVerify {
        #[command(flatten)]
        order: Order,
        #[arg(long, required = true, value_delimiter = ',', num_args = 1.., allow_negative_numbers = true)]
        x: Vec<f64>,
        /// Number of draws.
        #[arg(long, default_value_t = 1_000_000)]
        n: usize,
        #[arg(long, env = "CONE_EXIT_SEED", default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Simulated Gauss-Laplace functional of the exit time against φ̃_m.
    Sim {
        #[command(flatten)]
        order: Order,
        #[arg(long, required = true, value_delimiter = ',', num_args = 1.., allow_negative_numbers = true)]
        x: Vec<f64>,
        /// Number of paths.
        #[arg(long, default_value_t = 10_000)]
        n: usize,
        #[arg(long, env = "CONE_EXIT_SEED", default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Euler step h.
        #[arg(long, default_value_t = 1e-4)]
        step: f64,
        #[arg(long, value_enum, default_value_t = Method::Both)]
        method: Method,
        /// Discretization allowance added to 4·stderr.
        #[arg(long, default_value_t = 0.01)]
        allowance: f64,
        /// Step cap per path; defaults to ceil(1e4 / step).
        #[arg(long)]
        max_steps: Option<u64>,
        /// Radius below which the planar simulator refines its step.
        #[arg(long)]
        min_radius: Option<f64>,
    },
}
