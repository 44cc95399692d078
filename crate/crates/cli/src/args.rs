use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Clone, Parser)]
#[command(name = "hyperheat", version, about = "Spectral heat-equation solver and validation suites")]
pub struct Cli {
    /// Write CSV here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Seed for randomized suites.
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,

    /// Worker threads for inner loops; 1 is bit-reproducible.
    #[arg(long, global = true, env = "HYPERHEAT_THREADS", default_value_t = 1)]
    pub threads: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Check the exact discrete identities on random data.
    Validate(ValidateArgs),
    /// Solve for u(t, x) at the query points.
    Solve(SolveArgs),
    /// Tabulate the windowed heat kernel.
    Kernel(KernelArgs),
    /// Sweep grid sizes and fit the convergence order.
    Converge(ConvergeArgs),
    /// Check the scalar error bounds and rates.
    Rates,
}

#[derive(Debug, Clone, Args)]
pub struct ValidateArgs {
    /// Largest grid parameter (at most 16).
    #[arg(long = "n", default_value_t = 8)]
    pub max_n: usize,

    /// Random inputs per grid size.
    #[arg(long, default_value_t = 20)]
    pub samples: usize,
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    #[arg(long, default_value_t = 256)]
    pub n: usize,

    /// Boundary data is truncated to [-omega, omega).
    #[arg(long, default_value_t = 4.0)]
    pub omega: f64,

    /// Frequency cut-off.
    #[arg(long = "omega-prime", default_value_t = 3.0)]
    pub omega_prime: f64,

    /// Boundary data: gaussian[:a,b], indicator[:l,r], bump[:c,w], zero, or file:PATH.
    #[arg(long, default_value = "gaussian")]
    pub g: String,

    /// Comma list or start:stop:step.
    #[arg(long, default_value = "0.5")]
    pub times: String,

    /// Comma list or start:stop:step.
    #[arg(long, default_value = "-2:2:0.1", allow_hyphen_values = true)]
    pub xs: String,
}

#[derive(Debug, Clone, Args)]
pub struct KernelArgs {
    #[arg(long, default_value_t = 256)]
    pub n: usize,

    #[arg(long = "omega-prime", default_value_t = 3.0)]
    pub omega_prime: f64,

    #[arg(long, default_value = "0.25,0.5,1")]
    pub times: String,

    /// Offsets z; snapped down to the grid.
    #[arg(long, default_value = "-3:3:0.125", allow_hyphen_values = true)]
    pub xs: String,
}

#[derive(Debug, Clone, Args)]
pub struct ConvergeArgs {
    /// Grid sizes, at least three.
    #[arg(long = "n-list", default_value = "128,256,512")]
    pub n_list: String,

    #[arg(long, default_value_t = 4.0)]
    pub omega: f64,

    #[arg(long = "omega-prime", default_value_t = 3.0)]
    pub omega_prime: f64,

    #[arg(long, default_value = "gaussian")]
    pub g: String,

    #[arg(long, default_value = "0.5")]
    pub times: String,

    #[arg(long, default_value = "-2:2:0.1", allow_hyphen_values = true)]
    pub xs: String,
}
