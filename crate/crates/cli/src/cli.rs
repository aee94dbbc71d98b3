use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "coordobs",
    version,
    about = "Simulate high-gain observers written in the original coordinates"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Harmonic oscillator with unknown frequency.
    Oscillator {
        #[arg(long, value_enum, default_value_t = Variant::Dim6)]
        variant: Variant,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Two-state bioreactor with a scheduled dilution rate.
    Bioreactor {
        #[command(flatten)]
        run: RunArgs,
    },
    /// Run the built-in acceptance checks.
    Selftest {
        /// Sample count for the randomized suites.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
    /// Run one scenario for several values of a parameter in parallel.
    Sweep {
        #[arg(value_enum)]
        scenario: ScenarioName,
        /// Parameter to vary.
        #[arg(long)]
        param: String,
        /// Comma-separated values.
        #[arg(
            long,
            value_delimiter = ',',
            required = true,
            allow_hyphen_values = true
        )]
        values: Vec<f64>,
        /// `final_error` or `time_to:<tolerance>`.
        #[arg(long, default_value = "final_error")]
        metric: String,
        #[arg(long, value_enum, default_value_t = Variant::Dim6)]
        variant: Variant,
        #[command(flatten)]
        run: SimArgs,
    },
}

#[derive(Args, Debug, Clone)]
pub struct SimArgs {
    /// Observer realization; defaults to `extended`.
    #[arg(long, default_value = "extended")]
    pub mode: String,
    /// Parameter override, repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
    /// Final time; defaults to 30 (oscillator) or 40 (bioreactor).
    #[arg(long)]
    pub t_final: Option<f64>,
}

#[derive(Args, Debug)]
pub struct RunArgs {
    #[command(flatten)]
    pub sim: SimArgs,
    /// Trajectory CSV.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON summary.
    #[arg(long)]
    pub summary: Option<PathBuf>,
    /// Exit 0 even if the run stops early.
    #[arg(long)]
    pub expect_truncation: bool,
    /// Tolerance for the reported convergence time.
    #[arg(long, default_value_t = 1e-3)]
    pub tol: f64,
    /// Print the parameter keys with their defaults and exit.
    #[arg(long)]
    pub list_keys: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    Dim4,
    Dim5,
    Dim6,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScenarioName {
    Oscillator,
    Bioreactor,
}
