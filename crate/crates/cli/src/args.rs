use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(name = "gburgers", version, about = "Centre-manifold models of the generalized Burgers equation")]
pub struct Cli {
    /// TOML file whose keys mirror the long flags (e.g. `grid_n = 1024`);
    /// flags given on the command line win.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Directory for reports, traces and run manifests.
    #[arg(long, global = true, env = "GBURGERS_OUT", value_name = "DIR")]
    pub out_dir: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute the centre manifold and amplitude law for a parameter set.
    Reduce(ReduceArgs),
    /// Integrate the PDE and compare the measured amplitude with the law.
    Verify(VerifyArgs),
    /// Tabulate eigenvalues of the linear operator on Hermite modes.
    Spectrum(SpectrumArgs),
    /// Run the invariant and golden-value suite.
    Selftest(SelftestArgs),
    /// Re-run a recorded command and check that its outputs are reproduced.
    Replay(ReplayArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThetaSignArg {
    Printed,
    Derived,
}

#[derive(Debug, Args, Clone, Default)]
pub struct CaseArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub delta: Option<f64>,
    /// Exponent of the decaying diffusivity term, r <= 0.
    #[arg(long, allow_hyphen_values = true)]
    pub r: Option<f64>,
    /// |r| below this selects the slowly varying (two-mode) models.
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long, value_enum)]
    pub theta_sign: Option<ThetaSignArg>,
}

#[derive(Debug, Args, Clone, Default)]
pub struct ReduceArgs {
    #[command(flatten)]
    pub case: CaseArgs,
    #[arg(long)]
    pub zeta_order: Option<u32>,
    #[arg(long)]
    pub amp_order: Option<u32>,
    #[arg(long)]
    pub theta_order: Option<u32>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Args, Clone, Default)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub case: CaseArgs,
    #[arg(long, allow_hyphen_values = true)]
    pub a0: Option<f64>,
    #[arg(long)]
    pub t0: Option<f64>,
    #[arg(long)]
    pub t_end: Option<f64>,
    /// Interior grid points (at least 64).
    #[arg(long)]
    pub grid_n: Option<usize>,
    /// Similarity-space half-width of the grid at the final time (at least 8).
    #[arg(long)]
    pub grid_l: Option<f64>,
    #[arg(long)]
    pub cfl: Option<f64>,
    #[arg(long)]
    pub samples_per_decade: Option<usize>,
    /// Start of the late comparison window.
    #[arg(long)]
    pub late_start: Option<f64>,
    /// Relative amplitude drift allowed when the law predicts a constant.
    #[arg(long)]
    pub drift_threshold: Option<f64>,
    /// Relative tolerance on the measured cubic rate.
    #[arg(long)]
    pub slope_tolerance: Option<f64>,
    /// Also run the linear exact-solution grid refinement check.
    #[arg(long)]
    pub linear_check: bool,
}

#[derive(Debug, Args, Clone, Default)]
pub struct SpectrumArgs {
    /// Rational σ such as `1`, `1/2` or `-3/4`.
    #[arg(long, allow_hyphen_values = true)]
    pub sigma: Option<String>,
    #[arg(long)]
    pub l_max: Option<u32>,
}

#[derive(Debug, Args, Clone, Default)]
pub struct SelftestArgs {
    /// Shift one golden coefficient; the suite must then report a mismatch.
    #[arg(long)]
    pub perturb_golden: bool,
}

#[derive(Debug, Args, Clone)]
pub struct ReplayArgs {
    pub manifest: PathBuf,
}
