//! Resolution of parameters from defaults, an optional TOML file and flags.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::args::{CaseArgs, Format, ReduceArgs, SelftestArgs, SpectrumArgs, ThetaSignArg, VerifyArgs};
use crate::error::CliError;

/// Keys accepted in the config file, one per long flag.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub gamma: Option<f64>,
    pub delta: Option<f64>,
    pub r: Option<f64>,
    pub threshold: Option<f64>,
    pub theta_sign: Option<ThetaSignArg>,
    pub zeta_order: Option<u32>,
    pub amp_order: Option<u32>,
    pub theta_order: Option<u32>,
    pub max_iter: Option<usize>,
    pub format: Option<Format>,
    pub a0: Option<f64>,
    pub t0: Option<f64>,
    pub t_end: Option<f64>,
    pub grid_n: Option<usize>,
    pub grid_l: Option<f64>,
    pub cfl: Option<f64>,
    pub samples_per_decade: Option<usize>,
    pub late_start: Option<f64>,
    pub drift_threshold: Option<f64>,
    pub slope_tolerance: Option<f64>,
    pub linear_check: Option<bool>,
    pub sigma: Option<String>,
    pub l_max: Option<u32>,
    pub perturb_golden: Option<bool>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text)
            .map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseParams {
    pub gamma: f64,
    pub delta: f64,
    pub r: f64,
    pub threshold: f64,
    pub theta_sign: ThetaSignArg,
}

impl CaseParams {
    fn resolve(flags: &CaseArgs, file: &FileConfig) -> Self {
        CaseParams {
            gamma: flags.gamma.or(file.gamma).unwrap_or(1.0),
            delta: flags.delta.or(file.delta).unwrap_or(1.0),
            r: flags.r.or(file.r).unwrap_or(-0.5),
            threshold: flags
                .threshold
                .or(file.threshold)
                .unwrap_or(gburgers::models::DEFAULT_CRITICAL_THRESHOLD),
            theta_sign: flags.theta_sign.or(file.theta_sign).unwrap_or(ThetaSignArg::Printed),
        }
    }

    pub fn configure(&self) -> Result<gburgers::CaseConfig, CliError> {
        let sign = match self.theta_sign {
            ThetaSignArg::Printed => gburgers::models::ThetaSign::Printed,
            ThetaSignArg::Derived => gburgers::models::ThetaSign::Derived,
        };
        Ok(gburgers::models::configure_with(self.gamma, self.delta, self.r, self.threshold, sign)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReduceParams {
    pub case: CaseParams,
    pub zeta_order: u32,
    pub amp_order: u32,
    /// `None` takes the case default.
    pub theta_order: Option<u32>,
    pub max_iter: usize,
    pub format: Format,
}

impl ReduceParams {
    pub fn resolve(flags: &ReduceArgs, file: &FileConfig) -> Self {
        ReduceParams {
            case: CaseParams::resolve(&flags.case, file),
            zeta_order: flags.zeta_order.or(file.zeta_order).unwrap_or(8),
            amp_order: flags.amp_order.or(file.amp_order).unwrap_or(6),
            theta_order: flags.theta_order.or(file.theta_order),
            max_iter: flags.max_iter.or(file.max_iter).unwrap_or(20),
            format: flags.format.or(file.format).unwrap_or(Format::Text),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyParams {
    pub case: CaseParams,
    pub a0: f64,
    pub t0: f64,
    pub t_end: f64,
    pub grid_n: usize,
    pub grid_l: f64,
    pub cfl: f64,
    pub samples_per_decade: usize,
    pub late_start: Option<f64>,
    pub drift_threshold: f64,
    pub slope_tolerance: f64,
    pub linear_check: bool,
}

impl VerifyParams {
    pub fn resolve(flags: &VerifyArgs, file: &FileConfig) -> Self {
        VerifyParams {
            case: CaseParams::resolve(&flags.case, file),
            a0: flags.a0.or(file.a0).unwrap_or(0.3),
            t0: flags.t0.or(file.t0).unwrap_or(1.0),
            t_end: flags.t_end.or(file.t_end).unwrap_or(100.0),
            grid_n: flags.grid_n.or(file.grid_n).unwrap_or(1024),
            grid_l: flags.grid_l.or(file.grid_l).unwrap_or(10.0),
            cfl: flags.cfl.or(file.cfl).unwrap_or(0.4),
            samples_per_decade: flags.samples_per_decade.or(file.samples_per_decade).unwrap_or(40),
            late_start: flags.late_start.or(file.late_start),
            drift_threshold: flags.drift_threshold.or(file.drift_threshold).unwrap_or(0.02),
            slope_tolerance: flags.slope_tolerance.or(file.slope_tolerance).unwrap_or(0.15),
            linear_check: flags.linear_check || file.linear_check.unwrap_or(false),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumParams {
    pub sigma: String,
    pub l_max: u32,
}

impl SpectrumParams {
    pub fn resolve(flags: &SpectrumArgs, file: &FileConfig) -> Self {
        SpectrumParams {
            sigma: flags.sigma.clone().or_else(|| file.sigma.clone()).unwrap_or_else(|| "1".into()),
            l_max: flags.l_max.or(file.l_max).unwrap_or(7),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelftestParams {
    pub perturb_golden: bool,
}

impl SelftestParams {
    pub fn resolve(flags: &SelftestArgs, file: &FileConfig) -> Self {
        SelftestParams { perturb_golden: flags.perturb_golden || file.perturb_golden.unwrap_or(false) }
    }
}
