use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use gburgers::diagnostics::{eigen_residuals, selftest, SelftestOptions};
use gburgers::operators::{spectrum, OperatorSigma};
use gburgers::pde::{
    compare, cubic_rate, linear_exact_error, run_verification, CompareWindow, Grid, VerifyConfig,
};
use gburgers::report::{fmt4, reduction_json, text_report};
use gburgers::{AmplitudeLawODE, BigRational, ReducerConfig, Surd, Truncation};
use num_traits::Signed;
use serde::Serialize;

use crate::args::Format;
use crate::config::{ReduceParams, SelftestParams, SpectrumParams, VerifyParams};
use crate::error::CliError;
use crate::manifest::RunManifest;

/// What a command printed and which files it left behind.
pub struct Outcome {
    pub stdout: String,
    pub manifest: RunManifest,
}

fn write_file(dir: &Path, name: &str, contents: &[u8], m: &mut RunManifest) -> Result<(), CliError> {
    std::fs::write(dir.join(name), contents)?;
    m.outputs.push(name.to_string());
    Ok(())
}

fn reducer_config(p: &ReduceParams, theta_default: u32) -> Result<ReducerConfig, CliError> {
    let truncation = Truncation::new(p.zeta_order, p.amp_order, p.theta_order.unwrap_or(theta_default))?;
    let mut cfg = ReducerConfig::new(truncation.theta_order)?;
    cfg.truncation = truncation;
    // the residual has to vanish well past the reported order for the
    // reported coefficients to be final
    cfg.working_zeta_order = 2 * p.zeta_order;
    cfg.max_iter = p.max_iter;
    cfg.validate()?;
    Ok(cfg)
}

pub fn reduce(p: &ReduceParams, out: &Path) -> Result<Outcome, CliError> {
    let mut m = RunManifest::new("reduce", serde_json::to_value(p)?);
    let case = p.case.configure()?;
    let rcfg = reducer_config(p, case.tag.theta_order())?;
    m.truncation = Some(rcfg.truncation);

    let mut sys = case.tag.system::<Surd>();
    // θ is treated as a parameter frozen over the fast time scale
    sys.theta_rate = num_traits::Zero::zero();
    let res = gburgers::reduce(&sys, &rcfg)?;

    let json = serde_json::to_string_pretty(&reduction_json(&res, Some(&case)))?;
    let text = text_report(&res, Some(&case));
    write_file(out, "reduction.json", json.as_bytes(), &mut m)?;
    write_file(out, "report.txt", text.as_bytes(), &mut m)?;
    let stdout = match p.format {
        Format::Text => text,
        Format::Json => json + "\n",
    };
    Ok(Outcome { stdout, manifest: m })
}

#[derive(Debug, Serialize)]
struct VerifySummary {
    case: String,
    steps: usize,
    initial_amplitude: f64,
    final_amplitude: f64,
    amplitude_drift: f64,
    law_is_constant: bool,
    measured_cubic_rate: Option<f64>,
    predicted_cubic_rate: Option<f64>,
    late_anchor: Option<f64>,
    late_max_relative_deviation: Option<f64>,
    transient_exponent: Option<f64>,
    expected_transient_exponent: f64,
    mass_drift: f64,
    linear_error_ratio: Option<f64>,
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

pub fn verify(p: &VerifyParams, out: &Path) -> Result<Outcome, CliError> {
    let mut m = RunManifest::new("verify", serde_json::to_value(p)?);
    m.tolerances.insert("drift_threshold".into(), p.drift_threshold);
    m.tolerances.insert("slope_tolerance".into(), p.slope_tolerance);
    let case = p.case.configure()?;
    let v = VerifyConfig {
        a0: p.a0,
        t0: p.t0,
        t_end: p.t_end,
        grid: Grid::new(p.grid_l, p.grid_n)?,
        cfl: p.cfl,
        samples_per_decade: p.samples_per_decade,
        nonlinear: true,
    };
    v.validate()?;

    let res = case.reduce::<Surd>()?;
    m.truncation = Some(res.truncation);
    let law = AmplitudeLawODE::from_reduction(&res, &case);
    let run = run_verification::<f64>(&case, &v)?;
    let samples = run.trace.samples();
    let first = samples[0].amp;
    let last = samples[samples.len() - 1].amp;
    let drift = ((last - first) / first).abs();

    let cubic = law.coefficients.iter().find(|&&(p, q, _)| p == 3 && q == 0).map(|c| c.2);
    let measured = if cubic.is_some() { cubic_rate(&run.trace, p.t_end / 10.0, p.t_end) } else { None };

    let window = CompareWindow {
        late_start: p.late_start.unwrap_or(10.0 * p.t0),
        ..CompareWindow::default()
    };
    let cmp = compare(&run.trace, &law, &window).ok();

    let linear_ratio = if p.linear_check {
        let coarse = linear_exact_error::<f64>(&case, &v)?;
        let fine = linear_exact_error::<f64>(&case, &VerifyConfig { grid: v.grid.refined(), ..v.clone() })?;
        Some(coarse / fine)
    } else {
        None
    };

    let summary = VerifySummary {
        case: case.tag.to_string(),
        steps: run.steps,
        initial_amplitude: first,
        final_amplitude: last,
        amplitude_drift: drift,
        law_is_constant: law.coefficients.iter().all(|c| c.2 == 0.0),
        measured_cubic_rate: measured,
        predicted_cubic_rate: cubic,
        late_anchor: cmp.as_ref().map(|c| c.anchor_time),
        late_max_relative_deviation: cmp.as_ref().map(|c| c.late_max_relative_deviation),
        transient_exponent: cmp.as_ref().and_then(|c| c.transient_exponent),
        expected_transient_exponent: case.transient_exponent(),
        mass_drift: run.mass_drift,
        linear_error_ratio: linear_ratio,
    };

    let mut r = String::new();
    writeln!(r, "case {}  gamma={} delta={} r={}", case.tag, case.gamma, case.delta, case.r).unwrap();
    writeln!(r, "grid N={} L={}  cfl={}  steps={}", p.grid_n, p.grid_l, p.cfl, run.steps).unwrap();
    writeln!(r, "A(t0)={:.6}  A(t_end)={:.6}", first, last).unwrap();
    if summary.law_is_constant {
        writeln!(
            r,
            "amplitude drift: {:.4e} (threshold {}) {}",
            drift,
            p.drift_threshold,
            verdict(drift <= p.drift_threshold)
        )
        .unwrap();
    } else {
        writeln!(r, "amplitude drift: {:.4e}", drift).unwrap();
    }
    if let (Some(pred), Some(meas)) = (cubic, measured) {
        let rel = ((meas - pred) / pred).abs();
        writeln!(
            r,
            "A^3 slope: measured {} predicted {} relative error {:.3} (tolerance {}) {}",
            fmt4(meas),
            fmt4(pred),
            rel,
            p.slope_tolerance,
            verdict(rel <= p.slope_tolerance)
        )
        .unwrap();
    }
    match &cmp {
        Some(c) => {
            writeln!(
                r,
                "late deviation: {:.4e} (anchored at t={:.4})",
                c.late_max_relative_deviation, c.anchor_time
            )
            .unwrap();
            match c.transient_exponent {
                Some(k) => writeln!(r, "transient exponent: {:.4} (expected {})", k, c.expected_exponent),
                None => writeln!(r, "transient exponent: n/a (expected {})", c.expected_exponent),
            }
            .unwrap();
        }
        None => writeln!(r, "late deviation: n/a (trace too short)").unwrap(),
    }
    writeln!(r, "mass drift: {:.4e}", run.mass_drift).unwrap();
    if let Some(q) = linear_ratio {
        writeln!(r, "linear refinement error ratio: {:.3}", q).unwrap();
    }

    write_file(out, "trace.csv", run.trace.to_csv().as_bytes(), &mut m)?;
    write_file(out, "trace.json", run.trace.to_json().as_bytes(), &mut m)?;
    if let Some(c) = &cmp {
        let mut csv = String::from("t,A_pde,A_law\n");
        for (s, a) in samples.iter().zip(&c.law_values) {
            writeln!(csv, "{},{},{}", s.t, s.amp, a).unwrap();
        }
        write_file(out, "law_trace.csv", csv.as_bytes(), &mut m)?;
    }
    if let Some(f) = run.snapshots.first() {
        let mut buf = Vec::new();
        f.write_csv(&mut buf)?;
        write_file(out, "snapshot_first.csv", &buf, &mut m)?;
    }
    if let Some(f) = run.snapshots.last() {
        let mut buf = Vec::new();
        f.write_csv(&mut buf)?;
        write_file(out, "snapshot_final.csv", &buf, &mut m)?;
    }
    write_file(out, "verify.json", serde_json::to_string_pretty(&summary)?.as_bytes(), &mut m)?;
    write_file(out, "verify_report.txt", r.as_bytes(), &mut m)?;
    Ok(Outcome { stdout: r, manifest: m })
}

fn parse_sigma(s: &str) -> Result<BigRational, CliError> {
    if let Ok(q) = BigRational::from_str(s.trim()) {
        return Ok(q);
    }
    s.trim()
        .parse::<f64>()
        .ok()
        .and_then(gburgers::scalar::rational_from_f64)
        .ok_or_else(|| CliError::Usage(format!("cannot parse sigma {s:?}")))
}

pub fn spectrum_table(p: &SpectrumParams, out: &Path) -> Result<Outcome, CliError> {
    let mut m = RunManifest::new("spectrum", serde_json::to_value(p)?);
    let sigma = parse_sigma(&p.sigma)?;
    let entries = spectrum(&OperatorSigma::new(sigma.clone()), p.l_max);
    let residuals = eigen_residuals(&sigma, p.l_max);
    let mut t = String::new();
    writeln!(t, "sigma = {sigma}").unwrap();
    writeln!(t, "{:>3}  {:>10}  {:>12}  {}", "l", "eigenvalue", "decimal", "residual").unwrap();
    for (e, res) in entries.iter().zip(&residuals) {
        let size = res.iter().map(|(_, c)| c.abs()).max().unwrap_or_default();
        writeln!(
            t,
            "{:>3}  {:>10}  {:>12.6}  {}",
            e.mode_index,
            e.eigenvalue.to_string(),
            gburgers::Scalar::to_f64(&e.eigenvalue),
            size
        )
        .unwrap();
    }
    if sigma == BigRational::from_integer(1.into()) {
        writeln!(t, "critical: the l = 0 mode is neutral, all others decay").unwrap();
    }
    write_file(out, "spectrum.txt", t.as_bytes(), &mut m)?;
    Ok(Outcome { stdout: t, manifest: m })
}

pub fn run_selftest(p: &SelftestParams, out: &Path) -> Result<(Outcome, bool), CliError> {
    let mut m = RunManifest::new("selftest", serde_json::to_value(p)?);
    let checks = selftest(&SelftestOptions { perturb_golden: p.perturb_golden });
    let mut t = String::new();
    for c in &checks {
        writeln!(t, "{} {}: {}", verdict(c.passed), c.name, c.detail).unwrap();
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    writeln!(t, "{} checks, {} failed", checks.len(), failed).unwrap();
    write_file(out, "selftest.txt", t.as_bytes(), &mut m)?;
    Ok((Outcome { stdout: t, manifest: m }, failed == 0))
}

/// Re-runs the command recorded in `manifest_path` into `<dir>/replay` and
/// compares every recorded output byte for byte.
pub fn replay(manifest_path: &Path) -> Result<(String, Vec<String>, PathBuf), CliError> {
    let recorded = RunManifest::load(manifest_path)?;
    let dir = manifest_path.parent().map(Path::to_path_buf).unwrap_or_default();
    let target = dir.join("replay");
    std::fs::create_dir_all(&target)?;
    let params = recorded.params.clone();
    let bad = |e: serde_json::Error| CliError::Usage(format!("manifest parameters: {e}"));
    let mut rerun = match recorded.command.as_str() {
        "reduce" => reduce(&serde_json::from_value(params).map_err(bad)?, &target)?.manifest,
        "verify" => verify(&serde_json::from_value(params).map_err(bad)?, &target)?.manifest,
        "spectrum" => spectrum_table(&serde_json::from_value(params).map_err(bad)?, &target)?.manifest,
        "selftest" => run_selftest(&serde_json::from_value(params).map_err(bad)?, &target)?.0.manifest,
        other => return Err(CliError::Usage(format!("cannot replay command {other:?}"))),
    };
    rerun.write(&target)?;

    let mut t = String::new();
    let mut mismatched = Vec::new();
    for name in &recorded.outputs {
        let a = std::fs::read(dir.join(name))?;
        let same = std::fs::read(target.join(name)).map(|b| b == a).unwrap_or(false);
        writeln!(t, "{} {}", if same { "identical" } else { "DIFFERS" }, name).unwrap();
        if !same {
            mismatched.push(name.clone());
        }
    }
    writeln!(t, "{} outputs compared, {} differ", recorded.outputs.len(), mismatched.len()).unwrap();
    Ok((t, mismatched, target))
}
