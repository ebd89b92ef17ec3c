//! Parameter cases, the map between similarity and physical variables, and
//! the amplitude laws in physical time.

use std::fmt;
use std::io::Write;

use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::reducer::{ReducerConfig, ReductionResult, SystemDef};
use crate::scalar::{rational_from_f64, Real, Scalar};
use crate::series::GaussianSeries;

pub const DEFAULT_CRITICAL_THRESHOLD: f64 = 1e-3;

/// A: constant background diffusivity (γ ≠ 0). B: none (γ = 0).
/// Suffix 1: r < 0, θ decays. Suffix 2: r ≈ 0, θ kept as a slow mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CaseTag {
    A1,
    A2,
    B1,
    B2,
}

impl CaseTag {
    pub fn has_background(self) -> bool {
        matches!(self, CaseTag::A1 | CaseTag::A2)
    }

    pub fn theta_active(self) -> bool {
        matches!(self, CaseTag::A2 | CaseTag::B2)
    }

    /// θ order used for the reduction in this case.
    pub fn theta_order(self) -> u32 {
        match self {
            CaseTag::A1 | CaseTag::B1 => 1,
            CaseTag::A2 => 2,
            CaseTag::B2 => 3,
        }
    }

    pub fn system<T: Scalar>(self) -> SystemDef<T> {
        match self {
            CaseTag::A1 => SystemDef::case_a1(),
            CaseTag::A2 => SystemDef::case_a2(),
            CaseTag::B1 => SystemDef::case_b1(),
            CaseTag::B2 => SystemDef::case_b2(),
        }
    }

    pub fn reducer_config(self) -> ReducerConfig {
        ReducerConfig::new(self.theta_order()).expect("case theta orders are positive")
    }
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Sign of the time exponent of θ without background diffusivity.
///
/// `Printed` takes `dθ/dτ' = (r/β)θ`, so θ grows like `t^r`; `Derived`
/// follows from matching exponents and gives `t^(−r)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThetaSign {
    #[default]
    Printed,
    Derived,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseConfig {
    pub gamma: f64,
    pub delta: f64,
    pub r: f64,
    pub tag: CaseTag,
    pub alpha: f64,
    pub beta: f64,
    /// Amplitude scale: `u = C t^(−α) v`.
    pub c_const: f64,
    /// `ζ = zeta_scale · x · t^(−β)`.
    pub zeta_scale: f64,
    /// `dτ'/d(log t)`.
    pub tau_rate: f64,
    pub theta_sign: ThetaSign,
    #[serde(with = "rational_text")]
    pub sigma: BigRational,
    /// `c` in `dθ/dτ' = cθ`, exact in the binary value of `r`.
    #[serde(with = "rational_text")]
    pub theta_rate: BigRational,
}

mod rational_text {
    use num_rational::BigRational;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&r.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(|_| D::Error::custom(format!("not a rational: {text}")))
    }
}

pub fn configure(gamma: f64, delta: f64, r: f64, threshold: f64) -> Result<CaseConfig> {
    configure_with(gamma, delta, r, threshold, ThetaSign::default())
}

pub fn configure_with(
    gamma: f64,
    delta: f64,
    r: f64,
    threshold: f64,
    theta_sign: ThetaSign,
) -> Result<CaseConfig> {
    let bad = |msg: String| Err(Error::InvalidParameter(msg));
    if !gamma.is_finite() || gamma < 0.0 {
        return bad(format!("gamma must be finite and >= 0, got {gamma}"));
    }
    if !delta.is_finite() || delta <= 0.0 {
        return bad(format!("delta must be finite and > 0, got {delta}"));
    }
    if !r.is_finite() || r > 0.0 {
        return bad(format!("r must be finite and <= 0, got {r}"));
    }
    if !threshold.is_finite() || threshold <= 0.0 {
        return bad(format!("critical threshold must be > 0, got {threshold}"));
    }
    let critical = r.abs() < threshold;
    let r_exact = rational_from_f64(r).expect("finite r");

    if gamma != 0.0 {
        return Ok(CaseConfig {
            gamma,
            delta,
            r,
            tag: if critical { CaseTag::A2 } else { CaseTag::A1 },
            alpha: 0.5,
            beta: 0.5,
            c_const: (gamma / 2.0).sqrt(),
            zeta_scale: (1.0 / (2.0 * gamma)).sqrt(),
            tau_rate: 0.5,
            theta_sign,
            sigma: BigRational::one(),
            theta_rate: r_exact * BigRational::from_integer(2.into()),
        });
    }

    if r <= -1.0 {
        return bad(format!("without background diffusivity r must exceed -1, got {r}"));
    }
    let beta = (1.0 + r) / 2.0;
    let beta_exact = (BigRational::one() + r_exact.clone()) / BigRational::from_integer(2.into());
    let rate = r_exact / beta_exact;
    Ok(CaseConfig {
        gamma,
        delta,
        r,
        tag: if critical { CaseTag::B2 } else { CaseTag::B1 },
        alpha: beta,
        beta,
        c_const: (delta * beta).sqrt(),
        zeta_scale: (beta / delta).sqrt(),
        tau_rate: beta,
        theta_sign,
        sigma: BigRational::one(),
        theta_rate: match theta_sign {
            ThetaSign::Printed => rate,
            ThetaSign::Derived => -rate,
        },
    })
}

impl CaseConfig {
    /// `½Δ(t) = γ + δ t^r`.
    pub fn diffusivity<R: Real>(&self, t: R) -> R {
        R::lit(self.gamma) + R::lit(self.delta) * t.powf(R::lit(self.r))
    }

    pub fn theta<R: Real>(&self, t: R) -> R {
        if self.tag.has_background() {
            R::lit(self.delta / (2.0 * self.gamma)) * t.powf(R::lit(self.r))
        } else {
            let p = match self.theta_sign {
                ThetaSign::Printed => self.r,
                ThetaSign::Derived => -self.r,
            };
            R::lit((self.beta / self.delta).sqrt()) * t.powf(R::lit(p))
        }
    }

    pub fn zeta<R: Real>(&self, x: R, t: R) -> R {
        R::lit(self.zeta_scale) * x * t.powf(-R::lit(self.beta))
    }

    /// `C t^(−α)`.
    pub fn amplitude_scale<R: Real>(&self, t: R) -> R {
        R::lit(self.c_const) * t.powf(-R::lit(self.alpha))
    }

    /// Exponent in `t` of the slowest decaying transient.
    pub fn transient_exponent(&self) -> f64 {
        self.tau_rate
    }

    pub fn theta_rate_f64(&self) -> f64 {
        Scalar::to_f64(&self.theta_rate)
    }

    pub fn sigma_is_critical(&self) -> bool {
        self.sigma.is_one()
    }
}

/// A similarity-space manifold bound to the physical variables of a case.
#[derive(Clone, Debug)]
pub struct PhysicalManifold<T> {
    pub config: CaseConfig,
    pub manifold: GaussianSeries<T>,
}

pub fn back_transform<T: Scalar>(
    res: &ReductionResult<T>,
    cfg: &CaseConfig,
) -> Result<PhysicalManifold<T>> {
    let manifold = res.reported();
    if !cfg.tag.theta_active() && manifold.keys().any(|k| k.theta > 0) {
        return Err(Error::InvalidParameter(format!(
            "manifold carries theta terms but case {} freezes theta",
            cfg.tag
        )));
    }
    Ok(PhysicalManifold { config: cfg.clone(), manifold })
}

impl<T: Scalar> PhysicalManifold<T> {
    pub fn evaluate(&self, x: f64, t: f64, amp: f64) -> Result<f64> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::InvalidParameter(format!("evaluation needs t > 0, got {t}")));
        }
        let cfg = &self.config;
        let theta = if cfg.tag.theta_active() { cfg.theta(t) } else { 0.0 };
        let v = self.manifold.evaluate(cfg.zeta(x, t), amp, theta);
        Ok(cfg.amplitude_scale(t) * v)
    }
}

/// `dA/dt = Σ c_pq Aᵖ θ(t)^q / t`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeLawODE {
    /// `(p, q, c_pq)`, already scaled to physical time.
    pub coefficients: Vec<(u32, u32, f64)>,
    pub config: CaseConfig,
}

impl AmplitudeLawODE {
    pub fn from_reduction<T: Scalar>(res: &ReductionResult<T>, cfg: &CaseConfig) -> Self {
        let coefficients = res
            .amplitude_law
            .iter()
            .map(|(k, c)| (k.amp, k.theta, c.to_f64() * cfg.tau_rate))
            .collect();
        AmplitudeLawODE { coefficients, config: cfg.clone() }
    }

    /// `t · dA/dt`, i.e. the rate in `log t`.
    pub fn log_rate<R: Real>(&self, amp: R, t: R) -> R {
        let theta = if self.config.tag.theta_active() { self.config.theta(t) } else { R::zero() };
        self.coefficients.iter().fold(R::zero(), |acc, &(p, q, c)| {
            acc + R::lit(c) * amp.powi(p as i32) * theta.powi(q as i32)
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceSample {
    pub t: f64,
    #[serde(rename = "A")]
    pub amp: f64,
    pub theta: f64,
}

/// Samples of `(t, A, θ)` with strictly increasing `t`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeTrace {
    samples: Vec<TraceSample>,
}

impl AmplitudeTrace {
    pub fn new(samples: Vec<TraceSample>) -> Result<Self> {
        if samples.windows(2).any(|w| !(w[1].t > w[0].t)) {
            return Err(Error::InvalidParameter("trace times must be strictly increasing".into()));
        }
        Ok(AmplitudeTrace { samples })
    }

    pub fn samples(&self) -> &[TraceSample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn first(&self) -> Option<&TraceSample> {
        self.samples.first()
    }

    pub fn last(&self) -> Option<&TraceSample> {
        self.samples.last()
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "t,A,theta")?;
        for s in &self.samples {
            writeln!(out, "{:e},{:e},{:e}", s.t, s.amp, s.theta)?;
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii csv")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("trace serializes")
    }
}

/// Classic RK4 in `s = log t` with `steps` uniform steps from `t0` to `t1`.
pub fn integrate_amplitude<R: Real>(
    law: &AmplitudeLawODE,
    a0: R,
    t0: R,
    t1: R,
    steps: usize,
) -> Result<AmplitudeTrace> {
    if !(t0 > R::zero()) || !(t1 > t0) {
        return Err(Error::InvalidParameter("need 0 < t0 < t1".into()));
    }
    if steps == 0 {
        return Err(Error::InvalidParameter("steps must be >= 1".into()));
    }
    let (s0, s1) = (t0.ln(), t1.ln());
    let ds = (s1 - s0) / R::lit(steps as f64);
    let half = R::lit(0.5);
    let f = |s: R, a: R| law.log_rate(a, s.exp());
    let sample = |s: R, a: R| {
        let t = s.exp();
        TraceSample {
            t: t.to_f64().unwrap_or(f64::NAN),
            amp: a.to_f64().unwrap_or(f64::NAN),
            theta: law.config.theta(t).to_f64().unwrap_or(f64::NAN),
        }
    };

    let mut a = a0;
    let mut samples = vec![sample(s0, a)];
    for i in 0..steps {
        let s = s0 + ds * R::lit(i as f64);
        let k1 = f(s, a);
        let k2 = f(s + half * ds, a + half * ds * k1);
        let k3 = f(s + half * ds, a + half * ds * k2);
        let k4 = f(s + ds, a + ds * k3);
        a = a + ds / R::lit(6.0) * (k1 + R::lit(2.0) * (k2 + k3) + k4);
        if !a.is_finite() {
            return Err(Error::SolverAborted {
                time: s.exp().to_f64().unwrap_or(f64::NAN),
                reason: "amplitude became non-finite".into(),
            });
        }
        let s_next = if i + 1 == steps { s1 } else { s0 + ds * R::lit((i + 1) as f64) };
        samples.push(sample(s_next, a));
    }
    AmplitudeTrace::new(samples)
}

impl CaseConfig {
    /// Reduction matching this case with default orders.
    pub fn reduce<T: crate::scalar::RadicalScalar>(&self) -> Result<ReductionResult<T>> {
        let mut sys: SystemDef<T> = self.tag.system();
        sys.theta_rate = T::zero();
        crate::reducer::reduce(&sys, &self.tag.reducer_config())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{AmpKey, AmplitudePoly, TermKey};

    fn law_from(coeffs: Vec<(u32, u32, f64)>, cfg: &CaseConfig) -> AmplitudeLawODE {
        AmplitudeLawODE { coefficients: coeffs, config: cfg.clone() }
    }

    #[test]
    fn case_a1_constants() {
        let c = configure(1.0, 1.0, -0.5, DEFAULT_CRITICAL_THRESHOLD).unwrap();
        assert_eq!(c.tag, CaseTag::A1);
        assert_eq!((c.alpha, c.beta), (0.5, 0.5));
        assert!((c.c_const - 0.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(c.theta_rate, BigRational::from_integer((-1).into()));
    }

    #[test]
    fn case_b1_constants() {
        let c = configure(0.0, 2.0, -0.5, DEFAULT_CRITICAL_THRESHOLD).unwrap();
        assert_eq!(c.tag, CaseTag::B1);
        assert_eq!((c.alpha, c.beta), (0.25, 0.25));
        assert!((c.c_const - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn critical_threshold_selects_case_two() {
        assert_eq!(configure(1.0, 1.0, 0.0, 1e-3).unwrap().tag, CaseTag::A2);
        assert_eq!(configure(0.0, 1.0, -1e-4, 1e-3).unwrap().tag, CaseTag::B2);
        assert_eq!(configure(1.0, 1.0, -2e-3, 1e-3).unwrap().tag, CaseTag::A1);
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(configure(0.0, 1.0, -1.0, 1e-3).is_err());
        assert!(configure(1.0, -1.0, -0.5, 1e-3).is_err());
        assert!(configure(1.0, 0.0, -0.5, 1e-3).is_err());
        assert!(configure(-1.0, 1.0, -0.5, 1e-3).is_err());
        assert!(configure(1.0, 1.0, 0.5, 1e-3).is_err());
        assert!(configure(1.0, 1.0, f64::NAN, 1e-3).is_err());
    }

    #[test]
    fn theta_sign_flag() {
        let p = configure_with(0.0, 1.0, -0.5, 1e-3, ThetaSign::Printed).unwrap();
        let d = configure_with(0.0, 1.0, -0.5, 1e-3, ThetaSign::Derived).unwrap();
        assert_eq!(p.theta_rate, -d.theta_rate.clone());
        assert!((p.theta_rate_f64() + 2.0).abs() < 1e-15);
        assert!(p.theta(4.0) < d.theta(4.0));
    }

    #[test]
    fn gaussian_back_transform_matches_closed_form() {
        let cfg = configure(0.0, 1.0, -0.5, 1e-3).unwrap();
        let res = ReductionResult::<f64> {
            manifold: GaussianSeries::amplitude_mode(),
            amplitude_law: AmplitudePoly::zero(),
            truncation: cfg.tag.reducer_config().truncation,
            iterations: 0,
            residual_zero: true,
            amplitude_defects: vec![],
            linv_inputs: vec![],
        };
        let pm = back_transform(&res, &cfg).unwrap();
        let (x, t, a) = (0.7f64, 3.0f64, 0.4);
        let r = cfg.r;
        let expected = a * (cfg.delta * (1.0 + r) / 2.0).sqrt()
            * t.powf(-(1.0 + r) / 2.0)
            * (-(1.0 + r) * x * x / (4.0 * cfg.delta * t.powf(1.0 + r))).exp();
        assert!((pm.evaluate(x, t, a).unwrap() - expected).abs() < 1e-14);
        assert!(pm.evaluate(x, 0.0, a).is_err());
        assert!(pm.evaluate(x, -1.0, a).is_err());
    }

    #[test]
    fn frozen_theta_rejects_theta_terms() {
        let cfg = configure(1.0, 1.0, -0.5, 1e-3).unwrap();
        let res = ReductionResult::<f64> {
            manifold: GaussianSeries::monomial(TermKey::new(1, 0, 1, 1), 1.0),
            amplitude_law: AmplitudePoly::zero(),
            truncation: crate::series::Truncation::new(8, 6, 2).unwrap(),
            iterations: 0,
            residual_zero: true,
            amplitude_defects: vec![],
            linv_inputs: vec![],
        };
        assert!(back_transform(&res, &cfg).is_err());
    }

    #[test]
    fn constant_law_keeps_amplitude() {
        let cfg = configure(0.0, 1.0, -0.5, 1e-3).unwrap();
        let tr = integrate_amplitude(&law_from(vec![], &cfg), 0.3, 1.0, 100.0, 50).unwrap();
        assert!(tr.samples().iter().all(|s| s.amp == 0.3));
        assert_eq!(tr.len(), 51);
        assert!((tr.last().unwrap().t - 100.0).abs() < 1e-12);
    }

    #[test]
    fn cubic_law_matches_separable_solution() {
        let cfg = configure(1.0, 1.0, -0.5, 1e-3).unwrap();
        let k = 0.0321;
        let law = law_from(vec![(3, 0, k)], &cfg);
        let a0 = 0.3;
        let tr = integrate_amplitude(&law, a0, 1.0, 100.0, 400).unwrap();
        for s in tr.samples() {
            let exact = a0 / (1.0 - 2.0 * k * a0 * a0 * s.t.ln()).sqrt();
            assert!((s.amp - exact).abs() < 1e-8, "t={} {} vs {}", s.t, s.amp, exact);
        }
    }

    #[test]
    fn zero_amplitude_is_fixed() {
        let cfg = configure(1.0, 1.0, -0.5, 1e-3).unwrap();
        let law = law_from(vec![(3, 0, 0.0321), (5, 0, -0.0011)], &cfg);
        let tr = integrate_amplitude(&law, 0.0f32, 1.0, 10.0, 20).unwrap();
        assert!(tr.samples().iter().all(|s| s.amp == 0.0));
    }

    #[test]
    fn law_scaling_to_physical_time() {
        let cfg = configure(1.0, 1.0, -0.5, 1e-3).unwrap();
        let res = ReductionResult::<f64> {
            manifold: GaussianSeries::amplitude_mode(),
            amplitude_law: AmplitudePoly::monomial(AmpKey::new(3, 0), 0.0641),
            truncation: cfg.tag.reducer_config().truncation,
            iterations: 1,
            residual_zero: true,
            amplitude_defects: vec![],
            linv_inputs: vec![],
        };
        let law = AmplitudeLawODE::from_reduction(&res, &cfg);
        assert_eq!(law.coefficients, vec![(3, 0, 0.03205)]);
    }

    #[test]
    fn bad_integration_ranges() {
        let cfg = configure(1.0, 1.0, -0.5, 1e-3).unwrap();
        let law = law_from(vec![], &cfg);
        assert!(integrate_amplitude(&law, 0.1, 0.0, 1.0, 10).is_err());
        assert!(integrate_amplitude(&law, 0.1, 2.0, 1.0, 10).is_err());
        assert!(integrate_amplitude(&law, 0.1, 1.0, 2.0, 0).is_err());
    }

    #[test]
    fn trace_csv_layout() {
        let tr = AmplitudeTrace::new(vec![
            TraceSample { t: 1.0, amp: 0.5, theta: 0.0 },
            TraceSample { t: 2.0, amp: 0.25, theta: 0.0 },
        ])
        .unwrap();
        let csv = tr.to_csv();
        assert!(csv.starts_with("t,A,theta\n"));
        assert_eq!(csv.lines().count(), 3);
        assert!(tr.to_json().contains("\"A\""));
        assert!(AmplitudeTrace::new(vec![tr.samples()[1], tr.samples()[0]]).is_err());
    }
}
