//! Numerical checks of the operator machinery and a self-test suite.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

use crate::models::CaseTag;
use crate::operators::{
    apply_s, hermite_mode, linv, moment_over_sqrt_pi, MomentRule, OperatorSigma,
};
use crate::reducer::{reduce, ReductionResult};
use crate::reference::{self, Printed, Status};
use crate::report::render_law;
use crate::scalar::Scalar;
use crate::series::{GaussianSeries, TermKey, Truncation};
use crate::surd::Surd;

/// Even coefficients `a_2, a_4, …, a_2n` of `S₁⁻¹(G) = G Σ a_2j ζ^2j`.
pub fn linv_gaussian_coefficients(n_max: u32) -> Vec<BigRational> {
    let depth = 2 * n_max + 2;
    let t = Truncation::new(depth, 1, 1).expect("positive orders");
    let g = GaussianSeries::monomial(TermKey::new(1, 0, 0, 0), BigRational::one());
    let w = linv(&g, &t).expect("inverse of the Gaussian terminates");
    (1..=n_max).map(|n| w.coeff(&TermKey::new(1, 2 * n, 0, 0))).collect()
}

/// Checks `c_2n (2n − 2) = c_2n−2 · 2n(2n − 1)` for `c = 1/a`, with
/// `c_2 = 2` and `c_4 = 12`. Returns the first `n` that fails.
pub fn check_denominator_recurrence(coeffs: &[BigRational]) -> Result<(), u32> {
    let c: Vec<BigRational> = coeffs.iter().map(|a| a.recip()).collect();
    let int = |v: i64| BigRational::from_integer(BigInt::from(v));
    if c.first() != Some(&int(2)) {
        return Err(1);
    }
    if c.len() > 1 && c[1] != int(12) {
        return Err(2);
    }
    for (i, pair) in c.windows(2).enumerate() {
        let n = i as i64 + 2;
        if pair[1].clone() * int(2 * n - 2) != pair[0].clone() * int(2 * n * (2 * n - 1)) {
            return Err(n as u32);
        }
    }
    Ok(())
}

/// Ratios `T_n / T_{n−1}` of `T_n = a_2n ∫ ζ^2n G² dζ`, for `n = 2..`.
pub fn weighted_series_ratios(coeffs: &[BigRational]) -> Vec<f64> {
    let terms: Vec<Surd> = coeffs
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let m: Surd = moment_over_sqrt_pi(MomentRule::Exact, 1, 2 * (i as u32 + 1))
                .expect("even moment");
            Surd::from_rational(a) * m
        })
        .collect();
    terms.windows(2).map(|w| w[1].to_f64() / w[0].to_f64()).collect()
}

/// `∫ ζ^(2m) exp(−(k+1)ζ²/2) dζ` by the trapezoid rule on `[−L, L]`.
pub fn quadrature_moment(k: u32, m: u32) -> f64 {
    let (half, steps) = (20.0f64, 8000usize);
    let h = 2.0 * half / steps as f64;
    let w = (k + 1) as f64 / 2.0;
    let f = |z: f64| z.powi(2 * m as i32) * (-w * z * z).exp();
    let inner: f64 = (1..steps).map(|i| f(-half + h * i as f64)).sum();
    h * (inner + 0.5 * (f(-half) + f(half)))
}

/// Largest relative gap between the closed-form moments and quadrature.
pub fn moment_identity_error(m_max: u32, k_max: u32) -> f64 {
    let sqrt_pi = std::f64::consts::PI.sqrt();
    let mut worst: f64 = 0.0;
    for k in 0..=k_max {
        for m in 0..=m_max {
            let exact: Surd = moment_over_sqrt_pi(MomentRule::Exact, k, 2 * m).expect("even");
            let exact = exact.to_f64() * sqrt_pi;
            worst = worst.max(((quadrature_moment(k, m) - exact) / exact).abs());
        }
    }
    worst
}

/// `S_σ He_l G − (σ − 1 − l) He_l G` for each `l ≤ l_max`.
pub fn eigen_residuals(sigma: &BigRational, l_max: u32) -> Vec<GaussianSeries<BigRational>> {
    let op = OperatorSigma::new(sigma.clone());
    let t = Truncation::new(l_max + 3, 1, 1).expect("positive orders");
    (0..=l_max)
        .map(|l| {
            let mode = hermite_mode::<BigRational>(l);
            let lambda = sigma.clone() - BigRational::one() - BigRational::from_integer(l.into());
            apply_s(&op, &mode, &t).sub(&mode.scale(&lambda))
        })
        .collect()
}

/// Inputs whose inverse does not map back under `S₁`, compared below
/// `zeta_order`. The inverse is taken with `guard` extra orders.
pub fn linv_round_trip_failures<T: Scalar>(
    inputs: &[GaussianSeries<T>],
    truncation: &Truncation,
    guard: u32,
) -> usize {
    let wide = truncation.with_zeta_order(truncation.zeta_order + guard);
    inputs
        .iter()
        .filter(|rhs| match linv(rhs, &wide) {
            Ok(w) => !apply_s(&OperatorSigma::critical(), &w, truncation)
                .sub(&rhs.truncate(truncation))
                .is_empty(),
            Err(_) => true,
        })
        .count()
}

/// An exact reduction of one case with its inverse inputs recorded.
pub fn recorded_reduction(tag: CaseTag) -> crate::Result<ReductionResult<Surd>> {
    let mut cfg = tag.reducer_config();
    cfg.record_linv_inputs = true;
    reduce(&tag.system::<Surd>(), &cfg)
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        Check { name: name.into(), passed, detail: detail.into() }
    }
}

#[derive(Clone, Debug, Default)]
pub struct SelftestOptions {
    /// Shifts one golden coefficient so that the golden check must fail.
    pub perturb_golden: bool,
}

pub fn selftest(opts: &SelftestOptions) -> Vec<Check> {
    let mut checks = Vec::new();

    let mut eigen_ok = true;
    for sigma in [BigRational::new(1.into(), 2.into()), BigRational::one(), BigRational::from_integer(2.into())] {
        eigen_ok &= eigen_residuals(&sigma, 7).iter().all(GaussianSeries::is_empty);
    }
    checks.push(Check::new("eigenrelation l<=7", eigen_ok, "sigma in {1/2, 1, 2}"));

    let err = moment_identity_error(6, 5);
    checks.push(Check::new("moment identity", err <= 1e-12, format!("max relative error {err:.2e}")));

    let coeffs = linv_gaussian_coefficients(30);
    let rec = check_denominator_recurrence(&coeffs);
    checks.push(Check::new(
        "inverse Gaussian recurrence",
        rec.is_ok(),
        match rec {
            Ok(()) => "c2 = 2, c4 = 12, recurrence exact to n = 30".to_string(),
            Err(n) => format!("fails at n = {n}"),
        },
    ));
    let ratio = *weighted_series_ratios(&coeffs).last().expect("ratios");
    checks.push(Check::new(
        "ratio test",
        (ratio - 0.5).abs() <= 0.02,
        format!("ratio at n = 30: {ratio:.4} (limit 0.5)"),
    ));

    let golden: Vec<(CaseTag, &[Printed], reference::PrintedLaw)> = vec![
        (CaseTag::A1, reference::A1_MANIFOLD, reference::A1_LAW),
        (CaseTag::B1, &[], &[]),
        (CaseTag::A2, reference::A2_MANIFOLD, reference::A2_LAW),
        (CaseTag::B2, reference::B2_MANIFOLD, reference::B2_LAW),
    ];
    for (tag, manifold, law) in golden {
        let res = match recorded_reduction(tag) {
            Ok(r) => r,
            Err(e) => {
                checks.push(Check::new(&format!("reduce {tag}"), false, e.to_string()));
                continue;
            }
        };
        checks.push(Check::new(
            &format!("{tag} amplitude condition"),
            res.amplitude_condition_held(),
            format!("{} iterations", res.iterations),
        ));
        let cfg = tag.reducer_config();
        let fails = linv_round_trip_failures(&res.linv_inputs, &cfg.working(), cfg.guard);
        checks.push(Check::new(
            &format!("{tag} inverse round trip"),
            fails == 0,
            format!("{} inputs, {fails} failures", res.linv_inputs.len()),
        ));

        let mut table: Vec<Printed> = manifold.to_vec();
        if opts.perturb_golden && tag == CaseTag::A1 {
            if let Some(p) = table.iter_mut().find(|p| p.status == Status::Golden) {
                p.value += 0.0001;
            }
        }
        let mut bad = reference::manifold_mismatches(&table, &res.reported());
        bad.extend(reference::law_mismatches(law, &res.amplitude_law));
        let detail = match bad.first() {
            None => format!("law {}", render_law(&res.amplitude_law)),
            Some(m) => format!(
                "{} mismatches, first G^{} zeta^{} A^{} theta^{}: printed {} computed {:.6}",
                bad.len(),
                m.key.gauss,
                m.key.zeta,
                m.key.amp,
                m.key.theta,
                m.printed,
                m.computed
            ),
        };
        checks.push(Check::new(&format!("{tag} golden coefficients"), bad.is_empty(), detail));
    }
    checks
}

pub fn ratio_limit_estimate() -> f64 {
    weighted_series_ratios(&linv_gaussian_coefficients(30)).last().copied().unwrap_or(f64::NAN)
}
