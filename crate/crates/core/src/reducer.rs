//! Iterative construction of the centre manifold `v(ζ; A, θ)` and the
//! amplitude law `dA/dτ' = h(A, θ)`.
//!
//! Each pass computes the residual of the governing equation, absorbs its
//! projection onto the critical mode into `h`, inverts `S₁` on what is left
//! and renormalises so that the amplitude stays `A`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::operators::{apply_s, linv, project_amplitude_with, MomentRule, OperatorSigma};
use crate::scalar::{RadicalScalar, Scalar};
use crate::series::{AmpKey, AmplitudePoly, GaussianSeries, TermKey, Truncation};

type CustomFn<T> = dyn Fn(&GaussianSeries<T>, &Truncation) -> GaussianSeries<T> + Send + Sync;

/// The nonlinear term `f(v, θ)`.
#[derive(Clone)]
pub enum Nonlinearity<T> {
    Linear,
    /// `−v v_ζ + 2θ v_ζζ`
    CaseA,
    /// `−θ v v_ζ`
    CaseB,
    Custom(Arc<CustomFn<T>>),
}

impl<T> fmt::Debug for Nonlinearity<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Nonlinearity::Linear => write!(f, "Linear"),
            Nonlinearity::CaseA => write!(f, "CaseA"),
            Nonlinearity::CaseB => write!(f, "CaseB"),
            Nonlinearity::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

fn theta<T: Scalar>() -> GaussianSeries<T> {
    GaussianSeries::monomial(TermKey::new(0, 0, 0, 1), T::one())
}

impl<T: Scalar> Nonlinearity<T> {
    pub fn apply(&self, v: &GaussianSeries<T>, t: &Truncation) -> GaussianSeries<T> {
        match self {
            Nonlinearity::Linear => GaussianSeries::zero(),
            Nonlinearity::CaseA => {
                let vz = v.diff_zeta();
                let advect = v.mul(&vz, t);
                let diffuse = theta::<T>().mul(&vz.diff_zeta(), t).scale(&T::from_int(2));
                diffuse.sub(&advect)
            }
            Nonlinearity::CaseB => {
                let advect = v.mul(&v.diff_zeta(), t);
                -&theta::<T>().mul(&advect, t)
            }
            Nonlinearity::Custom(f) => f(v, t),
        }
    }
}

/// `∂v/∂τ' = S₁v + f(v, θ)`, `∂θ/∂τ' = cθ`.
#[derive(Clone, Debug)]
pub struct SystemDef<T> {
    pub nonlinearity: Nonlinearity<T>,
    pub theta_rate: T,
    /// When false θ is frozen at zero and all θ-terms are discarded.
    pub theta_active: bool,
}

impl<T: Scalar> SystemDef<T> {
    pub fn new(nonlinearity: Nonlinearity<T>, theta_rate: T, theta_active: bool) -> Self {
        SystemDef { nonlinearity, theta_rate, theta_active }
    }

    pub fn case_a1() -> Self {
        Self::new(Nonlinearity::CaseA, T::zero(), false)
    }

    pub fn case_a2() -> Self {
        Self::new(Nonlinearity::CaseA, T::zero(), true)
    }

    /// With θ frozen the case-B nonlinearity vanishes identically.
    pub fn case_b1() -> Self {
        Self::new(Nonlinearity::CaseB, T::zero(), false)
    }

    pub fn case_b2() -> Self {
        Self::new(Nonlinearity::CaseB, T::zero(), true)
    }

    fn effective(&self, t: &Truncation) -> Truncation {
        if self.theta_active {
            *t
        } else {
            Truncation { theta_order: 1, ..*t }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReducerConfig {
    /// Orders of the reported manifold.
    pub truncation: Truncation,
    /// ζ order at which the residual is required to vanish.
    pub working_zeta_order: u32,
    /// Extra ζ degrees carried by intermediate products and by `v`.
    pub guard: u32,
    pub max_iter: usize,
    pub moment_rule: MomentRule,
    /// Residual coefficients at or below this magnitude count as zero.
    /// Zero means exact emptiness, the right choice for exact scalars.
    pub residual_tolerance: f64,
    pub record_linv_inputs: bool,
}

impl ReducerConfig {
    pub fn new(theta_order: u32) -> Result<Self> {
        Ok(ReducerConfig {
            truncation: Truncation::new(8, 6, theta_order)?,
            working_zeta_order: 16,
            guard: 4,
            max_iter: 20,
            moment_rule: MomentRule::Listing,
            residual_tolerance: 0.0,
            record_linv_inputs: false,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iter == 0 {
            return Err(Error::InvalidParameter("max_iter must be >= 1".into()));
        }
        if self.working_zeta_order < self.truncation.zeta_order {
            return Err(Error::InvalidTruncation(format!(
                "working zeta order {} is below the reported order {}",
                self.working_zeta_order, self.truncation.zeta_order
            )));
        }
        if !(self.residual_tolerance >= 0.0) {
            return Err(Error::InvalidParameter("residual tolerance must be >= 0".into()));
        }
        Ok(())
    }

    pub fn working(&self) -> Truncation {
        self.truncation.with_zeta_order(self.working_zeta_order)
    }

    pub fn guarded(&self) -> Truncation {
        self.truncation.with_zeta_order(self.working_zeta_order + self.guard)
    }
}

#[derive(Clone, Debug)]
pub struct ReductionResult<T> {
    /// The manifold at the guarded ζ depth; see [`ReductionResult::reported`].
    pub manifold: GaussianSeries<T>,
    pub amplitude_law: AmplitudePoly<T>,
    pub truncation: Truncation,
    pub iterations: usize,
    pub residual_zero: bool,
    /// `project_amplitude(v) − A` after each iteration.
    pub amplitude_defects: Vec<AmplitudePoly<T>>,
    /// Right-hand sides handed to the inverse, when recording is enabled.
    pub linv_inputs: Vec<GaussianSeries<T>>,
}

impl<T: Scalar> ReductionResult<T> {
    /// The manifold truncated to the reported orders.
    pub fn reported(&self) -> GaussianSeries<T> {
        self.manifold.truncate(&self.truncation)
    }

    pub fn amplitude_condition_held(&self) -> bool {
        self.amplitude_defects.iter().all(AmplitudePoly::is_zero)
    }
}

/// `v_A h + cθ v_θ − S₁v − f(v, θ)`.
pub fn residual<T: Scalar>(
    sys: &SystemDef<T>,
    v: &GaussianSeries<T>,
    h: &AmplitudePoly<T>,
    t: &Truncation,
) -> GaussianSeries<T> {
    let t = sys.effective(t);
    let mut dvdt = v.diff_amp().mul(&h.as_series(), &t);
    if !sys.theta_rate.is_zero() {
        dvdt = dvdt.add(&v.diff_theta().times_theta().scale(&sys.theta_rate));
    }
    let lin = apply_s(&OperatorSigma::critical(), v, &t);
    let f = sys.nonlinearity.apply(v, &t);
    dvdt.sub(&lin).sub(&f).truncate(&t)
}

/// Returns `(h', r + h'G)` with `h' = −(1/√π)∫ r G dζ`, so the second part
/// has no component along the critical mode.
pub fn solvability_split_with<T: RadicalScalar>(
    rule: MomentRule,
    r: &GaussianSeries<T>,
) -> (AmplitudePoly<T>, GaussianSeries<T>) {
    let gh = project_amplitude_with(rule, r).scale(&-T::one());
    let range = r.add(&gh.times_gauss());
    (gh, range)
}

pub fn solvability_split<T: RadicalScalar>(
    r: &GaussianSeries<T>,
) -> (AmplitudePoly<T>, GaussianSeries<T>) {
    solvability_split_with(MomentRule::Exact, r)
}

fn is_negligible<T: Scalar>(s: &GaussianSeries<T>, tol: f64) -> bool {
    if tol == 0.0 {
        s.is_empty()
    } else {
        s.iter().all(|(_, c)| c.to_f64().abs() <= tol)
    }
}

pub fn reduce<T: RadicalScalar>(sys: &SystemDef<T>, cfg: &ReducerConfig) -> Result<ReductionResult<T>> {
    cfg.validate()?;
    let working = sys.effective(&cfg.working());
    let guarded = sys.effective(&cfg.guarded());
    let reported = sys.effective(&cfg.truncation);
    let amp_key = AmplitudePoly::monomial(AmpKey::new(1, 0), T::one());

    let mut v: GaussianSeries<T> = GaussianSeries::amplitude_mode();
    let mut h: AmplitudePoly<T> = AmplitudePoly::zero();
    let mut defects = Vec::new();
    let mut inputs = Vec::new();
    let mut last = GaussianSeries::zero();

    for iteration in 0..cfg.max_iter {
        let eqn = residual(sys, &v, &h, &guarded).truncate(&working);
        if is_negligible(&eqn, cfg.residual_tolerance) {
            return Ok(ReductionResult {
                manifold: v,
                amplitude_law: h,
                truncation: reported,
                iterations: iteration,
                residual_zero: eqn.is_empty(),
                amplitude_defects: defects,
                linv_inputs: inputs,
            });
        }
        let (gh, rhs) = solvability_split_with(cfg.moment_rule, &eqn);
        let vd = linv(&rhs, &guarded)?;
        if cfg.record_linv_inputs {
            inputs.push(rhs);
        }
        let kernel = project_amplitude_with(cfg.moment_rule, &vd);
        v = v.add(&vd).sub(&kernel.times_gauss()).truncate(&guarded);
        h = h.add(&gh);
        let defect = project_amplitude_with(cfg.moment_rule, &v);
        defects.push(defect.add(&amp_key.scale(&-T::one())));
        last = eqn;
    }

    let sample = last
        .iter()
        .next()
        .map(|(k, c)| format!("{:?} * G^{} zeta^{} A^{} theta^{}", c, k.gauss, k.zeta, k.amp, k.theta))
        .unwrap_or_default();
    Err(Error::NotConverged { iterations: cfg.max_iter, surviving: last.len(), sample })
}
