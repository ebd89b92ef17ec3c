//! Centre-manifold models of the Burgers equation `u_t + u u_x = ½Δ(t) u_xx`
//! with diffusivity `Δ(t) = 2(γ + δ t^r)`.
//!
//! The symbolic side ([`series`], [`operators`], [`reducer`]) is generic over
//! the coefficient field; [`Surd`] gives exact results. The numerical side
//! ([`models`], [`pde`]) is generic over [`Real`].

pub mod diagnostics;
pub mod error;
pub mod models;
pub mod operators;
pub mod pde;
pub mod reducer;
pub mod reference;
pub mod report;
pub mod scalar;
pub mod series;
pub mod surd;

pub use error::{Error, Result};
pub use models::{configure, AmplitudeLawODE, AmplitudeTrace, CaseConfig, CaseTag};
pub use num_rational::BigRational;
pub use operators::MomentRule;
pub use reducer::{reduce, ReducerConfig, ReductionResult, SystemDef};
pub use scalar::{RadicalScalar, Real, Scalar};
pub use series::{AmpKey, AmplitudePoly, GaussianSeries, TermKey, Truncation};
pub use surd::Surd;

/// Series with exact coefficients in `Q(√2, √3, …)`.
pub type ExactSeries = GaussianSeries<Surd>;
pub type RationalSeries = GaussianSeries<BigRational>;
pub type FloatSeries = GaussianSeries<f64>;
pub type ExactLaw = AmplitudePoly<Surd>;
pub type FloatLaw = AmplitudePoly<f64>;
pub type ExactReduction = ReductionResult<Surd>;
pub type FloatReduction = ReductionResult<f64>;
