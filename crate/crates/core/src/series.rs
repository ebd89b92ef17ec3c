//! Finite Gaussian series `Σ c · ζⁿ · Gᵏ · Aᵖ · θ^q` with `G = exp(-ζ²/2)`.
//!
//! Series are kept in canonical form: keys are unique and no stored
//! coefficient is zero. Keys order by Gaussian power, then amplitude power,
//! then θ power, then ζ power, which fixes the serialization order.

use std::collections::BTreeMap;
use std::ops::{Add, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TermKey {
    /// Power of `G = exp(-ζ²/2)`.
    pub gauss: u32,
    /// Power of the amplitude `A`.
    pub amp: u32,
    /// Power of `θ`.
    pub theta: u32,
    /// Power of `ζ`.
    pub zeta: u32,
}

impl TermKey {
    pub const fn new(gauss: u32, zeta: u32, amp: u32, theta: u32) -> Self {
        TermKey { gauss, amp, theta, zeta }
    }

    fn times(self, other: TermKey) -> TermKey {
        TermKey {
            gauss: self.gauss + other.gauss,
            amp: self.amp + other.amp,
            theta: self.theta + other.theta,
            zeta: self.zeta + other.zeta,
        }
    }
}

/// Orders beyond which terms are discarded: `ζⁿ` with `n ≥ zeta_order`,
/// `Aᵖ` with `p ≥ amp_order`, `θ^q` with `q ≥ theta_order`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Truncation {
    pub zeta_order: u32,
    pub amp_order: u32,
    pub theta_order: u32,
}

impl Truncation {
    pub fn new(zeta_order: u32, amp_order: u32, theta_order: u32) -> Result<Self> {
        if zeta_order == 0 || amp_order == 0 || theta_order == 0 {
            return Err(Error::InvalidTruncation(format!(
                "orders must be >= 1 (zeta {zeta_order}, amp {amp_order}, theta {theta_order})"
            )));
        }
        Ok(Truncation { zeta_order, amp_order, theta_order })
    }

    pub fn admits(&self, key: &TermKey) -> bool {
        key.zeta < self.zeta_order && key.amp < self.amp_order && key.theta < self.theta_order
    }

    pub fn with_zeta_order(self, zeta_order: u32) -> Self {
        Truncation { zeta_order, ..self }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GaussianSeries<T> {
    terms: BTreeMap<TermKey, T>,
}

impl<T> Default for GaussianSeries<T> {
    fn default() -> Self {
        GaussianSeries { terms: BTreeMap::new() }
    }
}

impl<T: Scalar> GaussianSeries<T> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn monomial(key: TermKey, coeff: T) -> Self {
        let mut s = Self::zero();
        s.accumulate(key, coeff);
        s
    }

    /// The critical mode `A·G`.
    pub fn amplitude_mode() -> Self {
        Self::monomial(TermKey::new(1, 0, 1, 0), T::one())
    }

    pub fn from_terms<I: IntoIterator<Item = (TermKey, T)>>(terms: I) -> Self {
        let mut s = Self::zero();
        for (k, c) in terms {
            s.accumulate(k, c);
        }
        s
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&TermKey, &T)> {
        self.terms.iter()
    }

    pub fn keys(&self) -> impl Iterator<Item = &TermKey> {
        self.terms.keys()
    }

    pub fn coeff(&self, key: &TermKey) -> T {
        self.terms.get(key).cloned().unwrap_or_else(T::zero)
    }

    /// Adds `coeff` to the term at `key`, dropping it if the sum vanishes.
    pub fn accumulate(&mut self, key: TermKey, coeff: T) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.remove(&key) {
            Some(existing) => {
                let sum = existing + coeff;
                if !sum.is_zero() {
                    self.terms.insert(key, sum);
                }
            }
            None => {
                self.terms.insert(key, coeff);
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.accumulate(*k, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.accumulate(*k, -c.clone());
        }
        out
    }

    pub fn scale(&self, c: &T) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self::from_terms(self.terms.iter().map(|(k, v)| (*k, v.clone() * c.clone())))
    }

    pub fn truncate(&self, t: &Truncation) -> Self {
        GaussianSeries {
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| t.admits(k))
                .map(|(k, v)| (*k, v.clone()))
                .collect(),
        }
    }

    /// Distributed product; Gaussian powers add (`Gᵏ·Gˡ = Gᵏ⁺ˡ`).
    pub fn mul(&self, other: &Self, t: &Truncation) -> Self {
        let mut out = Self::zero();
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                let key = ka.times(*kb);
                if t.admits(&key) {
                    out.accumulate(key, ca.clone() * cb.clone());
                }
            }
        }
        out
    }

    /// `d/dζ [ζⁿ Gᵏ] = n ζⁿ⁻¹ Gᵏ − k ζⁿ⁺¹ Gᵏ`; raises ζ-degree by one.
    pub fn diff_zeta(&self) -> Self {
        let mut out = Self::zero();
        for (k, c) in &self.terms {
            if k.zeta > 0 {
                out.accumulate(
                    TermKey { zeta: k.zeta - 1, ..*k },
                    c.clone() * T::from_int(k.zeta as i64),
                );
            }
            if k.gauss > 0 {
                out.accumulate(
                    TermKey { zeta: k.zeta + 1, ..*k },
                    -(c.clone() * T::from_int(k.gauss as i64)),
                );
            }
        }
        out
    }

    pub fn diff_amp(&self) -> Self {
        Self::from_terms(self.terms.iter().filter(|(k, _)| k.amp > 0).map(|(k, c)| {
            (TermKey { amp: k.amp - 1, ..*k }, c.clone() * T::from_int(k.amp as i64))
        }))
    }

    pub fn diff_theta(&self) -> Self {
        Self::from_terms(self.terms.iter().filter(|(k, _)| k.theta > 0).map(|(k, c)| {
            (TermKey { theta: k.theta - 1, ..*k }, c.clone() * T::from_int(k.theta as i64))
        }))
    }

    /// Multiplies every term by `ζ`.
    pub fn times_zeta(&self) -> Self {
        GaussianSeries {
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (TermKey { zeta: k.zeta + 1, ..*k }, c.clone()))
                .collect(),
        }
    }

    /// Multiplies every term by `θ`.
    pub fn times_theta(&self) -> Self {
        GaussianSeries {
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (TermKey { theta: k.theta + 1, ..*k }, c.clone()))
                .collect(),
        }
    }

    pub fn evaluate(&self, zeta: f64, amp: f64, theta: f64) -> f64 {
        let g = (-zeta * zeta / 2.0).exp();
        self.terms
            .iter()
            .map(|(k, c)| {
                c.to_f64()
                    * zeta.powi(k.zeta as i32)
                    * g.powi(k.gauss as i32)
                    * amp.powi(k.amp as i32)
                    * theta.powi(k.theta as i32)
            })
            .sum()
    }

    pub fn max_zeta_power(&self) -> Option<u32> {
        self.terms.keys().map(|k| k.zeta).max()
    }

    pub fn map_coeffs<U: Scalar>(&self, f: impl Fn(&T) -> U) -> GaussianSeries<U> {
        GaussianSeries::from_terms(self.terms.iter().map(|(k, c)| (*k, f(c))))
    }

    pub fn to_f64(&self) -> GaussianSeries<f64> {
        self.map_coeffs(|c| c.to_f64())
    }
}

impl<T: Scalar> Add for &GaussianSeries<T> {
    type Output = GaussianSeries<T>;

    fn add(self, rhs: &GaussianSeries<T>) -> GaussianSeries<T> {
        GaussianSeries::add(self, rhs)
    }
}

impl<T: Scalar> Sub for &GaussianSeries<T> {
    type Output = GaussianSeries<T>;

    fn sub(self, rhs: &GaussianSeries<T>) -> GaussianSeries<T> {
        GaussianSeries::sub(self, rhs)
    }
}

impl<T: Scalar> Neg for &GaussianSeries<T> {
    type Output = GaussianSeries<T>;

    fn neg(self) -> GaussianSeries<T> {
        self.scale(&-T::one())
    }
}

/// Key of an [`AmplitudePoly`] term: powers of `A` and `θ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct AmpKey {
    pub amp: u32,
    pub theta: u32,
}

impl AmpKey {
    pub const fn new(amp: u32, theta: u32) -> Self {
        AmpKey { amp, theta }
    }
}

/// Polynomial in `(A, θ)`; the shape of amplitude laws and projections.
#[derive(Clone, Debug, PartialEq)]
pub struct AmplitudePoly<T> {
    terms: BTreeMap<AmpKey, T>,
}

impl<T> Default for AmplitudePoly<T> {
    fn default() -> Self {
        AmplitudePoly { terms: BTreeMap::new() }
    }
}

impl<T: Scalar> AmplitudePoly<T> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn monomial(key: AmpKey, coeff: T) -> Self {
        let mut p = Self::zero();
        p.accumulate(key, coeff);
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (AmpKey, T)>>(terms: I) -> Self {
        let mut p = Self::zero();
        for (k, c) in terms {
            p.accumulate(k, c);
        }
        p
    }

    pub fn accumulate(&mut self, key: AmpKey, coeff: T) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.remove(&key) {
            Some(existing) => {
                let sum = existing + coeff;
                if !sum.is_zero() {
                    self.terms.insert(key, sum);
                }
            }
            None => {
                self.terms.insert(key, coeff);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, amp: u32, theta: u32) -> T {
        self.terms.get(&AmpKey::new(amp, theta)).cloned().unwrap_or_else(T::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&AmpKey, &T)> {
        self.terms.iter()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.accumulate(*k, c.clone());
        }
        out
    }

    pub fn scale(&self, c: &T) -> Self {
        Self::from_terms(self.terms.iter().map(|(k, v)| (*k, v.clone() * c.clone())))
    }

    /// The series `Σ c_pq Aᵖ θ^q · G`.
    pub fn times_gauss(&self) -> GaussianSeries<T> {
        GaussianSeries::from_terms(
            self.terms
                .iter()
                .map(|(k, c)| (TermKey::new(1, 0, k.amp, k.theta), c.clone())),
        )
    }

    /// The series `Σ c_pq Aᵖ θ^q` with no ζ or Gaussian factor.
    pub fn as_series(&self) -> GaussianSeries<T> {
        GaussianSeries::from_terms(
            self.terms
                .iter()
                .map(|(k, c)| (TermKey::new(0, 0, k.amp, k.theta), c.clone())),
        )
    }

    pub fn evaluate(&self, amp: f64, theta: f64) -> f64 {
        self.terms
            .iter()
            .map(|(k, c)| c.to_f64() * amp.powi(k.amp as i32) * theta.powi(k.theta as i32))
            .sum()
    }

    pub fn map_coeffs<U: Scalar>(&self, f: impl Fn(&T) -> U) -> AmplitudePoly<U> {
        AmplitudePoly::from_terms(self.terms.iter().map(|(k, c)| (*k, f(c))))
    }

    pub fn to_f64(&self) -> AmplitudePoly<f64> {
        self.map_coeffs(|c| c.to_f64())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    type Q = BigRational;

    fn q(n: i64, d: i64) -> Q {
        Q::new(n.into(), d.into())
    }

    fn wide() -> Truncation {
        Truncation::new(64, 64, 64).unwrap()
    }

    #[test]
    fn add_identity_and_merge() {
        let ag: GaussianSeries<Q> = GaussianSeries::amplitude_mode();
        assert_eq!(ag.add(&GaussianSeries::zero()), ag);

        let half = GaussianSeries::monomial(TermKey::new(1, 2, 0, 0), q(1, 2));
        let sum = half.add(&half);
        assert_eq!(sum, GaussianSeries::monomial(TermKey::new(1, 2, 0, 0), q(1, 1)));
    }

    #[test]
    fn opposite_terms_cancel() {
        let a = GaussianSeries::monomial(TermKey::new(2, 3, 1, 0), q(5, 7));
        let b = GaussianSeries::monomial(TermKey::new(2, 3, 1, 0), q(-5, 7));
        assert!(a.add(&b).is_empty());
    }

    #[test]
    fn gaussian_powers_add_under_product() {
        let g = GaussianSeries::monomial(TermKey::new(1, 0, 0, 0), q(1, 1));
        assert_eq!(g.mul(&g, &wide()), GaussianSeries::monomial(TermKey::new(2, 0, 0, 0), q(1, 1)));

        let ag: GaussianSeries<Q> = GaussianSeries::amplitude_mode();
        assert_eq!(
            ag.mul(&ag, &wide()),
            GaussianSeries::monomial(TermKey::new(2, 0, 2, 0), q(1, 1))
        );
    }

    #[test]
    fn product_respects_zeta_truncation() {
        let a = GaussianSeries::monomial(TermKey::new(1, 1, 0, 0), q(1, 1));
        let b = GaussianSeries::monomial(TermKey::new(1, 7, 0, 0), q(1, 1));
        let t = Truncation::new(8, 6, 1).unwrap();
        assert!(a.mul(&b, &t).is_empty());
    }

    #[test]
    fn derivative_rules() {
        let g = GaussianSeries::monomial(TermKey::new(1, 0, 0, 0), q(1, 1));
        assert_eq!(g.diff_zeta(), GaussianSeries::monomial(TermKey::new(1, 1, 0, 0), q(-1, 1)));

        let zg = GaussianSeries::monomial(TermKey::new(1, 1, 0, 0), q(1, 1));
        let expected = GaussianSeries::from_terms([
            (TermKey::new(1, 0, 0, 0), q(1, 1)),
            (TermKey::new(1, 2, 0, 0), q(-1, 1)),
        ]);
        assert_eq!(zg.diff_zeta(), expected);

        let c = GaussianSeries::monomial(TermKey::new(0, 0, 1, 0), q(3, 1));
        assert!(c.diff_zeta().is_empty());
    }

    #[test]
    fn evaluate_basics() {
        let ag: GaussianSeries<f64> = GaussianSeries::amplitude_mode();
        assert_eq!(ag.evaluate(0.0, 1.0, 0.0), 1.0);
        assert_eq!(ag.evaluate(0.0, 0.3, 0.0), 0.3);
    }

    #[test]
    fn zero_orders_rejected() {
        assert!(Truncation::new(0, 6, 1).is_err());
        assert!(Truncation::new(8, 0, 1).is_err());
        assert!(Truncation::new(8, 6, 0).is_err());
    }

    #[test]
    fn key_order_is_gauss_amp_theta_zeta() {
        let mut keys = vec![
            TermKey::new(2, 0, 1, 0),
            TermKey::new(1, 5, 1, 0),
            TermKey::new(1, 0, 3, 0),
            TermKey::new(1, 2, 1, 1),
        ];
        keys.sort();
        assert_eq!(
            keys,
            vec![
                TermKey::new(1, 5, 1, 0),
                TermKey::new(1, 2, 1, 1),
                TermKey::new(1, 0, 3, 0),
                TermKey::new(2, 0, 1, 0),
            ]
        );
    }
}
