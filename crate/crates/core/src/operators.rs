//! The linear operator `S_σ = ∂²/∂ζ² + ζ ∂/∂ζ + σ`, its Hermite spectrum,
//! its inverse on the range (σ = 1), and Gaussian-weighted integrals.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{RadicalScalar, Scalar};
use crate::series::{AmpKey, AmplitudePoly, GaussianSeries, TermKey, Truncation};

/// `S_σ` for a given σ.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorSigma<T> {
    pub sigma: T,
}

impl<T: Scalar> OperatorSigma<T> {
    pub fn new(sigma: T) -> Self {
        OperatorSigma { sigma }
    }

    /// σ = 1, the only value with a centre manifold.
    pub fn critical() -> Self {
        OperatorSigma { sigma: T::one() }
    }

    pub fn is_critical(&self) -> bool {
        self.sigma == T::one()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumEntry<T> {
    pub mode_index: u32,
    pub eigenvalue: T,
}

/// `λ_l = σ − 1 − l` for `l = 0..=l_max`.
pub fn spectrum<T: Scalar>(op: &OperatorSigma<T>, l_max: u32) -> Vec<SpectrumEntry<T>> {
    (0..=l_max)
        .map(|l| SpectrumEntry {
            mode_index: l,
            eigenvalue: op.sigma.clone() - T::one() - T::from_int(l as i64),
        })
        .collect()
}

pub fn apply_s<T: Scalar>(
    op: &OperatorSigma<T>,
    v: &GaussianSeries<T>,
    t: &Truncation,
) -> GaussianSeries<T> {
    let vz = v.diff_zeta();
    let vzz = vz.diff_zeta();
    vzz.add(&vz.times_zeta()).add(&v.scale(&op.sigma)).truncate(t)
}

/// `He_l(ζ)·G` with probabilists' Hermite polynomials (`He_{l+1} = ζ He_l − l He_{l−1}`).
pub fn hermite_mode<T: Scalar>(l: u32) -> GaussianSeries<T> {
    let mut prev: Vec<BigInt> = vec![BigInt::one()];
    let mut cur: Vec<BigInt> = vec![BigInt::zero(), BigInt::one()];
    if l == 0 {
        cur = prev.clone();
    } else {
        for n in 1..l {
            let mut next = vec![BigInt::zero(); cur.len() + 1];
            for (i, c) in cur.iter().enumerate() {
                next[i + 1] += c;
            }
            for (i, c) in prev.iter().enumerate() {
                next[i] -= c * BigInt::from(n);
            }
            prev = std::mem::replace(&mut cur, next);
        }
    }
    GaussianSeries::from_terms(cur.into_iter().enumerate().map(|(n, c)| {
        (
            TermKey::new(1, n as u32, 0, 0),
            T::from_rational(&BigRational::from_integer(c)),
        )
    }))
}

const INVERSE_RECURSION_CAP: u32 = 4096;

/// Per-call table of `S₁⁻¹(ζᵃ Gᵇ)` under a ζ-truncation depth.
struct InverseTable {
    depth: u32,
    memo: HashMap<(u32, u32), Vec<(u32, BigRational)>>,
}

impl InverseTable {
    fn new(depth: u32) -> Self {
        InverseTable { depth, memo: HashMap::new() }
    }

    /// Terms `(ζ power, coefficient)` of `S₁⁻¹(ζᵃ Gᵇ)`, all carrying `Gᵇ`.
    ///
    /// Odd powers against a single Gaussian recurse downwards to the H₁ mode
    /// and give a finite polynomial; everything else recurses upwards in ζ
    /// and stops at the truncation depth.
    fn term(&mut self, a: u32, b: u32, level: u32) -> Result<Vec<(u32, BigRational)>> {
        if a >= self.depth {
            return Ok(Vec::new());
        }
        if level > INVERSE_RECURSION_CAP {
            return Err(Error::InverseDiverged { gauss: b, zeta: a });
        }
        if let Some(hit) = self.memo.get(&(a, b)) {
            return Ok(hit.clone());
        }
        let int = |n: i64| BigRational::from_integer(BigInt::from(n));
        let mut acc: HashMap<u32, BigRational> = HashMap::new();
        let put = |acc: &mut HashMap<u32, BigRational>, n: u32, c: BigRational| {
            let slot = acc.entry(n).or_insert_with(BigRational::zero);
            *slot += c;
        };

        if b == 1 && a % 2 == 1 {
            if a == 1 {
                put(&mut acc, 1, int(-1));
            } else {
                // S(ζᵃG) = a(a−1)ζᵃ⁻²G − aζᵃG
                let ai = a as i64;
                put(&mut acc, a, int(1));
                for (n, c) in self.term(a - 2, 1, level + 1)? {
                    put(&mut acc, n, -(c * int(ai * ai - ai)));
                }
                let denom = int(-ai);
                acc.values_mut().for_each(|c| *c /= denom.clone());
            }
        } else {
            // S(ζᵃ⁺²Gᵇ) = (a+2)(a+1)ζᵃGᵇ + (3+a−5b−2ab)ζᵃ⁺²Gᵇ + b(b−1)ζᵃ⁺⁴Gᵇ
            let (ai, bi) = (a as i64, b as i64);
            if a + 2 < self.depth {
                put(&mut acc, a + 2, int(1));
            }
            let mid = 3 + ai - 5 * bi - 2 * ai * bi;
            if mid != 0 {
                for (n, c) in self.term(a + 2, b, level + 1)? {
                    put(&mut acc, n, -(c * int(mid)));
                }
            }
            let high = bi * (bi - 1);
            if high != 0 {
                for (n, c) in self.term(a + 4, b, level + 1)? {
                    put(&mut acc, n, -(c * int(high)));
                }
            }
            let denom = int((ai + 2) * (ai + 1));
            acc.values_mut().for_each(|c| *c /= denom.clone());
        }

        let mut terms: Vec<(u32, BigRational)> =
            acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_by_key(|(n, _)| *n);
        self.memo.insert((a, b), terms.clone());
        Ok(terms)
    }
}

/// Inverse of `S₁` on its range, term by term, truncated at `t.zeta_order`.
///
/// The result has no pure kernel component for even input; amplitude
/// normalisation is left to the caller.
pub fn linv<T: Scalar>(rhs: &GaussianSeries<T>, t: &Truncation) -> Result<GaussianSeries<T>> {
    let mut table = InverseTable::new(t.zeta_order);
    let mut out = GaussianSeries::zero();
    for (key, c) in rhs.iter() {
        for (n, q) in table.term(key.zeta, key.gauss, 0)? {
            out.accumulate(
                TermKey { zeta: n, ..*key },
                c.clone() * T::from_rational(&q),
            );
        }
    }
    Ok(out.truncate(t))
}

/// Same as [`linv`] but checks that `op` is critical.
pub fn linv_for<T: Scalar>(
    op: &OperatorSigma<T>,
    rhs: &GaussianSeries<T>,
    t: &Truncation,
) -> Result<GaussianSeries<T>> {
    if !op.is_critical() {
        return Err(Error::NotCritical(format!("{:?}", op.sigma)));
    }
    linv(rhs, t)
}

/// How `∫ ζⁿ Gᵏ · G dζ` is evaluated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentRule {
    /// Gaussian moment closed form `(n−1)!! √(2π/(k+1)) / (k+1)^(n/2)`.
    #[default]
    Exact,
    /// Reduction by `∫ζⁿGᵏ⁺¹ → (n−1)/(k+1) ∫ζⁿ⁻²Gᵏ⁺²`, raising the Gaussian
    /// power at each step. This is the rule the reference coefficients
    /// were generated with.
    Listing,
}

/// `∫ ζⁿ Gᵏ · G dζ / √π`, or `None` when it vanishes (odd `n`).
pub fn moment_over_sqrt_pi<T: RadicalScalar>(rule: MomentRule, gauss: u32, zeta: u32) -> Option<T> {
    if zeta % 2 == 1 {
        return None;
    }
    let m = (zeta / 2) as u64;
    let k1 = gauss as u64 + 1;
    match rule {
        MomentRule::Exact => {
            let mut num = BigInt::one();
            for j in 0..m {
                num *= BigInt::from(2 * m - 1 - 2 * j);
            }
            let den = BigInt::from(k1).pow(m as u32);
            let factor = BigRational::new(num, den);
            Some(T::from_rational(&factor) * T::sqrt_ratio(2, k1))
        }
        MomentRule::Listing => {
            let mut factor = BigRational::one();
            for j in 0..m {
                factor *= BigRational::new(
                    BigInt::from(2 * m - 1 - 2 * j),
                    BigInt::from(k1 + j),
                );
            }
            Some(T::from_rational(&factor) * T::sqrt_ratio(2, k1 + m))
        }
    }
}

/// `∫ v · G dζ` over the real line, stored in units of `√π`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedIntegral<T> {
    pub over_sqrt_pi: AmplitudePoly<T>,
}

impl<T: Scalar> WeightedIntegral<T> {
    pub fn evaluate(&self, amp: f64, theta: f64) -> f64 {
        std::f64::consts::PI.sqrt() * self.over_sqrt_pi.evaluate(amp, theta)
    }
}

pub fn weighted_integral_with<T: RadicalScalar>(
    rule: MomentRule,
    v: &GaussianSeries<T>,
) -> WeightedIntegral<T> {
    let mut poly = AmplitudePoly::zero();
    for (key, c) in v.iter() {
        if let Some(m) = moment_over_sqrt_pi::<T>(rule, key.gauss, key.zeta) {
            poly.accumulate(AmpKey::new(key.amp, key.theta), c.clone() * m);
        }
    }
    WeightedIntegral { over_sqrt_pi: poly }
}

/// Exact Gaussian-weighted integral.
pub fn weighted_integral<T: RadicalScalar>(v: &GaussianSeries<T>) -> WeightedIntegral<T> {
    weighted_integral_with(MomentRule::Exact, v)
}

/// `A = (1/√π) ∫ v G dζ` under the given moment rule.
pub fn project_amplitude_with<T: RadicalScalar>(
    rule: MomentRule,
    v: &GaussianSeries<T>,
) -> AmplitudePoly<T> {
    weighted_integral_with(rule, v).over_sqrt_pi
}

pub fn project_amplitude<T: RadicalScalar>(v: &GaussianSeries<T>) -> AmplitudePoly<T> {
    project_amplitude_with(MomentRule::Exact, v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surd::Surd;

    type Q = BigRational;

    fn q(n: i64, d: i64) -> Q {
        Q::new(n.into(), d.into())
    }

    fn key(k: u32, n: u32) -> TermKey {
        TermKey::new(k, n, 0, 0)
    }

    fn t(z: u32) -> Truncation {
        Truncation::new(z, 8, 3).unwrap()
    }

    #[test]
    fn kernel_and_first_modes() {
        let op = OperatorSigma::<Q>::critical();
        let g = GaussianSeries::monomial(key(1, 0), q(1, 1));
        assert!(apply_s(&op, &g, &t(16)).is_empty());

        let minus_zg = GaussianSeries::monomial(key(1, 1), q(-1, 1));
        assert_eq!(
            apply_s(&op, &minus_zg, &t(16)),
            GaussianSeries::monomial(key(1, 1), q(1, 1))
        );

        let h2 = GaussianSeries::from_terms([(key(1, 2), q(1, 1)), (key(1, 0), q(-1, 1))]);
        assert_eq!(apply_s(&op, &h2, &t(16)), h2.scale(&q(-2, 1)));
    }

    #[test]
    fn hermite_modes_low_order() {
        assert_eq!(hermite_mode::<Q>(0), GaussianSeries::monomial(key(1, 0), q(1, 1)));
        assert_eq!(hermite_mode::<Q>(1), GaussianSeries::monomial(key(1, 1), q(1, 1)));
        assert_eq!(
            hermite_mode::<Q>(2),
            GaussianSeries::from_terms([(key(1, 2), q(1, 1)), (key(1, 0), q(-1, 1))])
        );
        // He_3 = ζ³ − 3ζ
        assert_eq!(
            hermite_mode::<Q>(3),
            GaussianSeries::from_terms([(key(1, 3), q(1, 1)), (key(1, 1), q(-3, 1))])
        );
    }

    #[test]
    fn spectrum_values() {
        let ev: Vec<Q> = spectrum(&OperatorSigma::<Q>::critical(), 3)
            .into_iter()
            .map(|e| e.eigenvalue)
            .collect();
        assert_eq!(ev, vec![q(0, 1), q(-1, 1), q(-2, 1), q(-3, 1)]);
        let two = spectrum(&OperatorSigma::new(q(2, 1)), 0);
        assert_eq!(two[0].eigenvalue, q(1, 1));
    }

    #[test]
    fn inverse_of_h1_mode() {
        let zg = GaussianSeries::monomial(key(1, 1), q(1, 1));
        assert_eq!(linv(&zg, &t(8)).unwrap(), GaussianSeries::monomial(key(1, 1), q(-1, 1)));
    }

    #[test]
    fn inverse_of_gaussian_leading_terms() {
        let g = GaussianSeries::monomial(key(1, 0), q(1, 1));
        let w = linv(&g, &t(8)).unwrap();
        assert_eq!(w.coeff(&key(1, 2)), q(1, 2));
        assert_eq!(w.coeff(&key(1, 4)), q(1, 12));
        assert_eq!(w.coeff(&key(1, 6)), q(1, 90));
        assert_eq!(w.coeff(&key(1, 0)), q(0, 1));
    }

    #[test]
    fn inverse_of_odd_single_gaussian_is_finite() {
        // S(−ζ³/3·G − 2ζG) = ζ³G
        let z3 = GaussianSeries::monomial(key(1, 3), q(1, 1));
        let w = linv(&z3, &t(8)).unwrap();
        assert_eq!(
            w,
            GaussianSeries::from_terms([(key(1, 3), q(-1, 3)), (key(1, 1), q(-2, 1))])
        );
    }

    #[test]
    fn inverse_round_trip_on_mixed_rhs() {
        let op = OperatorSigma::<Q>::critical();
        let rhs = GaussianSeries::from_terms([
            (key(2, 1), q(-1, 1)),
            (key(3, 0), q(2, 5)),
            (key(3, 4), q(1, 7)),
            (TermKey::new(1, 2, 3, 0), q(3, 1)),
            (TermKey::new(1, 0, 3, 0), q(-3, 2)),
            (key(4, 3), q(1, 3)),
        ]);
        let depth = 12;
        let w = linv(&rhs, &t(depth + 4)).unwrap();
        let back = apply_s(&op, &w, &t(depth));
        assert!(back.sub(&rhs).truncate(&t(depth)).is_empty());
    }

    #[test]
    fn inverse_rejects_noncritical_sigma() {
        let op = OperatorSigma::new(q(1, 2));
        let g = GaussianSeries::monomial(key(1, 0), q(1, 1));
        assert!(matches!(linv_for(&op, &g, &t(8)), Err(Error::NotCritical(_))));
    }

    #[test]
    fn exact_weighted_integrals() {
        let one = |k, n| -> Surd {
            let s = GaussianSeries::monomial(key(k, n), Surd::from_int(1));
            weighted_integral(&s).over_sqrt_pi.coeff(0, 0)
        };
        assert_eq!(one(1, 0), Surd::from_int(1));
        assert_eq!(one(2, 1), Surd::zero());
        assert_eq!(one(1, 2), Surd::from_ratio(1, 2));
        // ∫ G³·G = √(π/2)
        assert_eq!(one(3, 0), Surd::sqrt_ratio(1, 2));
    }

    #[test]
    fn listing_rule_raises_gaussian_power() {
        // ∫ζ²G·G → (1/2) ∫G²·G = (1/2)√(2π/3)
        let m: Surd = moment_over_sqrt_pi(MomentRule::Listing, 1, 2).unwrap();
        assert_eq!(m, Surd::from_ratio(1, 2) * Surd::sqrt_ratio(2, 3));
        let m0: Surd = moment_over_sqrt_pi(MomentRule::Listing, 1, 0).unwrap();
        assert_eq!(m0, Surd::from_int(1));
    }

    #[test]
    fn projections() {
        let ag: GaussianSeries<Surd> = GaussianSeries::amplitude_mode();
        assert_eq!(
            project_amplitude(&ag),
            AmplitudePoly::monomial(AmpKey::new(1, 0), Surd::from_int(1))
        );
        let odd = GaussianSeries::monomial(key(2, 3), Surd::from_int(1));
        assert!(project_amplitude(&odd).is_zero());
        let z2 = GaussianSeries::monomial(key(1, 2), Surd::from_int(1));
        assert_eq!(project_amplitude(&z2).coeff(0, 0), Surd::from_ratio(1, 2));
    }
}
