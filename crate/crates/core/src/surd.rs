//! Exact arithmetic in the multi-quadratic field Q(√2, √3, √5, ...).
//!
//! A [`Surd`] is a finite sum `Σ q_r · √r` over distinct square-free
//! radicands `r`. Square roots of distinct square-free integers are linearly
//! independent over Q, so the representation is canonical and equality is
//! structural.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::scalar::{RadicalScalar, Scalar};

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Surd {
    parts: BTreeMap<u64, BigRational>,
}

/// Splits `n > 0` as `s² · f` with `f` square-free; returns `(s, f)`.
fn square_free_split(mut n: u64) -> (u64, u64) {
    assert!(n > 0, "radicand must be positive");
    let mut outside = 1u64;
    let mut inside = 1u64;
    let mut p = 2u64;
    while p * p <= n {
        let mut e = 0;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        outside *= p.pow(e / 2);
        if e % 2 == 1 {
            inside *= p;
        }
        p += 1;
    }
    (outside, inside * n)
}

impl Surd {
    pub fn rational(r: BigRational) -> Self {
        let mut parts = BTreeMap::new();
        if !r.is_zero() {
            parts.insert(1, r);
        }
        Surd { parts }
    }

    /// `coeff · √radicand`, with the radicand reduced to square-free form.
    pub fn with_radical(coeff: BigRational, radicand: u64) -> Self {
        if coeff.is_zero() {
            return Surd::zero();
        }
        let (s, f) = square_free_split(radicand);
        let mut parts = BTreeMap::new();
        parts.insert(f, coeff * BigRational::from_integer(BigInt::from(s)));
        Surd { parts }
    }

    /// `(radicand, coefficient)` pairs in ascending radicand order.
    pub fn parts(&self) -> impl Iterator<Item = (u64, &BigRational)> {
        self.parts.iter().map(|(r, q)| (*r, q))
    }

    pub fn from_parts<I: IntoIterator<Item = (u64, BigRational)>>(parts: I) -> Self {
        parts
            .into_iter()
            .map(|(r, q)| Surd::with_radical(q, r))
            .fold(Surd::zero(), |acc, s| acc + s)
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        match self.parts.len() {
            0 => Some(BigRational::zero()),
            1 => self.parts.get(&1).cloned(),
            _ => None,
        }
    }

    pub fn is_rational(&self) -> bool {
        self.parts.keys().all(|&r| r == 1)
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        if r.is_zero() {
            return Surd::zero();
        }
        Surd {
            parts: self
                .parts
                .iter()
                .map(|(k, q)| (*k, q * r))
                .collect(),
        }
    }

    fn accumulate(&mut self, radicand: u64, q: BigRational) {
        if q.is_zero() {
            return;
        }
        let slot = self.parts.entry(radicand).or_insert_with(BigRational::zero);
        *slot += q;
        if slot.is_zero() {
            self.parts.remove(&radicand);
        }
    }
}

impl Zero for Surd {
    fn zero() -> Self {
        Surd::default()
    }

    fn is_zero(&self) -> bool {
        self.parts.is_empty()
    }
}

impl One for Surd {
    fn one() -> Self {
        Surd::rational(BigRational::one())
    }
}

impl Add for Surd {
    type Output = Surd;

    fn add(mut self, rhs: Surd) -> Surd {
        for (r, q) in rhs.parts {
            self.accumulate(r, q);
        }
        self
    }
}

impl Sub for Surd {
    type Output = Surd;

    fn sub(self, rhs: Surd) -> Surd {
        self + (-rhs)
    }
}

impl Neg for Surd {
    type Output = Surd;

    fn neg(self) -> Surd {
        Surd {
            parts: self.parts.into_iter().map(|(r, q)| (r, -q)).collect(),
        }
    }
}

impl Mul for Surd {
    type Output = Surd;

    fn mul(self, rhs: Surd) -> Surd {
        let mut out = Surd::zero();
        for (&a, x) in &self.parts {
            for (&b, y) in &rhs.parts {
                // √a·√b = g·√((a/g)(b/g)) for square-free a, b with g = gcd(a, b)
                let g = a.gcd(&b);
                let radicand = (a / g)
                    .checked_mul(b / g)
                    .expect("radicand overflow in surd product");
                out.accumulate(radicand, x * y * BigRational::from_integer(BigInt::from(g)));
            }
        }
        out
    }
}

impl Scalar for Surd {
    fn from_rational(r: &BigRational) -> Self {
        Surd::rational(r.clone())
    }

    fn to_f64(&self) -> f64 {
        self.parts
            .iter()
            .map(|(r, q)| ToPrimitive::to_f64(q).unwrap_or(f64::NAN) * (*r as f64).sqrt())
            .sum()
    }
}

impl RadicalScalar for Surd {
    fn sqrt_ratio(num: u64, den: u64) -> Self {
        assert!(den > 0, "zero denominator under square root");
        // √(n/d) = √(n·d) / d
        let coeff = BigRational::new(BigInt::one(), BigInt::from(den));
        Surd::with_radical(coeff, num * den)
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return write!(f, "0");
        }
        for (i, (r, q)) in self.parts.iter().enumerate() {
            let (sign, mag) = if q.is_negative() { ("-", -q.clone()) } else { ("+", q.clone()) };
            if i == 0 {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            if *r == 1 {
                write!(f, "{mag}")?;
            } else {
                write!(f, "{mag}*sqrt({r})")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn square_free_split_examples() {
        assert_eq!(square_free_split(1), (1, 1));
        assert_eq!(square_free_split(8), (2, 2));
        assert_eq!(square_free_split(72), (6, 2));
        assert_eq!(square_free_split(30), (1, 30));
    }

    #[test]
    fn sqrt_products_reduce() {
        let s2 = Surd::sqrt_ratio(2, 1);
        let s6 = Surd::sqrt_ratio(6, 1);
        let s3 = Surd::sqrt_ratio(3, 1);
        assert_eq!(s2.clone() * s2.clone(), Surd::from_int(2));
        assert_eq!(s2 * s3, s6);
    }

    #[test]
    fn sqrt_of_fraction() {
        // √(1/2) = √2 / 2
        let h = Surd::sqrt_ratio(1, 2);
        assert_eq!(h, Surd::with_radical(q(1, 2), 2));
        assert!((h.to_f64() - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn cancellation_leaves_canonical_zero() {
        let a = Surd::with_radical(q(3, 4), 5) + Surd::from_int(1);
        let b = a.clone() - a;
        assert!(b.is_zero());
        assert_eq!(b, Surd::zero());
    }
}
