//! Rendering of reductions: 4-decimal text in the usual printed layout,
//! and exact JSON.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::models::{AmplitudeLawODE, CaseConfig};
use crate::reducer::ReductionResult;
use crate::scalar::{rational_from_f64, Scalar};
use crate::series::{AmpKey, AmplitudePoly, GaussianSeries, TermKey, Truncation};
use crate::surd::Surd;

const MINUS: char = '\u{2212}';

/// Rounds to 4 decimals, ties to even.
pub fn round4(x: f64) -> f64 {
    (x * 1e4).round_ties_even() / 1e4
}

/// `round4(x)` with ASCII sign, e.g. `-0.0022`.
pub fn fmt4(x: f64) -> String {
    let r = round4(x);
    if r == 0.0 {
        "0.0000".into()
    } else {
        format!("{r:.4}")
    }
}

fn magnitude4(x: f64) -> String {
    format!("{:.4}", round4(x).abs())
}

pub fn superscript(n: u32) -> String {
    const DIGITS: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];
    n.to_string().chars().map(|c| DIGITS[c.to_digit(10).unwrap() as usize]).collect()
}

fn power(symbol: &str, n: u32) -> String {
    match n {
        0 => String::new(),
        1 => symbol.to_string(),
        _ => format!("{symbol}{}", superscript(n)),
    }
}

/// Law in the printed layout, e.g. `−1.1835Aθ + A³(0.0641 − 0.1631θ)`.
///
/// Terms sharing a power of `A` are grouped; terms that round to zero are
/// dropped.
pub fn render_law<T: Scalar>(law: &AmplitudePoly<T>) -> String {
    let mut groups: Vec<(u32, Vec<(u32, f64)>)> = Vec::new();
    for (k, c) in law.iter() {
        let v = c.to_f64();
        if round4(v) == 0.0 {
            continue;
        }
        match groups.last_mut() {
            Some((p, terms)) if *p == k.amp => terms.push((k.theta, v)),
            _ => groups.push((k.amp, vec![(k.theta, v)])),
        }
    }
    if groups.is_empty() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, (p, terms)) in groups.iter().enumerate() {
        let negative = terms[0].1 < 0.0;
        let sign = if negative { -1.0 } else { 1.0 };
        match (i, negative) {
            (0, true) => out.push(MINUS),
            (0, false) => {}
            (_, true) => write!(out, " {MINUS} ").unwrap(),
            (_, false) => out.push_str(" + "),
        }
        if terms.len() == 1 {
            let (q, v) = terms[0];
            write!(out, "{}{}{}", magnitude4(v), power("A", *p), power("θ", q)).unwrap();
            continue;
        }
        write!(out, "{}(", power("A", *p)).unwrap();
        for (j, (q, v)) in terms.iter().enumerate() {
            let v = v * sign;
            if j > 0 {
                out.push_str(if v < 0.0 { " − " } else { " + " });
            } else if v < 0.0 {
                out.push(MINUS);
            }
            write!(out, "{}{}", magnitude4(v), power("θ", *q)).unwrap();
        }
        out.push(')');
    }
    out
}

/// One line per `Gᵏ Aᵖ θ^q` block, e.g. `G²A²: −0.1667ζ³ − 0.0833ζ⁵`.
pub fn render_manifold<T: Scalar>(v: &GaussianSeries<T>) -> Vec<String> {
    let mut lines: Vec<String> = Vec::new();
    let mut current: Option<(u32, u32, u32)> = None;
    for (k, c) in v.iter() {
        let x = c.to_f64();
        if round4(x) == 0.0 {
            continue;
        }
        let block = (k.gauss, k.amp, k.theta);
        if current != Some(block) {
            current = Some(block);
            lines.push(format!("{}{}{}:", power("G", k.gauss), power("A", k.amp), power("θ", k.theta)));
        }
        let line = lines.last_mut().expect("block header");
        let sign = if x < 0.0 { MINUS } else { '+' };
        write!(line, " {sign} {}{}", magnitude4(x), power("ζ", k.zeta)).unwrap();
    }
    lines
}

/// Exact decomposition of a coefficient into `q · √radicand` parts.
pub trait ExactParts {
    fn exact_parts(&self) -> Vec<(u64, BigRational)>;
}

impl ExactParts for Surd {
    fn exact_parts(&self) -> Vec<(u64, BigRational)> {
        self.parts().map(|(r, q)| (r, q.clone())).collect()
    }
}

impl ExactParts for BigRational {
    fn exact_parts(&self) -> Vec<(u64, BigRational)> {
        if self.is_zero() {
            vec![]
        } else {
            vec![(1, self.clone())]
        }
    }
}

impl ExactParts for f64 {
    fn exact_parts(&self) -> Vec<(u64, BigRational)> {
        rational_from_f64(*self).map(|q| q.exact_parts()).unwrap_or_default()
    }
}

impl ExactParts for f32 {
    fn exact_parts(&self) -> Vec<(u64, BigRational)> {
        (*self as f64).exact_parts()
    }
}

/// A series term, or one radical part of it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesEntry {
    pub k: u32,
    pub n: u32,
    pub p: u32,
    pub q: u32,
    pub numerator: String,
    pub denominator: String,
    pub radicand: u64,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LawEntry {
    pub p: u32,
    pub q: u32,
    pub numerator: String,
    pub denominator: String,
    pub radicand: u64,
    pub value: f64,
}

fn part_value(r: u64, q: &BigRational) -> f64 {
    ToPrimitive::to_f64(q).unwrap_or(f64::NAN) * (r as f64).sqrt()
}

pub fn series_entries<T: Scalar + ExactParts>(v: &GaussianSeries<T>) -> Vec<SeriesEntry> {
    v.iter()
        .flat_map(|(key, c)| {
            c.exact_parts().into_iter().map(move |(r, q)| SeriesEntry {
                k: key.gauss,
                n: key.zeta,
                p: key.amp,
                q: key.theta,
                numerator: q.numer().to_string(),
                denominator: q.denom().to_string(),
                radicand: r,
                value: part_value(r, &q),
            })
        })
        .collect()
}

pub fn law_entries<T: Scalar + ExactParts>(law: &AmplitudePoly<T>) -> Vec<LawEntry> {
    law.iter()
        .flat_map(|(key, c)| {
            c.exact_parts().into_iter().map(move |(r, q)| LawEntry {
                p: key.amp,
                q: key.theta,
                numerator: q.numer().to_string(),
                denominator: q.denom().to_string(),
                radicand: r,
                value: part_value(r, &q),
            })
        })
        .collect()
}

fn parse_part(num: &str, den: &str, radicand: u64) -> Option<Surd> {
    let n: BigInt = num.parse().ok()?;
    let d: BigInt = den.parse().ok()?;
    if d.is_zero() || d.is_negative() || radicand == 0 {
        return None;
    }
    Some(Surd::with_radical(BigRational::new(n, d), radicand))
}

/// Rebuilds an exact series from its JSON entries.
pub fn series_from_entries(entries: &[SeriesEntry]) -> Option<GaussianSeries<Surd>> {
    let mut s = GaussianSeries::zero();
    for e in entries {
        s.accumulate(TermKey::new(e.k, e.n, e.p, e.q), parse_part(&e.numerator, &e.denominator, e.radicand)?);
    }
    Some(s)
}

pub fn law_from_entries(entries: &[LawEntry]) -> Option<AmplitudePoly<Surd>> {
    let mut law = AmplitudePoly::zero();
    for e in entries {
        law.accumulate(AmpKey::new(e.p, e.q), parse_part(&e.numerator, &e.denominator, e.radicand)?);
    }
    Some(law)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReductionJson {
    pub case: Option<String>,
    pub truncation: Truncation,
    pub iterations: usize,
    pub residual_zero: bool,
    pub amplitude_condition_held: bool,
    pub amplitude_law: Vec<LawEntry>,
    pub manifold: Vec<SeriesEntry>,
}

pub fn reduction_json<T: Scalar + ExactParts>(
    res: &ReductionResult<T>,
    cfg: Option<&CaseConfig>,
) -> ReductionJson {
    ReductionJson {
        case: cfg.map(|c| c.tag.to_string()),
        truncation: res.truncation,
        iterations: res.iterations,
        residual_zero: res.residual_zero,
        amplitude_condition_held: res.amplitude_condition_held(),
        amplitude_law: law_entries(&res.amplitude_law),
        manifold: series_entries(&res.reported()),
    }
}

/// Human-readable report. Signed 4-decimal coefficients are listed in
/// ASCII so they can be grepped.
pub fn text_report<T: Scalar>(res: &ReductionResult<T>, cfg: Option<&CaseConfig>) -> String {
    let mut out = String::new();
    if let Some(c) = cfg {
        writeln!(out, "case {}  gamma={} delta={} r={}", c.tag, c.gamma, c.delta, c.r).unwrap();
    }
    let t = res.truncation;
    writeln!(
        out,
        "orders: zeta^{} A^{} theta^{}  iterations: {}  residual zero: {}",
        t.zeta_order, t.amp_order, t.theta_order, res.iterations, res.residual_zero
    )
    .unwrap();
    writeln!(out).unwrap();
    writeln!(out, "amplitude law").unwrap();
    writeln!(out, "  dA/dtau' = {}", render_law(&res.amplitude_law)).unwrap();
    for (k, c) in res.amplitude_law.iter() {
        writeln!(out, "  A^{} theta^{}  {}", k.amp, k.theta, fmt4(c.to_f64())).unwrap();
    }
    if let Some(c) = cfg {
        let law = AmplitudeLawODE::from_reduction(res, c);
        let phys = AmplitudePoly::from_terms(
            law.coefficients.iter().map(|&(p, q, v)| (AmpKey::new(p, q), v)),
        );
        writeln!(out, "  dA/dt = t⁻¹·[{}]", render_law(&phys)).unwrap();
    }
    writeln!(out).unwrap();
    writeln!(out, "manifold").unwrap();
    for line in render_manifold(&res.reported()) {
        writeln!(out, "  {line}").unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::RadicalScalar;

    fn law(terms: &[(u32, u32, f64)]) -> AmplitudePoly<f64> {
        AmplitudePoly::from_terms(terms.iter().map(|&(p, q, c)| (AmpKey::new(p, q), c)))
    }

    #[test]
    fn rounding_is_half_even() {
        assert_eq!(fmt4(0.06413), "0.0641");
        assert_eq!(fmt4(-0.00221), "-0.0022");
        assert_eq!(round4(0.00125), 0.0012);
        assert_eq!(fmt4(-0.00001), "0.0000");
    }

    #[test]
    fn single_power_laws() {
        assert_eq!(render_law(&law(&[(3, 0, 0.06413), (5, 0, -0.00221)])), "0.0641A³ − 0.0022A⁵");
        assert_eq!(render_law(&law(&[(3, 2, 0.06413)])), "0.0641A³θ²");
        assert_eq!(render_law(&law(&[])), "0");
    }

    #[test]
    fn grouped_law() {
        let l = law(&[
            (1, 1, -1.18350),
            (3, 0, 0.06413),
            (3, 1, -0.16310),
            (5, 0, -0.00221),
            (5, 1, 0.01329),
        ]);
        assert_eq!(
            render_law(&l),
            "−1.1835Aθ + A³(0.0641 − 0.1631θ) − A⁵(0.0022 − 0.0133θ)"
        );
    }

    #[test]
    fn manifold_blocks() {
        let v = GaussianSeries::from_terms([
            (TermKey::new(1, 0, 1, 0), 1.0),
            (TermKey::new(2, 3, 2, 0), -1.0 / 6.0),
            (TermKey::new(2, 5, 2, 0), -1.0 / 12.0),
        ]);
        assert_eq!(render_manifold(&v), vec!["GA: + 1.0000", "G²A²: − 0.1667ζ³ − 0.0833ζ⁵"]);
    }

    #[test]
    fn json_entries_round_trip() {
        let c = Surd::from_ratio(3, 7) + Surd::sqrt_ratio(2, 9);
        let s = GaussianSeries::from_terms([
            (TermKey::new(1, 2, 1, 0), c),
            (TermKey::new(3, 0, 3, 1), Surd::from_int(-2)),
        ]);
        let entries = series_entries(&s);
        assert_eq!(entries.len(), 3);
        assert_eq!(entries[0].radicand, 1);
        assert_eq!(entries[1].radicand, 2);
        assert_eq!(entries[1].denominator, "3");
        assert_eq!(series_from_entries(&entries).unwrap(), s);

        let l = AmplitudePoly::monomial(AmpKey::new(3, 0), Surd::sqrt_ratio(1, 3));
        assert_eq!(law_from_entries(&law_entries(&l)).unwrap(), l);
    }

    #[test]
    fn float_entries_are_exact_binary_values() {
        let s = GaussianSeries::monomial(TermKey::new(1, 0, 1, 0), 0.5f64);
        let e = series_entries(&s);
        assert_eq!((e[0].numerator.as_str(), e[0].denominator.as_str()), ("1", "2"));
    }
}
