//! Truncated formal q-series with exact integer coefficients and rational
//! exponents.
//!
//! A series is a rational `offset`, a step denominator `D`, and a
//! coefficient vector: coefficient `i` sits at exponent `offset + i/D`.
//! Exponents at or above the rational `trunc` are unknown, and every
//! operation propagates `trunc` pessimistically so a result never claims
//! more precision than its inputs can support.
//!
//! Canonical form (enforced after every operation): the coefficient vector
//! has no leading or trailing zeros, every stored exponent is below
//! `trunc`, `D` is minimal for the nonzero support, and a series with no
//! known nonzero term is stored with an empty vector, `offset == trunc`,
//! and `D == 1`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Deserializer, MapAccess, Visitor};
use serde::ser::{SerializeStruct, Serializer};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Format an exact rational as `p/q`, omitting `/1` for integers.
pub fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parse `p` or `p/q` into an exact rational.
pub fn parse_rational(input: &str) -> Result<BigRational> {
    let bad = || Error::BadRational {
        input: input.to_string(),
    };
    let mut parts = input.trim().splitn(2, '/');
    let numer: BigInt = parts
        .next()
        .ok_or_else(bad)?
        .trim()
        .parse()
        .map_err(|_| bad())?;
    let denom: BigInt = match parts.next() {
        Some(d) => d.trim().parse().map_err(|_| bad())?,
        None => BigInt::one(),
    };
    if denom.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(numer, denom))
}

pub(crate) fn rat_int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub(crate) fn rat(numer: i64, denom: i64) -> BigRational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

/// Number of grid indices `0 <= i < x`, i.e. `max(0, ceil(x))`.
fn slot_count(x: &BigRational) -> usize {
    if *x <= BigRational::zero() {
        return 0;
    }
    x.ceil()
        .to_integer()
        .to_usize()
        .expect("series length exceeds addressable memory")
}

/// Parity selector for [`QSeries::parity_part`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

/// A truncated q-series; see the module docs for the representation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QSeries {
    offset: BigRational,
    step_den: u64,
    coeffs: Vec<BigInt>,
    trunc: BigRational,
}

impl QSeries {
    /// The series with no known nonzero term: exactly zero below `trunc`.
    pub fn zero(trunc: BigRational) -> Self {
        QSeries {
            offset: trunc.clone(),
            step_den: 1,
            coeffs: Vec::new(),
            trunc,
        }
    }

    /// The constant series 1.
    pub fn one(trunc: BigRational) -> Self {
        Self::monomial(BigRational::zero(), BigInt::one(), trunc)
    }

    /// The single term `coeff * q^exp`.
    pub fn monomial(exp: BigRational, coeff: BigInt, trunc: BigRational) -> Self {
        QSeries {
            offset: exp,
            step_den: 1,
            coeffs: vec![coeff],
            trunc,
        }
        .canonicalize()
    }

    /// Build a series from (exponent, coefficient) terms; duplicate
    /// exponents accumulate.
    pub fn from_terms<I>(terms: I, trunc: BigRational) -> Self
    where
        I: IntoIterator<Item = (BigRational, BigInt)>,
    {
        let mut map: BTreeMap<BigRational, BigInt> = BTreeMap::new();
        for (e, c) in terms {
            *map.entry(e).or_insert_with(BigInt::zero) += c;
        }
        map.retain(|_, c| !c.is_zero());
        let Some(offset) = map.keys().next().cloned() else {
            return Self::zero(trunc);
        };
        let mut den: u64 = 1;
        for e in map.keys() {
            let d = e
                .denom()
                .to_u64()
                .expect("exponent denominator exceeds u64");
            den = den.lcm(&d);
        }
        let step = BigRational::from_integer(BigInt::from(den));
        let mut coeffs = Vec::new();
        for (e, c) in &map {
            let idx = ((e - &offset) * &step)
                .to_integer()
                .to_usize()
                .expect("exponent spread exceeds addressable memory");
            if coeffs.len() <= idx {
                coeffs.resize(idx + 1, BigInt::zero());
            }
            coeffs[idx] = c.clone();
        }
        QSeries {
            offset,
            step_den: den,
            coeffs,
            trunc,
        }
        .canonicalize()
    }

    /// Convenience for tests and fixtures: integer grades and coefficients.
    pub fn from_int_terms(terms: &[(i64, i64)], trunc: i64) -> Self {
        Self::from_terms(
            terms.iter().map(|&(e, c)| (rat_int(e), BigInt::from(c))),
            rat_int(trunc),
        )
    }

    fn canonicalize(mut self) -> Self {
        // Drop anything at or above the truncation order.
        let span = (&self.trunc - &self.offset) * rat_int(self.step_den as i64);
        let keep = slot_count(&span);
        self.coeffs.truncate(keep);

        // Trim zeros at both ends; the leading trim advances the offset.
        let lead = self
            .coeffs
            .iter()
            .position(|c| !c.is_zero())
            .unwrap_or(self.coeffs.len());
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.offset += rat(lead as i64, self.step_den as i64);
        }
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }

        if self.coeffs.is_empty() {
            self.offset = self.trunc.clone();
            self.step_den = 1;
            return self;
        }

        // Minimize the step denominator over the nonzero support.
        let mut g: u64 = 0;
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                g = g.gcd(&(i as u64));
            }
        }
        let factor = if g == 0 {
            self.step_den
        } else {
            g.gcd(&self.step_den)
        };
        if factor > 1 {
            let taken = std::mem::take(&mut self.coeffs);
            self.coeffs = taken
                .into_iter()
                .enumerate()
                .filter_map(|(i, c)| {
                    if i as u64 % factor == 0 {
                        Some(c)
                    } else {
                        debug_assert!(c.is_zero());
                        None
                    }
                })
                .collect();
            self.step_den /= factor;
        }
        self
    }

    pub fn offset(&self) -> &BigRational {
        &self.offset
    }

    pub fn step_den(&self) -> u64 {
        self.step_den
    }

    /// Exponents at or above this bound are unknown.
    pub fn trunc(&self) -> &BigRational {
        &self.trunc
    }

    /// True when no nonzero coefficient is known (zero below `trunc`).
    pub fn is_known_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// First known term as (exponent, coefficient), if any.
    pub fn leading(&self) -> Option<(&BigRational, &BigInt)> {
        self.coeffs.first().map(|c| (&self.offset, c))
    }

    /// The coefficient at exponent `e`: `None` when `e` is beyond the
    /// truncation, otherwise the exact value (zero off the stored grid).
    pub fn coeff(&self, e: &BigRational) -> Option<BigInt> {
        if *e >= self.trunc {
            return None;
        }
        if self.coeffs.is_empty() || *e < self.offset {
            return Some(BigInt::zero());
        }
        let rel = (e - &self.offset) * rat_int(self.step_den as i64);
        if !rel.is_integer() {
            return Some(BigInt::zero());
        }
        match rel.to_integer().to_usize() {
            Some(i) if i < self.coeffs.len() => Some(self.coeffs[i].clone()),
            _ => Some(BigInt::zero()),
        }
    }

    /// Coefficient at an integer exponent; see [`QSeries::coeff`].
    pub fn coeff_int(&self, e: i64) -> Option<BigInt> {
        self.coeff(&rat_int(e))
    }

    /// All known nonzero terms in increasing exponent order.
    pub fn terms(&self) -> Vec<(BigRational, BigInt)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| {
                (
                    &self.offset + rat(i as i64, self.step_den as i64),
                    c.clone(),
                )
            })
            .collect()
    }

    /// Two series agree when their coefficients coincide at every exponent
    /// below both truncation orders. This is the comparison the branching
    /// verifier uses; [`PartialEq`] compares representations instead.
    pub fn agrees_with(&self, other: &QSeries) -> bool {
        let bound = self.trunc.clone().min(other.trunc.clone());
        let pick = |s: &QSeries| -> BTreeMap<BigRational, BigInt> {
            s.terms().into_iter().filter(|(e, _)| *e < bound).collect()
        };
        pick(self) == pick(other)
    }

    /// The order through which [`QSeries::agrees_with`] actually compared.
    pub fn common_trunc(&self, other: &QSeries) -> BigRational {
        self.trunc.clone().min(other.trunc.clone())
    }

    /// Shift every exponent (and the truncation) by `delta`.
    pub fn shift(&self, delta: &BigRational) -> QSeries {
        let mut out = self.clone();
        out.offset += delta;
        out.trunc += delta;
        out
    }

    /// Lower the truncation order (a no-op if already at or below `t`).
    pub fn truncate_to(&self, t: &BigRational) -> QSeries {
        if *t >= self.trunc {
            return self.clone();
        }
        let mut out = self.clone();
        out.trunc = t.clone();
        out.canonicalize()
    }

    pub fn neg(&self) -> QSeries {
        let mut out = self.clone();
        for c in &mut out.coeffs {
            *c = -std::mem::take(c);
        }
        out
    }

    pub fn scalar_mul(&self, k: &BigInt) -> QSeries {
        let mut out = self.clone();
        for c in &mut out.coeffs {
            *c = std::mem::take(c) * k;
        }
        out.canonicalize()
    }

    /// Common (offset, step denominator) on which both series live.
    fn common_grid(&self, other: &QSeries) -> (BigRational, u64) {
        let offset = self.offset.clone().min(other.offset.clone());
        let mut den = self.step_den.lcm(&other.step_den);
        let diff = &self.offset - &other.offset;
        let dd = diff
            .denom()
            .to_u64()
            .expect("offset denominator exceeds u64");
        den = den.lcm(&dd);
        (offset, den)
    }

    pub fn add(&self, other: &QSeries) -> QSeries {
        let trunc = self.trunc.clone().min(other.trunc.clone());
        let (offset, den) = self.common_grid(other);
        let denr = rat_int(den as i64);
        let base = |s: &QSeries| -> usize {
            ((&s.offset - &offset) * &denr)
                .to_integer()
                .to_usize()
                .expect("offset spread exceeds addressable memory")
        };
        let cap = slot_count(&((&trunc - &offset) * &denr));
        let need = |s: &QSeries| -> usize {
            if s.coeffs.is_empty() {
                0
            } else {
                base(s) + (s.coeffs.len() - 1) * (den / s.step_den) as usize + 1
            }
        };
        let len = need(self).max(need(other)).min(cap);
        let mut coeffs = vec![BigInt::zero(); len];
        for s in [self, other] {
            let b = base(s);
            let step = (den / s.step_den) as usize;
            for (i, c) in s.coeffs.iter().enumerate() {
                let idx = b + i * step;
                if idx < len {
                    coeffs[idx] += c;
                }
            }
        }
        QSeries {
            offset,
            step_den: den,
            coeffs,
            trunc,
        }
        .canonicalize()
    }

    pub fn sub(&self, other: &QSeries) -> QSeries {
        self.add(&other.neg())
    }

    /// Cauchy product. The unknown tail of each factor meets the lowest
    /// exponent of the other, so the result is known strictly below
    /// `min(trunc_a + offset_b, trunc_b + offset_a)` (for a factor with no
    /// known term the representation stores `offset == trunc`, which is
    /// exactly the bound its possible nonzero part imposes).
    pub fn mul(&self, other: &QSeries) -> QSeries {
        let trunc = (&self.trunc + &other.offset).min(&other.trunc + &self.offset);
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return QSeries::zero(trunc);
        }
        let den = self.step_den.lcm(&other.step_den);
        let offset = &self.offset + &other.offset;
        let sa = (den / self.step_den) as usize;
        let sb = (den / other.step_den) as usize;
        let cap = slot_count(&((&trunc - &offset) * rat_int(den as i64)));
        let len = cap.min((self.coeffs.len() - 1) * sa + (other.coeffs.len() - 1) * sb + 1);
        let mut coeffs = vec![BigInt::zero(); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let base = i * sa;
            if base >= len {
                break;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                let idx = base + j * sb;
                if idx >= len {
                    break;
                }
                if !b.is_zero() {
                    coeffs[idx] += a * b;
                }
            }
        }
        QSeries {
            offset,
            step_den: den,
            coeffs,
            trunc,
        }
        .canonicalize()
    }

    pub fn pow(&self, n: u32) -> QSeries {
        if n == 0 {
            return QSeries::one(&self.trunc - &self.offset);
        }
        let mut out = self.clone();
        for _ in 1..n {
            out = out.mul(self);
        }
        out
    }

    /// Multiplicative inverse. Requires a known leading coefficient of
    /// \u{b1}1; the result is known strictly below `trunc - 2*offset` (the
    /// inverse has offset `-offset` and the same relative precision).
    pub fn invert(&self) -> Result<QSeries> {
        let Some(c0) = self.coeffs.first() else {
            return Err(Error::NonUnitLeadingCoefficient {
                found: "0 (no known term)".to_string(),
            });
        };
        if !c0.magnitude().is_one() {
            return Err(Error::NonUnitLeadingCoefficient {
                found: c0.to_string(),
            });
        }
        let den = self.step_den;
        let rel = (&self.trunc - &self.offset) * rat_int(den as i64);
        let m = slot_count(&rel);
        let mut inv = vec![BigInt::zero(); m];
        inv[0] = c0.clone();
        for k in 1..m {
            let mut acc = BigInt::zero();
            for (j, a) in self.coeffs.iter().enumerate().skip(1) {
                if j > k {
                    break;
                }
                if !a.is_zero() {
                    acc += a * &inv[k - j];
                }
            }
            if !acc.is_zero() {
                inv[k] = -(c0 * acc);
            }
        }
        Ok(QSeries {
            offset: -self.offset.clone(),
            step_den: den,
            coeffs: inv,
            trunc: &self.trunc - rat_int(2) * &self.offset,
        }
        .canonicalize())
    }

    /// The substitution q -> q^j: all exponents, including the truncation
    /// order, multiply by j.
    pub fn substitute_power(&self, j: u64) -> QSeries {
        assert!(j >= 1, "substitution power must be positive");
        let jr = rat_int(j as i64);
        if self.coeffs.is_empty() {
            return QSeries::zero(&self.trunc * &jr);
        }
        let g = j.gcd(&self.step_den);
        let stretch = (j / g) as usize;
        let den = self.step_den / g;
        let mut coeffs = vec![BigInt::zero(); (self.coeffs.len() - 1) * stretch + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i * stretch] = c.clone();
        }
        QSeries {
            offset: &self.offset * &jr,
            step_den: den,
            coeffs,
            trunc: &self.trunc * &jr,
        }
        .canonicalize()
    }

    /// Keep only terms of the requested exponent parity. All known terms
    /// must sit at integer exponents.
    pub fn parity_part(&self, parity: Parity) -> Result<QSeries> {
        let mut kept = Vec::new();
        for (e, c) in self.terms() {
            if !e.is_integer() {
                return Err(Error::NonIntegerExponents {
                    exponent: format_rational(&e),
                });
            }
            let even = e.to_integer().is_even();
            if even == (parity == Parity::Even) {
                kept.push((e, c));
            }
        }
        Ok(QSeries::from_terms(kept, self.trunc.clone()))
    }

    /// Euler's product prod_{n=1..order} (1 - q^n), complete through
    /// q^order (truncation order + 1). Computed as the direct finite
    /// product; the pentagonal-number structure is asserted in tests, not
    /// assumed here.
    pub fn euler_phi(order: u64) -> QSeries {
        let len = order as usize + 1;
        let mut coeffs = vec![BigInt::zero(); len];
        coeffs[0] = BigInt::one();
        for n in 1..len {
            for i in (n..len).rev() {
                let lower = coeffs[i - n].clone();
                coeffs[i] -= lower;
            }
        }
        QSeries {
            offset: BigRational::zero(),
            step_den: 1,
            coeffs,
            trunc: rat_int(order as i64 + 1),
        }
        .canonicalize()
    }
}

impl fmt::Display for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.terms();
        if terms.is_empty() {
            return write!(f, "0 + O(q^{})", format_rational(&self.trunc));
        }
        for (k, (e, c)) in terms.iter().enumerate() {
            let mag = c.magnitude().to_string();
            if k == 0 {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let unit_coeff = c.magnitude().is_one();
            if e.is_zero() {
                write!(f, "{mag}")?;
            } else {
                if !unit_coeff {
                    write!(f, "{mag}*")?;
                }
                if e.is_one() {
                    write!(f, "q")?;
                } else if e.is_integer() && !e.is_negative() {
                    write!(f, "q^{}", e.to_integer())?;
                } else {
                    write!(f, "q^{{{}}}", format_rational(e))?;
                }
            }
        }
        write!(f, " + O(q^{})", format_rational(&self.trunc))
    }
}

impl Serialize for QSeries {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("QSeries", 4)?;
        s.serialize_field("offset", &format_rational(&self.offset))?;
        s.serialize_field("step_den", &self.step_den)?;
        let coeffs: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        s.serialize_field("coeffs", &coeffs)?;
        s.serialize_field("trunc", &format_rational(&self.trunc))?;
        s.end()
    }
}

impl<'de> Deserialize<'de> for QSeries {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(field_identifier, rename_all = "snake_case")]
        enum Field {
            Offset,
            StepDen,
            Coeffs,
            Trunc,
        }
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = QSeries;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a QSeries object with offset, step_den, coeffs, trunc")
            }
            fn visit_map<A: MapAccess<'de>>(
                self,
                mut map: A,
            ) -> std::result::Result<QSeries, A::Error> {
                let mut offset: Option<String> = None;
                let mut step_den: Option<u64> = None;
                let mut coeffs: Option<Vec<String>> = None;
                let mut trunc: Option<String> = None;
                while let Some(key) = map.next_key()? {
                    match key {
                        Field::Offset => offset = Some(map.next_value()?),
                        Field::StepDen => step_den = Some(map.next_value()?),
                        Field::Coeffs => coeffs = Some(map.next_value()?),
                        Field::Trunc => trunc = Some(map.next_value()?),
                    }
                }
                let offset = offset.ok_or_else(|| de::Error::missing_field("offset"))?;
                let step_den = step_den.ok_or_else(|| de::Error::missing_field("step_den"))?;
                let coeffs = coeffs.ok_or_else(|| de::Error::missing_field("coeffs"))?;
                let trunc = trunc.ok_or_else(|| de::Error::missing_field("trunc"))?;
                if step_den == 0 {
                    return Err(de::Error::custom("step_den must be positive"));
                }
                let offset = parse_rational(&offset).map_err(de::Error::custom)?;
                let trunc = parse_rational(&trunc).map_err(de::Error::custom)?;
                let coeffs = coeffs
                    .iter()
                    .map(|c| c.parse::<BigInt>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|_| de::Error::custom("coefficients must be decimal integers"))?;
                Ok(QSeries {
                    offset,
                    step_den,
                    coeffs,
                    trunc,
                }
                .canonicalize())
            }
        }
        deserializer.deserialize_struct("QSeries", &["offset", "step_den", "coeffs", "trunc"], V)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent partition counter: dynamic programming over part sizes,
    /// sharing no code with the series engine.
    fn partitions(n: usize) -> Vec<BigInt> {
        let mut p = vec![BigInt::zero(); n + 1];
        p[0] = BigInt::one();
        for part in 1..=n {
            for total in part..=n {
                let prev = p[total - part].clone();
                p[total] += prev;
            }
        }
        p
    }

    fn phi_inverse(order: i64) -> QSeries {
        QSeries::euler_phi(order as u64).invert().unwrap()
    }

    #[test]
    fn canonical_form_trims_and_reduces() {
        // 0*q^0 + 1*q^{1/2} + 0*q^1 + 3*q^{3/2} collapses to step 1/2 with
        // offset 1/2; interior zero keeps D=2 minimal? Support {1/2, 3/2}:
        // spacing 1 after the offset, so D reduces to 1.
        let s = QSeries::from_terms(
            vec![(rat(1, 2), BigInt::from(1)), (rat(3, 2), BigInt::from(3))],
            rat_int(5),
        );
        assert_eq!(s.offset(), &rat(1, 2));
        assert_eq!(s.step_den(), 1);
        assert_eq!(s.terms().len(), 2);

        // Mixed support that genuinely needs D=2.
        let t = QSeries::from_terms(
            vec![(rat(1, 2), BigInt::from(1)), (rat_int(1), BigInt::from(3))],
            rat_int(5),
        );
        assert_eq!(t.step_den(), 2);
    }

    #[test]
    fn zero_series_representation() {
        let z = QSeries::from_int_terms(&[(3, 5), (3, -5)], 9);
        assert!(z.is_known_zero());
        assert_eq!(z.trunc(), &rat_int(9));
        assert_eq!(z.coeff_int(2), Some(BigInt::zero()));
        assert_eq!(z.coeff_int(9), None);
    }

    #[test]
    fn add_cancellation() {
        let a = QSeries::from_int_terms(&[(0, 1), (1, 1)], 10);
        let b = QSeries::from_int_terms(&[(0, 1), (1, -1)], 10);
        let sum = a.add(&b);
        assert_eq!(sum, QSeries::from_int_terms(&[(0, 2)], 10));
    }

    #[test]
    fn add_aligns_fractional_offsets() {
        let t = rat_int(4);
        let a = QSeries::monomial(rat(1, 8), BigInt::one(), t.clone());
        let b = QSeries::monomial(rat(9, 8), BigInt::one(), t.clone());
        let sum = a.add(&b);
        assert_eq!(sum.offset(), &rat(1, 8));
        assert_eq!(sum.coeff(&rat(9, 8)), Some(BigInt::one()));
        assert_eq!(sum.terms().len(), 2);
    }

    #[test]
    fn add_inverse_of_phi_reciprocal_is_zero() {
        let inv = phi_inverse(12);
        assert!(inv.add(&inv.neg()).is_known_zero());
    }

    #[test]
    fn mul_difference_of_squares() {
        let a = QSeries::from_int_terms(&[(0, 1), (1, 1)], 10);
        let b = QSeries::from_int_terms(&[(0, 1), (1, -1)], 10);
        assert_eq!(a.mul(&b), QSeries::from_int_terms(&[(0, 1), (2, -1)], 10));
    }

    #[test]
    fn mul_adds_fractional_offsets() {
        let t = rat_int(2);
        let a = QSeries::monomial(rat(1, 8), BigInt::one(), t.clone());
        let prod = a.mul(&a);
        assert_eq!(prod.offset(), &rat(1, 4));
        // trunc = min over both orderings of trunc + other offset
        assert_eq!(prod.trunc(), &(rat_int(2) + rat(1, 8)));
    }

    #[test]
    fn mul_against_independent_partition_oracle() {
        // phi * (1/phi) = 1, with 1/phi checked against the DP partition
        // counter first so the two factors are independently trusted.
        let n = 20;
        let inv = phi_inverse(n);
        let p = partitions(n as usize);
        for (i, expected) in p.iter().enumerate() {
            assert_eq!(inv.coeff_int(i as i64).unwrap(), *expected, "p({i})");
        }
        let phi = QSeries::euler_phi(n as u64);
        let prod = phi.mul(&inv);
        assert!(prod.agrees_with(&QSeries::one(rat_int(n))));
        assert_eq!(prod.coeff_int(0), Some(BigInt::one()));
        for i in 1..n {
            assert_eq!(prod.coeff_int(i), Some(BigInt::zero()));
        }
    }

    #[test]
    fn euler_phi_small_orders() {
        assert_eq!(
            QSeries::euler_phi(6),
            QSeries::from_int_terms(&[(0, 1), (1, -1), (2, -1), (5, 1)], 7)
        );
        assert_eq!(QSeries::euler_phi(0), QSeries::from_int_terms(&[(0, 1)], 1));
        assert_eq!(QSeries::euler_phi(7).coeff_int(7), Some(BigInt::one()));
    }

    #[test]
    fn euler_phi_pentagonal_signs() {
        // Coefficients vanish except at generalized pentagonal numbers
        // k(3k-1)/2 where the value is (-1)^k; checked against the direct
        // product output through q^30.
        let phi = QSeries::euler_phi(30);
        let mut expected = vec![BigInt::zero(); 31];
        for k in 1i64..=5 {
            for pent in [k * (3 * k - 1) / 2, k * (3 * k + 1) / 2] {
                if pent <= 30 {
                    expected[pent as usize] = if k % 2 == 0 {
                        BigInt::one()
                    } else {
                        -BigInt::one()
                    };
                }
            }
        }
        expected[0] = BigInt::one();
        for (i, e) in expected.iter().enumerate() {
            assert_eq!(phi.coeff_int(i as i64).unwrap(), *e, "phi coeff {i}");
        }
    }

    #[test]
    fn invert_partition_numbers() {
        let inv = phi_inverse(10);
        let expected = [1i64, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42];
        for (i, e) in expected.iter().enumerate() {
            assert_eq!(inv.coeff_int(i as i64).unwrap(), BigInt::from(*e));
        }
    }

    #[test]
    fn invert_trivial_and_geometric() {
        let one = QSeries::one(rat_int(8));
        assert_eq!(one.invert().unwrap(), one);
        let geom = QSeries::from_int_terms(&[(0, 1), (1, -1)], 8)
            .invert()
            .unwrap();
        for i in 0..8 {
            assert_eq!(geom.coeff_int(i), Some(BigInt::one()));
        }
    }

    #[test]
    fn invert_rejects_non_units() {
        let s = QSeries::from_int_terms(&[(0, 2), (1, 1)], 8);
        assert!(matches!(
            s.invert(),
            Err(Error::NonUnitLeadingCoefficient { .. })
        ));
        assert!(QSeries::zero(rat_int(4)).invert().is_err());
    }

    #[test]
    fn invert_is_two_sided_to_truncation() {
        let s = QSeries::from_terms(
            vec![
                (rat(-1, 3), BigInt::from(-1)),
                (rat(2, 3), BigInt::from(4)),
                (rat(5, 3), BigInt::from(-2)),
            ],
            rat_int(5),
        );
        let inv = s.invert().unwrap();
        let one = QSeries::one(rat_int(30));
        assert!(s.mul(&inv).agrees_with(&one));
        assert!(inv.mul(&s).agrees_with(&one));
    }

    #[test]
    fn substitution_examples() {
        let a = QSeries::from_int_terms(&[(0, 1), (1, 1)], 6);
        assert_eq!(
            a.substitute_power(2),
            QSeries::from_int_terms(&[(0, 1), (2, 1)], 12)
        );
        let frac = QSeries::monomial(rat(1, 16), BigInt::one(), rat(3, 16));
        assert_eq!(frac.substitute_power(2).offset(), &rat(1, 8));
        assert_eq!(a.substitute_power(1), a);
    }

    #[test]
    fn substitution_composes() {
        let s = QSeries::from_terms(
            vec![(rat(1, 2), BigInt::from(3)), (rat_int(2), BigInt::from(-1))],
            rat_int(4),
        );
        assert_eq!(
            s.substitute_power(2).substitute_power(3),
            s.substitute_power(6)
        );
    }

    #[test]
    fn parity_examples() {
        let s = QSeries::from_int_terms(&[(0, 1), (1, 2), (2, 3)], 5);
        assert_eq!(
            s.parity_part(Parity::Even).unwrap(),
            QSeries::from_int_terms(&[(0, 1), (2, 3)], 5)
        );
        assert_eq!(
            s.parity_part(Parity::Odd).unwrap(),
            QSeries::from_int_terms(&[(1, 2)], 5)
        );
        let even = s.parity_part(Parity::Even).unwrap();
        let odd = s.parity_part(Parity::Odd).unwrap();
        assert_eq!(even.add(&odd), s);
        // Idempotence.
        assert_eq!(even.parity_part(Parity::Even).unwrap(), even);
        assert!(even.parity_part(Parity::Odd).unwrap().is_known_zero());
    }

    #[test]
    fn parity_rejects_fractional_exponents() {
        let s = QSeries::monomial(rat(1, 2), BigInt::one(), rat_int(3));
        assert!(matches!(
            s.parity_part(Parity::Even),
            Err(Error::NonIntegerExponents { .. })
        ));
        // Negative even/odd integers classify by residue, not sign.
        let neg = QSeries::from_int_terms(&[(-3, 1), (-2, 2)], 0);
        assert_eq!(
            neg.parity_part(Parity::Odd).unwrap(),
            QSeries::from_int_terms(&[(-3, 1)], 0)
        );
    }

    #[test]
    fn agreement_respects_truncation() {
        let a = QSeries::from_int_terms(&[(0, 1), (1, 5)], 2);
        let b = QSeries::from_int_terms(&[(0, 1), (1, 5), (2, 9)], 4);
        assert!(a.agrees_with(&b));
        let c = QSeries::from_int_terms(&[(0, 1), (1, 6)], 4);
        assert!(!a.agrees_with(&c));
        // Below both truncations nothing differs, so equal.
        let d = QSeries::from_int_terms(&[(3, 7)], 4);
        let e = QSeries::zero(rat_int(3));
        assert!(d.agrees_with(&e));
    }

    #[test]
    fn shift_and_truncate() {
        let s = QSeries::from_int_terms(&[(0, 1), (2, 4)], 5);
        let shifted = s.shift(&rat(1, 16));
        assert_eq!(shifted.offset(), &rat(1, 16));
        assert_eq!(shifted.trunc(), &(rat_int(5) + rat(1, 16)));
        let cut = s.truncate_to(&rat_int(2));
        assert_eq!(cut.terms().len(), 1);
        assert_eq!(cut.trunc(), &rat_int(2));
    }

    #[test]
    fn json_schema_golden() {
        let s = QSeries::from_terms(
            vec![(rat(1, 8), BigInt::one()), (rat(9, 8), BigInt::from(2))],
            rat(17, 8),
        );
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(
            json,
            r#"{"offset":"1/8","step_den":1,"coeffs":["1","2"],"trunc":"17/8"}"#
        );
        let back: QSeries = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn json_round_trip_zero_and_fractional() {
        for s in [
            QSeries::zero(rat(-3, 2)),
            QSeries::from_terms(
                vec![
                    (rat(-1, 2), BigInt::from(-7)),
                    (rat_int(0), BigInt::from(3)),
                ],
                rat(7, 2),
            ),
        ] {
            let json = serde_json::to_string(&s).unwrap();
            let back: QSeries = serde_json::from_str(&json).unwrap();
            assert_eq!(back, s);
        }
    }

    #[test]
    fn display_formatting() {
        let s = QSeries::from_terms(
            vec![
                (rat_int(0), BigInt::from(3)),
                (rat(1, 2), BigInt::from(-1)),
                (rat_int(1), BigInt::from(2)),
            ],
            rat_int(4),
        );
        assert_eq!(s.to_string(), "3 - q^{1/2} + 2*q + O(q^4)");
        assert_eq!(QSeries::zero(rat(1, 3)).to_string(), "0 + O(q^1/3)");
    }

    #[test]
    fn display_leading_negative_and_high_powers() {
        let s = QSeries::from_int_terms(&[(0, -1), (3, 1)], 9);
        assert_eq!(s.to_string(), "-1 + q^3 + O(q^9)");
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn arb_series() -> impl Strategy<Value = QSeries> {
            (
                -8i64..8,
                1i64..5,
                1u64..4,
                proptest::collection::vec(-4i64..5, 0..6),
                0i64..4,
            )
                .prop_map(|(on, od, den, cs, slack)| {
                    let offset = rat(on, od);
                    let trunc = &offset + rat(cs.len() as i64 + slack, den as i64);
                    QSeries {
                        offset,
                        step_den: den,
                        coeffs: cs.into_iter().map(BigInt::from).collect(),
                        trunc,
                    }
                    .canonicalize()
                })
        }

        proptest! {
            #[test]
            fn canonicalize_is_idempotent(a in arb_series()) {
                let again = a.clone().canonicalize();
                prop_assert_eq!(again, a);
            }

            #[test]
            fn add_commutes(a in arb_series(), b in arb_series()) {
                prop_assert_eq!(a.add(&b), b.add(&a));
            }

            #[test]
            fn add_associates(a in arb_series(), b in arb_series(), c in arb_series()) {
                prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
            }

            #[test]
            fn mul_commutes(a in arb_series(), b in arb_series()) {
                prop_assert_eq!(a.mul(&b), b.mul(&a));
            }

            #[test]
            fn mul_distributes(a in arb_series(), b in arb_series(), c in arb_series()) {
                // b and c are given a common truncation so (b+c) loses
                // nothing either way; agreement then holds on the overlap.
                let t = b.common_trunc(&c);
                let b = b.truncate_to(&t);
                let c = c.truncate_to(&t);
                let lhs = a.mul(&b.add(&c));
                let rhs = a.mul(&b).add(&a.mul(&c));
                prop_assert!(lhs.agrees_with(&rhs));
            }

            #[test]
            fn mul_associates(a in arb_series(), b in arb_series(), c in arb_series()) {
                prop_assert!(a.mul(&b).mul(&c).agrees_with(&a.mul(&b.mul(&c))));
            }

            #[test]
            fn inverse_round_trip(a in arb_series(), sign in proptest::bool::ANY) {
                // Force a unit leading coefficient.
                let unit = BigInt::from(if sign { 1 } else { -1 });
                let forced = QSeries::from_terms(
                    std::iter::once((a.offset().clone() - rat(1, 1), unit))
                        .chain(a.terms()),
                    a.trunc().clone(),
                );
                let inv = forced.invert().unwrap();
                let t = rat_int(64);
                prop_assert!(forced.mul(&inv).agrees_with(&QSeries::one(t)));
            }

            #[test]
            fn substitution_composes(a in arb_series(), j in 1u64..4, k in 1u64..4) {
                prop_assert_eq!(
                    a.substitute_power(j).substitute_power(k),
                    a.substitute_power(j * k)
                );
            }

            #[test]
            fn parity_parts_partition(a in arb_series()) {
                // Integerize all exponents: clear the step first, then the
                // offset's remaining denominator.
                let b = a.substitute_power(a.step_den());
                let b = b.substitute_power(
                    b.offset().denom().to_u64().expect("small denominator"),
                );
                prop_assert!(b.terms().iter().all(|(e, _)| e.is_integer()));
                let even = b.parity_part(Parity::Even).unwrap();
                let odd = b.parity_part(Parity::Odd).unwrap();
                prop_assert_eq!(even.add(&odd), b);
            }

            #[test]
            fn serde_round_trip(a in arb_series()) {
                let json = serde_json::to_string(&a).unwrap();
                let back: QSeries = serde_json::from_str(&json).unwrap();
                prop_assert_eq!(back, a);
            }

            #[test]
            fn truncation_is_pessimistic(a in arb_series(), b in arb_series()) {
                let sum = a.add(&b);
                prop_assert!(sum.trunc() <= a.trunc() && sum.trunc() <= b.trunc());
                let prod = a.mul(&b);
                let bound = (a.trunc().clone() + b.offset().clone())
                    .min(b.trunc().clone() + a.offset().clone());
                prop_assert!(*prod.trunc() <= bound);
            }
        }
    }
}
