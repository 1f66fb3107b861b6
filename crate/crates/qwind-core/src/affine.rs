//! Affine data at a fixed level: integrability checks, conformal weights,
//! central charges for the winding cosets, and grade-resolved character
//! tables.
//!
//! A `WeightCharacter` records, for one integrable highest-weight module,
//! the multiplicity series of every dominant finite weight: entry `mu`
//! holds sum_n mult(mu, n) q^n over grades n, so the full character is
//! recovered by summing Weyl orbits. Tables are always *stored* in trace
//! form (integer grades, leading grade 0); the [`Normalization`] tag says
//! how exponents are to be read when the table is assembled into a
//! character, and [`WeightCharacter::with_normalization`] converts by
//! shifting every entry by h - c/24.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};

use crate::qseries::QSeries;
use crate::rootsys::{Algebra, RootSystem, Weight};
use crate::{Error, Result};

fn big(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Sommerfield central charge c = k dim g / (k + h-vee).
pub fn central_charge(rs: &RootSystem, level: i64) -> BigRational {
    assert!(level >= 0);
    big(level * rs.dimension) / big(level + rs.dual_coxeter)
}

/// Central charge of the coset of level j*k by the index-j winding image
/// of level k: c-hat = j c(k) - c(jk).
pub fn coset_central_charge(rs: &RootSystem, level: i64, winding: i64) -> BigRational {
    big(winding) * central_charge(rs, level) - central_charge(rs, winding * level)
}

/// Leading-exponent mismatch between a wound character and the characters
/// of the ambient level: c(k) (j^2 - 1) / 24.
pub fn winding_prefactor(rs: &RootSystem, level: i64, winding: i64) -> BigRational {
    central_charge(rs, level) * big(winding * winding - 1) / big(24)
}

/// The m with 1 - 6/(m(m+1)) equal to the given central charge, if any.
pub fn minimal_model_m(c: &BigRational) -> Option<i64> {
    let gap = BigRational::one() - c;
    if !gap.is_positive() {
        return None;
    }
    let t = big(6) / gap;
    if !t.is_integer() {
        return None;
    }
    let t = t.to_integer().to_i64()?;
    let m = (t as f64).sqrt().round() as i64;
    for cand in (m - 2).max(2)..=m + 2 {
        if cand * (cand + 1) == t {
            return Some(cand);
        }
    }
    None
}

/// Conformal weight h = (lambda, lambda + 2 rho) / (2 (k + h-vee)).
pub fn conformal_weight(rs: &RootSystem, level: i64, lambda: &Weight) -> BigRational {
    let num = rs.norm_s(&lambda.0) + 2 * rs.pairing_s(&lambda.0, &rs.rho.0);
    BigRational::new(
        BigInt::from(num),
        BigInt::from(2 * rs.scale * (level + rs.dual_coxeter)),
    )
}

/// Error unless `lambda` is a dominant weight with comark-weighted label
/// sum at most the level.
pub fn check_integrable(rs: &RootSystem, level: i64, lambda: &Weight) -> Result<()> {
    if lambda.0.len() != rs.rank {
        return Err(Error::InvalidWeight {
            detail: format!(
                "weight {lambda} has {} labels, {} needs {}",
                lambda.0.len(),
                rs.algebra,
                rs.rank
            ),
        });
    }
    if lambda.0.iter().any(|&c| c < 0) {
        return Err(Error::InvalidWeight {
            detail: format!("weight {lambda} has a negative label"),
        });
    }
    let weighted: i64 = lambda
        .0
        .iter()
        .zip(&rs.comarks)
        .map(|(&l, &cm)| l * cm)
        .sum();
    if weighted > level {
        return Err(Error::NotIntegrable {
            algebra: rs.algebra.to_string(),
            level,
            weight: lambda.to_string(),
            detail: format!(
                "comark-weighted label sum {weighted} exceeds the level \
                 (comarks {:?})",
                rs.comarks
            ),
        });
    }
    Ok(())
}

/// All integrable highest weights at the given level, sorted.
pub fn integrable_weights(rs: &RootSystem, level: i64) -> Vec<Weight> {
    let mut out = Vec::new();
    let mut coords = vec![0i64; rs.rank];
    fn recurse(
        rs: &RootSystem,
        level: i64,
        idx: usize,
        used: i64,
        coords: &mut Vec<i64>,
        out: &mut Vec<Weight>,
    ) {
        if idx == rs.rank {
            out.push(Weight(coords.clone()));
            return;
        }
        let cm = rs.comarks[idx];
        let mut v = 0i64;
        while used + v * cm <= level {
            coords[idx] = v;
            recurse(rs, level, idx + 1, used + v * cm, coords, out);
            v += 1;
        }
        coords[idx] = 0;
    }
    recurse(rs, level, 0, 0, &mut coords, &mut out);
    out.sort();
    out
}

/// An affine weight lambda-bar + level * Lambda_0 - depth * delta.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AffineWeight {
    pub finite: Weight,
    pub level: i64,
    pub depth: i64,
}

impl AffineWeight {
    pub fn new(finite: Weight, level: i64, depth: i64) -> Self {
        AffineWeight {
            finite,
            level,
            depth,
        }
    }

    /// S * affine pairing, using (delta, delta) = 0 and (Lambda_0, delta) = 1.
    pub fn pairing_s(&self, rs: &RootSystem, other: &AffineWeight) -> i64 {
        rs.pairing_s(&self.finite.0, &other.finite.0)
            - rs.scale * (self.level * other.depth + other.level * self.depth)
    }

    /// Reflection in the zeroth affine root alpha_0 = delta - theta. With
    /// m = level - (finite, theta-vee) this sends the weight to
    /// (finite + m theta, level, depth + m); an involution preserving the
    /// affine norm.
    pub fn reflect_zero(&self, rs: &RootSystem) -> AffineWeight {
        let pair_s = rs.pairing_s(&self.finite.0, &rs.theta.0);
        debug_assert_eq!(pair_s % rs.scale, 0, "theta-vee pairing must be integral");
        let m = self.level - pair_s / rs.scale;
        let finite = Weight(
            self.finite
                .0
                .iter()
                .zip(&rs.theta.0)
                .map(|(a, t)| a + m * t)
                .collect(),
        );
        AffineWeight {
            finite,
            level: self.level,
            depth: self.depth + m,
        }
    }
}

/// How the exponents of an assembled character are to be read.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Normalization {
    /// Exponents count grades below the highest weight (trace of q^{L_0 - h}).
    Trace,
    /// Exponents are L_0 - c/24 eigenvalues.
    Normalized,
}

impl Normalization {
    pub fn name(self) -> &'static str {
        match self {
            Normalization::Trace => "trace",
            Normalization::Normalized => "normalized",
        }
    }
}

/// Grade-resolved weight multiplicities of one integrable module.
#[derive(Clone, Debug)]
pub struct WeightCharacter {
    pub algebra: Algebra,
    pub level: i64,
    pub highest: Weight,
    pub normalization: Normalization,
    /// Grades 0..=max_grade are complete.
    pub max_grade: i64,
    /// Dominant weight -> sum_n mult(mu, n) q^n. In `Normalized` form the
    /// entries carry the extra global shift h - c/24.
    pub table: BTreeMap<Weight, QSeries>,
}

impl WeightCharacter {
    pub fn entry(&self, mu: &Weight) -> Option<&QSeries> {
        self.table.get(mu)
    }

    pub fn conformal_weight(&self, rs: &RootSystem) -> BigRational {
        conformal_weight(rs, self.level, &self.highest)
    }

    /// Convert between trace and normalized exponent conventions by
    /// shifting every entry by +-(h - c/24).
    pub fn with_normalization(&self, rs: &RootSystem, target: Normalization) -> WeightCharacter {
        if self.normalization == target {
            return self.clone();
        }
        let shift = self.conformal_weight(rs) - central_charge(rs, self.level) / big(24);
        let delta = match target {
            Normalization::Normalized => shift,
            Normalization::Trace => -shift,
        };
        let table = self
            .table
            .iter()
            .map(|(w, s)| (w.clone(), s.shift(&delta)))
            .collect();
        WeightCharacter {
            normalization: target,
            table,
            ..self.clone()
        }
    }

    /// Substitute q -> q^j in every entry. The finite weights are kept as
    /// they are: this is the exponent half of the index-j winding map,
    /// which re-reads a level-k table as sitting inside level j*k.
    pub fn wind(&self, j: u64) -> WeightCharacter {
        let table = self
            .table
            .iter()
            .map(|(w, s)| (w.clone(), s.substitute_power(j)))
            .collect();
        WeightCharacter {
            table,
            ..self.clone()
        }
    }

    /// Forget the weight grading: sum of orbit-size * entry, the graded
    /// dimension series of the module.
    pub fn specialize(&self, rs: &RootSystem) -> QSeries {
        let mut acc: Option<QSeries> = None;
        for (w, s) in &self.table {
            let orbit = BigInt::from(rs.orbit_size(&w.0));
            let term = s.scalar_mul(&orbit);
            acc = Some(match acc {
                None => term,
                Some(a) => a.add(&term),
            });
        }
        acc.unwrap_or_else(|| QSeries::zero(big(self.max_grade + 1)))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let strings: Vec<serde_json::Value> = self
            .table
            .iter()
            .map(|(w, s)| {
                serde_json::json!({
                    "weight": w,
                    "series": s,
                })
            })
            .collect();
        serde_json::json!({
            "algebra": self.algebra.name(),
            "level": self.level,
            "highest": self.highest,
            "normalization": self.normalization.name(),
            "max_grade": self.max_grade,
            "strings": strings,
        })
    }
}

/// Level-1 character table of a simply-laced algebra from its lattice
/// realization: the dominant weights congruent to the highest weight
/// modulo the root lattice each contribute q^{(|gamma|^2 - |lambda|^2)/2}
/// divided by phi(q)^rank. Used as an independent oracle for the
/// recursive character construction.
pub fn level_one_theta_character(
    rs: &RootSystem,
    highest: &Weight,
    max_grade: i64,
) -> Result<WeightCharacter> {
    assert!(
        rs.positive_roots.iter().all(|r| r.norm_s == 2 * rs.scale),
        "{}: lattice construction needs a simply-laced algebra",
        rs.algebra
    );
    check_integrable(rs, 1, highest)?;
    assert!(max_grade >= 0);

    let base_norm = rs.norm_s(&highest.0);
    let bound_s = base_norm + 2 * rs.scale * max_grade;
    let trunc = big(max_grade + 1);
    let phi_inv_pow = QSeries::euler_phi(max_grade as u64)
        .invert()
        .expect("phi has unit leading coefficient")
        .pow(rs.rank as u32);

    let mut table = BTreeMap::new();
    for gamma in rs.dominant_ball(&highest.0, false, bound_s) {
        let diff = rs.norm_s(&gamma.0) - base_norm;
        assert!(diff >= 0, "highest weight must minimize norm in its coset");
        assert_eq!(
            diff % (2 * rs.scale),
            0,
            "lattice norms must differ by even integers"
        );
        let m0 = diff / (2 * rs.scale);
        if m0 > max_grade {
            continue;
        }
        let entry = phi_inv_pow.shift(&big(m0)).truncate_to(&trunc);
        table.insert(gamma, entry);
    }
    Ok(WeightCharacter {
        algebra: rs.algebra,
        level: 1,
        highest: highest.clone(),
        normalization: Normalization::Trace,
        max_grade,
        table,
    })
}
