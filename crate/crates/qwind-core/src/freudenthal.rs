//! Grade-by-grade weight multiplicities of integrable highest-weight
//! modules, by the affine multiplicity recursion.
//!
//! For a weight mu at depth n below the highest weight Lambda, the
//! recursion reads
//!
//!   (|Lambda+rho|^2 - |mu+rho|^2 + 2(k+h-vee) n) mult(mu, n)
//!     = 2 * [ horizontal + lifted + imaginary ]
//!
//! where the three sums run over the alpha-strings through mu: horizontal
//! terms stay at depth n and move by positive finite roots, lifted terms
//! move by a finite root (of either sign) while descending tm grades, and
//! imaginary terms descend by multiples of the null direction with
//! multiplicity rank. Every pairing is carried scaled by the algebra's
//! integrality factor S, so all arithmetic is integer and every division
//! is checked exact.
//!
//! The candidate set is the dominant part of the coset Lambda + Q inside
//! the norm ball |mu+rho|^2 <= |Lambda+rho|^2 + 2(k+h-vee) N; any weight
//! outside the ball has multiplicity zero at every depth up to N. Within
//! one depth, candidates are processed in order of strictly decreasing
//! |mu|^2: a horizontal step mu -> mu + t*alpha (t >= 1, alpha > 0,
//! mu dominant) strictly increases |mu|^2, so every horizontal reference
//! is resolved before it is needed.

use std::collections::HashMap;

use crate::affine::{check_integrable, Normalization, WeightCharacter};
use crate::qseries::QSeries;
use crate::rootsys::{RootSystem, Weight};
use crate::{Error, Result};

struct Candidate {
    weight: Vec<i64>,
    /// S * |mu|^2, the ordering key for horizontal references.
    norm_s: i64,
    /// S * |mu + rho|^2, the norm entering the recursion denominator.
    shifted_norm_s: i64,
    /// mults[n] is the multiplicity at depth n.
    mults: Vec<i64>,
}

/// Compute the full dominant-weight multiplicity table of L(Lambda) at
/// the given level, complete through `max_grade`.
pub fn weight_character(
    rs: &RootSystem,
    level: i64,
    highest: &Weight,
    max_grade: i64,
) -> Result<WeightCharacter> {
    check_integrable(rs, level, highest)?;
    assert!(max_grade >= 0);
    let s = rs.scale;
    let plane = 2 * s * (level + rs.dual_coxeter);
    let shifted_top: Vec<i64> = highest
        .0
        .iter()
        .zip(&rs.rho.0)
        .map(|(a, b)| a + b)
        .collect();
    let top_norm_s = rs.norm_s(&shifted_top);
    let bound_s = top_norm_s + plane * max_grade;

    let mut candidates: Vec<Candidate> = rs
        .dominant_ball(&highest.0, true, bound_s)
        .into_iter()
        .map(|w| {
            let norm_s = rs.norm_s(&w.0);
            let nu: Vec<i64> = w.0.iter().zip(&rs.rho.0).map(|(a, b)| a + b).collect();
            let shifted_norm_s = rs.norm_s(&nu);
            Candidate {
                weight: w.0,
                norm_s,
                shifted_norm_s,
                mults: vec![0; max_grade as usize + 1],
            }
        })
        .collect();
    // Strictly decreasing |mu|^2; ties broken lexicographically so the
    // run is deterministic (tied candidates never reference each other).
    candidates.sort_by(|a, b| {
        b.norm_s
            .cmp(&a.norm_s)
            .then_with(|| a.weight.cmp(&b.weight))
    });
    let index: HashMap<Vec<i64>, usize> = candidates
        .iter()
        .enumerate()
        .map(|(i, c)| (c.weight.clone(), i))
        .collect();
    let max_norm_s = candidates.first().map_or(0, |c| c.norm_s);
    let top_idx = *index
        .get(&highest.0)
        .expect("highest weight lies in its own ball");

    let lookup = |cands: &[Candidate], w: &[i64], grade: i64| -> i64 {
        if grade < 0 {
            return 0;
        }
        let (dom, _, _) = rs.to_dominant(w);
        match index.get(&dom) {
            Some(&i) => cands[i].mults[grade as usize],
            None => 0,
        }
    };

    for n in 0..=max_grade {
        for ci in 0..candidates.len() {
            if ci == top_idx && n == 0 {
                candidates[ci].mults[0] = 1;
                continue;
            }
            let mu = candidates[ci].weight.clone();
            let mut acc: i128 = 0;

            // Horizontal strings: alpha positive, same depth. The walk
            // stops once the string leaves the ball; beyond that every
            // multiplicity is zero because norms keep growing.
            for alpha in &rs.positive_roots {
                let pair_s = rs.pairing_s(&mu, &alpha.dynkin);
                let mut t = 1i64;
                loop {
                    // |mu + t alpha|^2 in S units.
                    let nu_norm = candidates[ci].norm_s + 2 * t * pair_s + t * t * alpha.norm_s;
                    if nu_norm > max_norm_s {
                        break;
                    }
                    let nu: Vec<i64> = mu
                        .iter()
                        .zip(&alpha.dynkin)
                        .map(|(a, b)| a + t * b)
                        .collect();
                    let m = lookup(&candidates, &nu, n);
                    if m != 0 {
                        acc += i128::from(pair_s + t * alpha.norm_s) * i128::from(m);
                    }
                    t += 1;
                }
            }

            // Lifted strings: alpha of either sign raised by m copies of
            // the null direction, landing at depth n - t*m.
            for dm in 1..=n {
                for alpha in &rs.positive_roots {
                    for sign in [1i64, -1] {
                        let pair_s = sign * rs.pairing_s(&mu, &alpha.dynkin);
                        let mut t = 1i64;
                        while t * dm <= n {
                            let nu: Vec<i64> = mu
                                .iter()
                                .zip(&alpha.dynkin)
                                .map(|(a, b)| a + sign * t * b)
                                .collect();
                            let m = lookup(&candidates, &nu, n - t * dm);
                            if m != 0 {
                                let pairing = pair_s + t * alpha.norm_s + s * level * dm;
                                acc += i128::from(pairing) * i128::from(m);
                            }
                            t += 1;
                        }
                    }
                }
            }

            // Imaginary strings: rank-fold null steps straight down.
            let rank = rs.rank as i128;
            for dm in 1..=n {
                let mut t = 1i64;
                while t * dm <= n {
                    let m = candidates[ci].mults[(n - t * dm) as usize];
                    if m != 0 {
                        acc += rank * i128::from(s * level * dm) * i128::from(m);
                    }
                    t += 1;
                }
            }

            let denom = i128::from(top_norm_s - candidates[ci].shifted_norm_s + plane * n);
            let mult = if denom == 0 {
                if acc != 0 {
                    return Err(Error::ZeroDenominator {
                        detail: format!(
                            "weight {:?} at depth {n} of {} level {level} \
                             module {highest}: recursion numerator {acc} \
                             with vanishing norm gap",
                            mu, rs.algebra
                        ),
                    });
                }
                0
            } else {
                let num = 2 * acc;
                assert_eq!(
                    num % denom,
                    0,
                    "multiplicity recursion must divide exactly at {:?} depth {n}",
                    mu
                );
                num / denom
            };
            assert!(
                mult >= 0,
                "negative multiplicity {mult} at {:?} depth {n}",
                mu
            );
            candidates[ci].mults[n as usize] = i64::try_from(mult).expect("multiplicity fits i64");
        }
    }

    let mut table = std::collections::BTreeMap::new();
    for c in &candidates {
        if c.mults.iter().all(|&m| m == 0) {
            continue;
        }
        let terms: Vec<(i64, i64)> = c
            .mults
            .iter()
            .enumerate()
            .filter(|(_, &m)| m != 0)
            .map(|(n, &m)| (n as i64, m))
            .collect();
        table.insert(
            Weight(c.weight.clone()),
            QSeries::from_int_terms(&terms, max_grade + 1),
        );
    }
    Ok(WeightCharacter {
        algebra: rs.algebra,
        level,
        highest: highest.clone(),
        normalization: Normalization::Trace,
        max_grade,
        table,
    })
}

/// One weight's multiplicity series, rebased so its first nonzero
/// coefficient sits at exponent zero.
#[derive(Clone, Debug)]
pub struct StringFunction {
    pub series: QSeries,
    /// Depth at which the weight first appears in the module.
    pub first_grade: i64,
}

/// Extract the string of `mu` (any Weyl representative) from a computed
/// character table.
pub fn string_function(
    rs: &RootSystem,
    character: &WeightCharacter,
    mu: &Weight,
) -> Result<StringFunction> {
    let (dom, _, _) = rs.to_dominant(&mu.0);
    let empty = || Error::EmptyString {
        weight: mu.to_string(),
        max_grade: character.max_grade,
    };
    let entry = character.entry(&Weight(dom)).ok_or_else(empty)?;
    let (first, _) = entry.leading().ok_or_else(empty)?;
    assert!(first.is_integer(), "trace tables have integer grades");
    let first_grade = num_traits::ToPrimitive::to_i64(&first.to_integer()).expect("grade fits i64");
    let series = entry.shift(&-first.clone());
    Ok(StringFunction {
        series,
        first_grade,
    })
}
