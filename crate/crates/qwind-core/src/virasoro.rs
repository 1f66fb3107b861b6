//! Unitary minimal models: Kac tables, characters, and an independent
//! null-vector oracle.
//!
//! Characters are produced by the alternating theta sum over the shifted
//! weight lattice divided by Euler's product. The oracle computes Verma
//! module Gram matrices directly from the commutation relations and
//! counts surviving states by exact rank, so character coefficients can
//! be cross-checked without trusting the closed form.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::affine::Normalization;
use crate::qseries::QSeries;
use crate::{Error, Result};

fn big(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Central charge c = 1 - 6/(m(m+1)).
pub fn central_charge(m: i64) -> BigRational {
    assert!(m >= 2, "minimal models start at m = 2");
    BigRational::one() - big(6) / big(m * (m + 1))
}

/// A Kac label (r, s) of the m-th unitary minimal model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MinimalModelLabel {
    pub m: i64,
    pub r: i64,
    pub s: i64,
}

impl MinimalModelLabel {
    pub fn new(m: i64, r: i64, s: i64) -> Result<Self> {
        if m < 2 || r < 1 || r > m - 1 || s < 1 || s > m {
            return Err(Error::OutOfKacTable { m, r, s });
        }
        Ok(MinimalModelLabel { m, r, s })
    }

    /// The other label naming the same representation.
    pub fn partner(self) -> Self {
        MinimalModelLabel {
            m: self.m,
            r: self.m - self.r,
            s: self.m + 1 - self.s,
        }
    }

    /// The lexicographically smaller of the label and its partner.
    pub fn canonical(self) -> Self {
        let p = self.partner();
        if (p.r, p.s) < (self.r, self.s) {
            p
        } else {
            self
        }
    }

    /// h = (((m+1)r - ms)^2 - 1) / (4m(m+1)).
    pub fn conformal_weight(self) -> BigRational {
        let a = (self.m + 1) * self.r - self.m * self.s;
        BigRational::new(
            BigInt::from(a * a - 1),
            BigInt::from(4 * self.m * (self.m + 1)),
        )
    }
}

/// All canonical labels of the m-th model, sorted; m(m-1)/2 of them.
pub fn kac_table(m: i64) -> Result<Vec<MinimalModelLabel>> {
    if m < 2 {
        return Err(Error::OutOfKacTable { m, r: 1, s: 1 });
    }
    let mut out = Vec::new();
    for r in 1..m {
        for s in 1..=m {
            let label = MinimalModelLabel { m, r, s };
            if label.canonical() == label {
                out.push(label);
            }
        }
    }
    out.sort();
    Ok(out)
}

/// Character of the (r, s) representation, complete through `grades`
/// powers above the leading term. Trace normalization starts the series
/// at exponent 0; normalized shifts it to h - c/24.
pub fn minimal_character(
    label: MinimalModelLabel,
    grades: i64,
    normalization: Normalization,
) -> QSeries {
    assert!(grades >= 0);
    let (m, r, s) = (label.m, label.r, label.s);
    let period = m * (m + 1);
    let a = (m + 1) * r - m * s;
    let b = (m + 1) * r + m * s;
    // Exponents relative to h: the A branch contributes period*t^2 + t*a,
    // the B branch period*t^2 + t*b + r*s, both nonnegative for all t.
    let mut terms: Vec<(i64, i64)> = Vec::new();
    for t in -(grades + 2)..=(grades + 2) {
        let ea = period * t * t + t * a;
        if (0..=grades).contains(&ea) {
            terms.push((ea, 1));
        }
        let eb = period * t * t + t * b + r * s;
        if (0..=grades).contains(&eb) {
            terms.push((eb, -1));
        }
    }
    let numerator = QSeries::from_int_terms(&terms, grades + 1);
    let phi_inv = QSeries::euler_phi(grades as u64)
        .invert()
        .expect("phi has unit leading coefficient");
    let trace = numerator.mul(&phi_inv);
    debug_assert_eq!(
        trace.leading().map(|(e, c)| (e.clone(), c.clone())),
        Some((BigRational::zero(), BigInt::one()))
    );
    match normalization {
        Normalization::Trace => trace,
        Normalization::Normalized => {
            let shift = label.conformal_weight() - central_charge(m) / big(24);
            trace.shift(&shift)
        }
    }
}

/// Number of linearly independent descendants at depth `n` of a Virasoro
/// highest-weight vector with the given c and h: the rank of the exact
/// Shapovalov Gram matrix on lowering monomials. Supported for n <= 6,
/// which is as deep as the cross-checks need; the basis grows as p(n).
pub fn shapovalov_rank_oracle(c: &BigRational, h: &BigRational, n: usize) -> usize {
    assert!(n <= 6, "oracle is budgeted for depth at most 6");
    if n == 0 {
        return 1;
    }
    let parts = partitions_desc(n as u32);
    let dim = parts.len();
    let mut gram = vec![vec![BigRational::zero(); dim]; dim];
    for (i, mu) in parts.iter().enumerate() {
        for (j, la) in parts.iter().enumerate() {
            if i > j {
                gram[i][j] = gram[j][i].clone();
                continue;
            }
            let mut state: State = BTreeMap::new();
            state.insert(la.clone(), BigRational::one());
            // <mu-state | la-state>: the adjoint of L_{-mu_1}...L_{-mu_k}
            // acts as L_{mu_k}...applied rightmost-first, so the largest
            // part is applied first.
            for &p in mu {
                state = apply_raising(&state, p, c, h);
            }
            gram[i][j] = state.get(&Vec::new()).cloned().unwrap_or_default();
        }
    }
    rank(gram)
}

type State = BTreeMap<Vec<u32>, BigRational>;

fn partitions_desc(n: u32) -> Vec<Vec<u32>> {
    fn recurse(n: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if n == 0 {
            out.push(cur.clone());
            return;
        }
        let mut p = max.min(n);
        while p >= 1 {
            cur.push(p);
            recurse(n - p, p, cur, out);
            cur.pop();
            p -= 1;
        }
    }
    let mut out = Vec::new();
    recurse(n, n, &mut Vec::new(), &mut out);
    out
}

fn add_term(state: &mut State, mono: Vec<u32>, coeff: BigRational) {
    if coeff.is_zero() {
        return;
    }
    let entry = state.entry(mono).or_insert_with(BigRational::zero);
    *entry += coeff;
    if entry.is_zero() {
        // Keep states sparse; a stale zero would still be harmless.
        return;
    }
}

/// Normal-order L_{-a} * (descending monomial) using
/// [L_{-a}, L_{-b}] = (b - a) L_{-(a+b)}.
fn insert_lowering(mono: &[u32], a: u32, coeff: &BigRational, out: &mut State) {
    if mono.is_empty() || a >= mono[0] {
        let mut v = Vec::with_capacity(mono.len() + 1);
        v.push(a);
        v.extend_from_slice(mono);
        add_term(out, v, coeff.clone());
        return;
    }
    let b = mono[0];
    let rest = &mono[1..];
    // L_{-a} L_{-b} = L_{-b} L_{-a} + (b - a) L_{-(a+b)}.
    let mut swapped: State = BTreeMap::new();
    insert_lowering(rest, a, coeff, &mut swapped);
    for (sub, cf) in swapped {
        let mut v = Vec::with_capacity(sub.len() + 1);
        v.push(b);
        v.extend_from_slice(&sub);
        add_term(out, v, cf);
    }
    let factor = big(i64::from(b) - i64::from(a));
    insert_lowering(rest, a + b, &(coeff * factor), out);
}

/// Apply L_m (m >= 1) to a normal-ordered state over |h>, using
/// [L_m, L_{-n}] = (m + n) L_{m-n} + (c/12) m (m^2 - 1) delta_{m,n}
/// and L_{-1}... annihilation of |h> by all positive modes.
fn apply_raising(state: &State, m: u32, c: &BigRational, h: &BigRational) -> State {
    let mut out: State = BTreeMap::new();
    for (mono, coeff) in state {
        raise_monomial(mono, m, c, h, coeff, &mut out);
    }
    out
}

fn raise_monomial(
    mono: &[u32],
    m: u32,
    c: &BigRational,
    h: &BigRational,
    coeff: &BigRational,
    out: &mut State,
) {
    if mono.is_empty() {
        // L_m |h> = 0 for m >= 1.
        return;
    }
    let n = mono[0];
    let rest = &mono[1..];
    // Commute L_m through L_{-n}: first the reordered term
    // L_{-n} (L_m rest), then the commutator acting on rest.
    let mut inner: State = BTreeMap::new();
    raise_monomial(rest, m, c, h, coeff, &mut inner);
    for (sub, cf) in inner {
        insert_lowering(&sub, n, &cf, out);
    }
    let mn = big(i64::from(m) + i64::from(n));
    if m > n {
        raise_monomial(rest, m - n, c, h, &(coeff * &mn), out);
    } else if m == n {
        let degree: u32 = rest.iter().sum();
        let l0 = h + big(i64::from(degree));
        let central = c / big(12) * big(i64::from(m)) * big(i64::from(m) * i64::from(m) - 1);
        add_term(out, rest.to_vec(), coeff * (mn * l0 + central));
    } else {
        insert_lowering(rest, n - m, &(coeff * mn), out);
    }
}

fn rank(mut mat: Vec<Vec<BigRational>>) -> usize {
    let rows = mat.len();
    if rows == 0 {
        return 0;
    }
    let cols = mat[0].len();
    let mut rank = 0;
    let mut row = 0;
    for col in 0..cols {
        let pivot = (row..rows).find(|&r| !mat[r][col].is_zero());
        let Some(p) = pivot else { continue };
        mat.swap(row, p);
        let inv = mat[row][col].clone();
        for r in row + 1..rows {
            if !mat[r][col].is_zero() {
                let f = &mat[r][col] / &inv;
                for cc in col..cols {
                    let sub = &f * &mat[row][cc];
                    mat[r][cc] -= sub;
                }
            }
        }
        rank += 1;
        row += 1;
        if row == rows {
            break;
        }
    }
    rank
}
