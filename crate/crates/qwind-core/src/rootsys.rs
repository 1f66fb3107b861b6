//! Finite simple root systems with exact arithmetic.
//!
//! Covers the seven algebras whose level-1/level-2 coset pairs stay below
//! central charge one: A1, A2, E6, E7, E8, F4, G2. Weights live in the
//! fundamental-weight basis (Dynkin labels), so the label vector of a
//! weight lambda is (lambda, alpha_i-vee) over the simple coroots. The
//! bilinear form is normalized so long roots have squared length 2, and
//! every pairing is carried as an integer after scaling by the per-algebra
//! factor `S` chosen so that S*(weight, weight) is always integral.
//!
//! Node numbering: each exceptional diagram is numbered so its chain runs
//! first and the branch node comes last (E6: chain 1-2-3-4-5 with node 6
//! on node 3; E7: chain 1-..-6 with node 7 on node 3; E8: chain 1-..-7
//! with node 8 on node 5; F4: 1-2=3-4 with nodes 1,2 long; G2: node 1
//! long). The constructor validates the comark pattern this numbering
//! must produce, so a numbering mistake aborts loudly instead of silently
//! permuting fundamental weights.

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// The supported simple Lie algebras.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Algebra {
    A1,
    A2,
    E6,
    E7,
    E8,
    F4,
    G2,
}

impl Algebra {
    pub fn all() -> [Algebra; 7] {
        use Algebra::*;
        [A1, A2, E6, E7, E8, F4, G2]
    }

    pub fn rank(self) -> usize {
        match self {
            Algebra::A1 => 1,
            Algebra::A2 => 2,
            Algebra::E6 => 6,
            Algebra::E7 => 7,
            Algebra::E8 => 8,
            Algebra::F4 => 4,
            Algebra::G2 => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Algebra::A1 => "A1",
            Algebra::A2 => "A2",
            Algebra::E6 => "E6",
            Algebra::E7 => "E7",
            Algebra::E8 => "E8",
            Algebra::F4 => "F4",
            Algebra::G2 => "G2",
        }
    }
}

impl fmt::Display for Algebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algebra {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "A1" => Ok(Algebra::A1),
            "A2" => Ok(Algebra::A2),
            "E6" => Ok(Algebra::E6),
            "E7" => Ok(Algebra::E7),
            "E8" => Ok(Algebra::E8),
            "F4" => Ok(Algebra::F4),
            "G2" => Ok(Algebra::G2),
            _ => Err(Error::UnknownAlgebra {
                name: s.to_string(),
            }),
        }
    }
}

/// A finite weight in the fundamental-weight basis (Dynkin labels).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Weight(pub Vec<i64>);

impl Weight {
    pub fn zero(rank: usize) -> Self {
        Weight(vec![0; rank])
    }

    pub fn fundamental(rank: usize, node: usize) -> Self {
        let mut w = vec![0; rank];
        w[node] = 1;
        Weight(w)
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn add(&self, other: &Weight) -> Weight {
        Weight(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Parse "1,0,2" or "[1,0,2]".
    pub fn parse(input: &str, rank: usize) -> Result<Weight> {
        let trimmed = input.trim().trim_start_matches('[').trim_end_matches(']');
        let coords: std::result::Result<Vec<i64>, _> = trimmed
            .split(',')
            .map(|p| p.trim().parse::<i64>())
            .collect();
        let coords = coords.map_err(|_| Error::InvalidWeight {
            detail: format!("cannot parse {input:?} as integer labels"),
        })?;
        if coords.len() != rank {
            return Err(Error::InvalidWeight {
                detail: format!("expected {rank} labels, got {} in {input:?}", coords.len()),
            });
        }
        Ok(Weight(coords))
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

/// A positive root, in both simple-root and Dynkin coordinates.
#[derive(Clone, Debug)]
pub struct Root {
    pub simple_coords: Vec<i64>,
    pub dynkin: Vec<i64>,
    /// S * (alpha, alpha).
    pub norm_s: i64,
    pub height: i64,
}

/// Exact root-system data for one algebra; immutable after construction.
pub struct RootSystem {
    pub algebra: Algebra,
    pub rank: usize,
    /// a[i][j] = 2 (alpha_i, alpha_j) / (alpha_i, alpha_i); column j holds
    /// the Dynkin labels of alpha_j.
    cartan: Vec<Vec<i64>>,
    /// S * (omega_i, omega_j), the scaled quadratic form on Dynkin labels.
    gram_s: Vec<Vec<i64>>,
    /// Scaling factor making every weight pairing integral.
    pub scale: i64,
    /// Inverse Cartan matrix as inv_num / inv_den (for root-lattice tests).
    inv_num: Vec<Vec<i64>>,
    inv_den: i64,
    pub positive_roots: Vec<Root>,
    /// Highest root in Dynkin labels.
    pub theta: Weight,
    pub marks: Vec<i64>,
    pub comarks: Vec<i64>,
    pub dual_coxeter: i64,
    pub dimension: i64,
    pub rho: Weight,
}

fn cartan_matrix(algebra: Algebra) -> Vec<Vec<i64>> {
    let chain = |n: usize| -> Vec<Vec<i64>> {
        let mut a = vec![vec![0i64; n]; n];
        for i in 0..n {
            a[i][i] = 2;
            if i + 1 < n {
                a[i][i + 1] = -1;
                a[i + 1][i] = -1;
            }
        }
        a
    };
    // Attach the last node to `host` by a single simply-laced edge.
    let branch = |n: usize, host: usize| -> Vec<Vec<i64>> {
        let mut a = chain(n - 1);
        for row in &mut a {
            row.push(0);
        }
        let mut last = vec![0i64; n];
        last[n - 1] = 2;
        a.push(last);
        a[host][n - 1] = -1;
        a[n - 1][host] = -1;
        a
    };
    match algebra {
        Algebra::A1 => vec![vec![2]],
        Algebra::A2 => chain(2),
        Algebra::E6 => branch(6, 2),
        Algebra::E7 => branch(7, 2),
        Algebra::E8 => branch(8, 4),
        Algebra::F4 => {
            let mut a = chain(4);
            // Double edge between nodes 2 and 3; nodes 1,2 long.
            a[2][1] = -2;
            a
        }
        Algebra::G2 => vec![vec![2, -1], vec![-3, 2]],
    }
}

/// Half squared lengths d_i = (alpha_i, alpha_i)/2, normalized so the
/// longest simple root has d = 1. Propagated along edges from the
/// symmetry requirement d_i a_ij = d_j a_ji.
fn half_norms(cartan: &[Vec<i64>]) -> Vec<Rational64> {
    let n = cartan.len();
    let mut d = vec![None::<Rational64>; n];
    d[0] = Some(Rational64::one());
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for j in 0..n {
            if i != j && cartan[i][j] != 0 && d[j].is_none() {
                d[j] = Some(d[i].unwrap() * Rational64::new(cartan[i][j], cartan[j][i]));
                queue.push_back(j);
            }
        }
    }
    let mut d: Vec<Rational64> = d
        .into_iter()
        .map(|x| x.expect("Dynkin diagram must be connected"))
        .collect();
    let max = d.iter().copied().max().unwrap();
    for x in &mut d {
        *x /= max;
    }
    d
}

/// Exact inverse of a small integer matrix, returned as (numerators,
/// common denominator).
fn invert_matrix(a: &[Vec<i64>]) -> (Vec<Vec<Rational64>>, Vec<Vec<i64>>, i64) {
    let n = a.len();
    let mut m: Vec<Vec<Rational64>> = a
        .iter()
        .map(|row| row.iter().map(|&x| Rational64::from_integer(x)).collect())
        .collect();
    let mut inv: Vec<Vec<Rational64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        Rational64::one()
                    } else {
                        Rational64::zero()
                    }
                })
                .collect()
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| !m[r][col].is_zero())
            .expect("Cartan matrix is invertible");
        m.swap(col, pivot);
        inv.swap(col, pivot);
        let p = m[col][col];
        for j in 0..n {
            m[col][j] /= p;
            inv[col][j] /= p;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col];
                for j in 0..n {
                    let mj = m[col][j];
                    let ij = inv[col][j];
                    m[r][j] -= f * mj;
                    inv[r][j] -= f * ij;
                }
            }
        }
    }
    let mut den: i64 = 1;
    for row in &inv {
        for x in row {
            den = den / num_integer::Integer::gcd(&den, x.denom()) * x.denom();
        }
    }
    let num: Vec<Vec<i64>> = inv
        .iter()
        .map(|row| row.iter().map(|x| x.numer() * (den / x.denom())).collect())
        .collect();
    (inv, num, den)
}

impl RootSystem {
    pub fn new(algebra: Algebra) -> RootSystem {
        let rank = algebra.rank();
        let cartan = cartan_matrix(algebra);
        let d = half_norms(&cartan);

        // Quadratic form on Dynkin labels: G = diag(d) * A^{-1}, scaled to
        // integers by S.
        let (inv_rat, inv_num, inv_den) = invert_matrix(&cartan);
        let gram_rat: Vec<Vec<Rational64>> = (0..rank)
            .map(|i| (0..rank).map(|j| d[i] * inv_rat[i][j]).collect())
            .collect();
        for i in 0..rank {
            for j in 0..rank {
                assert_eq!(
                    gram_rat[i][j], gram_rat[j][i],
                    "{algebra}: symmetrized inverse Cartan matrix must be symmetric"
                );
            }
        }
        let mut scale: i64 = 1;
        for row in &gram_rat {
            for x in row {
                scale = scale / num_integer::Integer::gcd(&scale, x.denom()) * x.denom();
            }
        }
        let gram_s: Vec<Vec<i64>> = gram_rat
            .iter()
            .map(|row| {
                row.iter()
                    .map(|x| x.numer() * (scale / x.denom()))
                    .collect()
            })
            .collect();

        // Positive roots by closure: alpha_i-strings through each known
        // root decide whether beta + alpha_i is a root (q = p - <beta,
        // alpha_i-vee> > 0 with p the depth of the string below beta).
        let dynkin_of = |coords: &[i64]| -> Vec<i64> {
            (0..rank)
                .map(|i| (0..rank).map(|k| cartan[i][k] * coords[k]).sum())
                .collect()
        };
        let mut seen: HashSet<Vec<i64>> = HashSet::new();
        let mut layer: Vec<Vec<i64>> = Vec::new();
        for i in 0..rank {
            let mut e = vec![0i64; rank];
            e[i] = 1;
            seen.insert(e.clone());
            layer.push(e);
        }
        let mut all_coords: Vec<Vec<i64>> = layer.clone();
        while !layer.is_empty() {
            let mut next: Vec<Vec<i64>> = Vec::new();
            for beta in &layer {
                let labels = dynkin_of(beta);
                for i in 0..rank {
                    let mut p = 0i64;
                    let mut probe = beta.clone();
                    loop {
                        probe[i] -= 1;
                        if probe[i] >= 0 && seen.contains(&probe) {
                            p += 1;
                        } else {
                            break;
                        }
                    }
                    if p - labels[i] > 0 {
                        let mut up = beta.clone();
                        up[i] += 1;
                        if seen.insert(up.clone()) {
                            next.push(up);
                        }
                    }
                }
            }
            all_coords.extend(next.iter().cloned());
            layer = next;
        }

        let pairing = |x: &[i64], y: &[i64]| -> i64 {
            let mut acc = 0i64;
            for i in 0..rank {
                for j in 0..rank {
                    acc += x[i] * gram_s[i][j] * y[j];
                }
            }
            acc
        };

        let mut positive_roots: Vec<Root> = all_coords
            .into_iter()
            .map(|coords| {
                let dynkin = dynkin_of(&coords);
                let norm_s = pairing(&dynkin, &dynkin);
                let height = coords.iter().sum();
                Root {
                    simple_coords: coords,
                    dynkin,
                    norm_s,
                    height,
                }
            })
            .collect();
        positive_roots.sort_by_key(|r| (r.height, r.simple_coords.clone()));

        let top = positive_roots
            .iter()
            .max_by_key(|r| r.height)
            .expect("nonempty root set");
        let max_height = top.height;
        assert_eq!(
            positive_roots
                .iter()
                .filter(|r| r.height == max_height)
                .count(),
            1,
            "{algebra}: highest root must be unique"
        );
        let marks = top.simple_coords.clone();
        let theta = Weight(top.dynkin.clone());
        assert_eq!(
            pairing(&theta.0, &theta.0),
            2 * scale,
            "{algebra}: highest root must have squared length 2"
        );

        let comarks: Vec<i64> = marks
            .iter()
            .zip(&d)
            .map(|(&mk, &di)| {
                let cm = Rational64::from_integer(mk) * di;
                assert!(cm.is_integer(), "{algebra}: comarks must be integers");
                cm.to_integer()
            })
            .collect();
        let dual_coxeter = 1 + comarks.iter().sum::<i64>();
        let dimension = rank as i64 + 2 * positive_roots.len() as i64;
        let rho = Weight(vec![1; rank]);

        let rs = RootSystem {
            algebra,
            rank,
            cartan,
            gram_s,
            scale,
            inv_num,
            inv_den,
            positive_roots,
            theta,
            marks,
            comarks,
            dual_coxeter,
            dimension,
            rho,
        };
        rs.validate();
        rs
    }

    /// Construction-time cross-checks. The comark pattern is the decisive
    /// one: the branching catalog names fundamental weights by node index,
    /// and those names are only correct if each node carries the comark
    /// its catalog role demands (level-1 weights need comark 1, level-2
    /// children comark 2). A failure here means the node numbering in
    /// `cartan_matrix` drifted, and every downstream label would lie.
    fn validate(&self) {
        let (expect_positive, expect_dim, expect_hvee) = match self.algebra {
            Algebra::A1 => (1, 3, 2),
            Algebra::A2 => (3, 8, 3),
            Algebra::E6 => (36, 78, 12),
            Algebra::E7 => (63, 133, 18),
            Algebra::E8 => (120, 248, 30),
            Algebra::F4 => (24, 52, 9),
            Algebra::G2 => (6, 14, 4),
        };
        assert_eq!(
            self.positive_roots.len(),
            expect_positive,
            "{}",
            self.algebra
        );
        assert_eq!(self.dimension, expect_dim, "{}", self.algebra);
        assert_eq!(self.dual_coxeter, expect_hvee, "{}", self.algebra);

        // Sum of positive roots is 2 rho.
        let mut sum = vec![0i64; self.rank];
        for r in &self.positive_roots {
            for (s, &x) in sum.iter_mut().zip(&r.dynkin) {
                *s += x;
            }
        }
        assert!(
            sum.iter().all(|&s| s == 2),
            "{}: positive roots must sum to 2*rho, got {sum:?}",
            self.algebra
        );

        // (rho, alpha_i-vee) = 1 for every simple root.
        for i in 0..self.rank {
            let alpha = Weight(self.cartan.iter().map(|row| row[i]).collect());
            let norm = self.pairing_s(&alpha.0, &alpha.0);
            assert_eq!(
                2 * self.pairing_s(&self.rho.0, &alpha.0),
                norm,
                "{}: (rho, alpha_{}-vee) must be 1",
                self.algebra,
                i + 1
            );
        }

        // h-vee = 1 + (rho, theta-vee); theta is long so theta-vee = theta.
        assert_eq!(
            self.pairing_s(&self.rho.0, &self.theta.0),
            (self.dual_coxeter - 1) * self.scale,
            "{}: (rho, theta) must equal h-vee minus 1",
            self.algebra
        );

        // Freudenthal's strange formula: |rho|^2 = h-vee * dim / 12.
        assert_eq!(
            12 * self.norm_s(&self.rho.0),
            self.scale * self.dual_coxeter * self.dimension,
            "{}: strange-formula check failed",
            self.algebra
        );

        // Node-numbering pins: (node index from 1, required comark).
        let pins: &[(usize, i64)] = match self.algebra {
            Algebra::A1 => &[(1, 1)],
            Algebra::A2 => &[(1, 1), (2, 1)],
            Algebra::E6 => &[(1, 1), (5, 1), (4, 2), (6, 2)],
            Algebra::E7 => &[(6, 1), (1, 2), (5, 2), (7, 2)],
            Algebra::E8 => &[(1, 2), (7, 2)],
            Algebra::F4 => &[(4, 1), (1, 2), (3, 2)],
            Algebra::G2 => &[(2, 1), (1, 2)],
        };
        for &(node, want) in pins {
            let got = self.comarks[node - 1];
            assert_eq!(
                got, want,
                "{}: node numbering drift: fundamental weight {} must carry \
                 comark {want} for the branching catalog's labels to be \
                 meaningful, found {got} (comarks {:?})",
                self.algebra, node, self.comarks
            );
        }
    }

    pub fn cartan(&self) -> &[Vec<i64>] {
        &self.cartan
    }

    pub fn gram_s(&self) -> &[Vec<i64>] {
        &self.gram_s
    }

    /// S * (x, y) for weights in Dynkin labels; always an integer.
    pub fn pairing_s(&self, x: &[i64], y: &[i64]) -> i64 {
        let mut acc = 0i64;
        for i in 0..self.rank {
            if x[i] == 0 {
                continue;
            }
            let row = &self.gram_s[i];
            let mut inner = 0i64;
            for j in 0..self.rank {
                inner += row[j] * y[j];
            }
            acc += x[i] * inner;
        }
        acc
    }

    pub fn norm_s(&self, x: &[i64]) -> i64 {
        self.pairing_s(x, x)
    }

    /// Exact (x, y) in the normalization with (theta, theta) = 2.
    pub fn inner(&self, x: &[i64], y: &[i64]) -> BigRational {
        BigRational::new(BigInt::from(self.pairing_s(x, y)), BigInt::from(self.scale))
    }

    /// <x, alpha-vee> = 2 (x, alpha) / (alpha, alpha); exact integer.
    pub fn coroot_pairing(&self, x: &[i64], alpha: &Root) -> i64 {
        let twice = 2 * self.pairing_s(x, &alpha.dynkin);
        debug_assert_eq!(twice % alpha.norm_s, 0);
        twice / alpha.norm_s
    }

    pub fn is_dominant(&self, x: &[i64]) -> bool {
        x.iter().all(|&c| c >= 0)
    }

    /// Reflect in the simple root `i` (in place on Dynkin labels).
    fn reflect(&self, x: &mut [i64], i: usize) {
        let c = x[i];
        for (j, xj) in x.iter_mut().enumerate() {
            *xj -= c * self.cartan[j][i];
        }
    }

    /// Dominant representative of the Weyl orbit, the determinant of the
    /// reducing element, and the number of reflections applied.
    pub fn to_dominant(&self, x: &[i64]) -> (Vec<i64>, i64, usize) {
        let mut w = x.to_vec();
        let mut sign = 1i64;
        let mut count = 0usize;
        'outer: loop {
            for i in 0..self.rank {
                if w[i] < 0 {
                    self.reflect(&mut w, i);
                    sign = -sign;
                    count += 1;
                    assert!(count < 1_000_000, "dominant reduction failed to terminate");
                    continue 'outer;
                }
            }
            return (w, sign, count);
        }
    }

    /// Is `x` in the root lattice? Uses the exact inverse Cartan matrix.
    pub fn in_root_lattice(&self, x: &[i64]) -> bool {
        (0..self.rank).all(|i| {
            let num: i64 = (0..self.rank).map(|j| self.inv_num[i][j] * x[j]).sum();
            num % self.inv_den == 0
        })
    }

    /// Weyl dimension formula for the finite irreducible with highest
    /// weight `lambda`.
    pub fn weyl_dimension(&self, lambda: &[i64]) -> BigInt {
        assert!(
            self.is_dominant(lambda),
            "dimension needs a dominant weight"
        );
        let shifted: Vec<i64> = lambda.iter().zip(&self.rho.0).map(|(a, b)| a + b).collect();
        let mut num = BigInt::one();
        let mut den = BigInt::one();
        for alpha in &self.positive_roots {
            num *= BigInt::from(self.pairing_s(&shifted, &alpha.dynkin));
            den *= BigInt::from(self.pairing_s(&self.rho.0, &alpha.dynkin));
        }
        let (q, r) = num_integer::Integer::div_rem(&num, &den);
        assert!(r.is_zero(), "Weyl dimension must divide exactly");
        q
    }

    /// Order of the full Weyl group.
    pub fn weyl_order(&self) -> u128 {
        self.parabolic_order(&(0..self.rank).collect::<Vec<_>>())
    }

    /// Order of the parabolic subgroup generated by the listed nodes,
    /// classified from the induced sub-diagram.
    fn parabolic_order(&self, nodes: &[usize]) -> u128 {
        let set: Vec<usize> = nodes.to_vec();
        let mut unvisited: HashSet<usize> = set.iter().copied().collect();
        let mut order: u128 = 1;
        while let Some(&start) = unvisited.iter().next() {
            // Extract one connected component.
            let mut comp = Vec::new();
            let mut stack = vec![start];
            unvisited.remove(&start);
            while let Some(v) = stack.pop() {
                comp.push(v);
                let adjacent: Vec<usize> = unvisited
                    .iter()
                    .copied()
                    .filter(|&u| self.cartan[v][u] != 0)
                    .collect();
                for u in adjacent {
                    unvisited.remove(&u);
                    stack.push(u);
                }
            }
            order *= self.component_weyl_order(&comp);
        }
        order
    }

    fn component_weyl_order(&self, comp: &[usize]) -> u128 {
        let n = comp.len();
        let factorial = |k: usize| -> u128 { (1..=k as u128).product() };
        if n == 1 {
            return 2;
        }
        let mut degree = vec![0usize; n];
        let mut double_edge: Option<(usize, usize)> = None;
        let mut triple = false;
        for (a, &i) in comp.iter().enumerate() {
            for (b, &j) in comp.iter().enumerate() {
                if a < b && self.cartan[i][j] != 0 {
                    degree[a] += 1;
                    degree[b] += 1;
                    match self.cartan[i][j] * self.cartan[j][i] {
                        1 => {}
                        2 => double_edge = Some((a, b)),
                        3 => triple = true,
                        w => unreachable!("unexpected edge weight {w}"),
                    }
                }
            }
        }
        if triple {
            assert_eq!(n, 2, "triple edge only occurs in G2");
            return 12;
        }
        if let Some((a, b)) = double_edge {
            // A path with one double edge: F4 when the edge is interior,
            // B/C otherwise.
            assert!(degree.iter().all(|&d| d <= 2));
            if degree[a] == 2 && degree[b] == 2 {
                assert_eq!(n, 4, "interior double edge only occurs in F4");
                return 1152;
            }
            return (1u128 << n) * factorial(n);
        }
        // Simply laced: a path is A_n, one branch node is D/E.
        let branch = (0..n).filter(|&v| degree[v] == 3).count();
        if branch == 0 {
            return factorial(n + 1);
        }
        assert_eq!(branch, 1, "diagram has at most one branch node");
        let center = (0..n).find(|&v| degree[v] == 3).unwrap();
        // Arm lengths: walk away from the center along each neighbor.
        let mut arms: Vec<usize> = Vec::new();
        for (b, &j) in comp.iter().enumerate() {
            if b != center && self.cartan[comp[center]][j] != 0 {
                let mut len = 1;
                let mut prev = center;
                let mut cur = b;
                loop {
                    let next = (0..n)
                        .find(|&u| u != prev && u != cur && self.cartan[comp[cur]][comp[u]] != 0);
                    match next {
                        Some(u) => {
                            prev = cur;
                            cur = u;
                            len += 1;
                        }
                        None => break,
                    }
                }
                arms.push(len);
            }
        }
        arms.sort_unstable();
        match arms.as_slice() {
            [1, 1, _] => (1u128 << (n - 1)) * factorial(n),
            [1, 2, 2] => 51_840,
            [1, 2, 3] => 2_903_040,
            [1, 2, 4] => 696_729_600,
            other => unreachable!("unexpected arm pattern {other:?}"),
        }
    }

    /// |W . lambda| for dominant lambda, as the index of the stabilizer
    /// parabolic (generated by the nodes where lambda vanishes).
    pub fn orbit_size(&self, lambda: &[i64]) -> u128 {
        assert!(
            self.is_dominant(lambda),
            "orbit size needs a dominant weight"
        );
        let stabilizer: Vec<usize> = (0..self.rank).filter(|&i| lambda[i] == 0).collect();
        let full = self.weyl_order();
        let stab = self.parabolic_order(&stabilizer);
        assert_eq!(full % stab, 0);
        full / stab
    }

    /// Orbit size by breadth-first closure under simple reflections; the
    /// oracle for [`RootSystem::orbit_size`], with a cap because large
    /// orbits (E7, E8) are far beyond sensible enumeration.
    pub fn orbit_size_bfs(&self, lambda: &[i64], cap: usize) -> Result<usize> {
        let mut seen: HashSet<Vec<i64>> = HashSet::new();
        let mut queue = VecDeque::from([lambda.to_vec()]);
        seen.insert(lambda.to_vec());
        while let Some(w) = queue.pop_front() {
            for i in 0..self.rank {
                if w[i] != 0 {
                    let mut r = w.clone();
                    self.reflect(&mut r, i);
                    if seen.insert(r.clone()) {
                        if seen.len() > cap {
                            return Err(Error::OrbitTooLarge { cap });
                        }
                        queue.push_back(r);
                    }
                }
            }
        }
        Ok(seen.len())
    }

    /// All dominant weights mu congruent to `rep` modulo the root lattice
    /// with S*|mu + shift|^2 <= bound_s, where shift is rho (shifted mode)
    /// or zero. Enumerates coordinates with partial-norm pruning; valid
    /// because every entry of the quadratic form is positive, so the norm
    /// grows monotonically in each coordinate over the dominant cone.
    pub fn dominant_ball(&self, rep: &[i64], rho_shift: bool, bound_s: i64) -> Vec<Weight> {
        debug_assert!(self.gram_s.iter().all(|row| row.iter().all(|&g| g > 0)));
        let shift: Vec<i64> = if rho_shift {
            self.rho.0.clone()
        } else {
            vec![0; self.rank]
        };
        let mut out = Vec::new();
        let mut mu = vec![0i64; self.rank];
        self.ball_recurse(rep, &shift, bound_s, 0, &mut mu, &mut out);
        out
    }

    fn ball_recurse(
        &self,
        rep: &[i64],
        shift: &[i64],
        bound_s: i64,
        idx: usize,
        mu: &mut Vec<i64>,
        out: &mut Vec<Weight>,
    ) {
        if idx == self.rank {
            let nu: Vec<i64> = mu.iter().zip(shift).map(|(a, b)| a + b).collect();
            if self.norm_s(&nu) <= bound_s {
                let diff: Vec<i64> = mu.iter().zip(rep).map(|(a, b)| a - b).collect();
                if self.in_root_lattice(&diff) {
                    out.push(Weight(mu.clone()));
                }
            }
            return;
        }
        let mut v = 0i64;
        loop {
            mu[idx] = v;
            // Minimal completion: remaining coordinates at zero.
            let nu: Vec<i64> = mu[..=idx]
                .iter()
                .zip(&shift[..=idx])
                .map(|(a, b)| a + b)
                .chain(shift[idx + 1..].iter().copied())
                .collect();
            if self.norm_s(&nu) > bound_s {
                mu[idx] = 0;
                return;
            }
            self.ball_recurse(rep, shift, bound_s, idx + 1, mu, out);
            v += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rs(a: Algebra) -> RootSystem {
        RootSystem::new(a)
    }

    #[test]
    fn construction_tables() {
        let expect = [
            (Algebra::A1, 3, 2, 1),
            (Algebra::A2, 8, 3, 3),
            (Algebra::E6, 78, 12, 36),
            (Algebra::E7, 133, 18, 63),
            (Algebra::E8, 248, 30, 120),
            (Algebra::F4, 52, 9, 24),
            (Algebra::G2, 14, 4, 6),
        ];
        for (a, dim, hvee, pos) in expect {
            let r = rs(a);
            assert_eq!(r.dimension, dim);
            assert_eq!(r.dual_coxeter, hvee);
            assert_eq!(r.positive_roots.len(), pos);
        }
    }

    #[test]
    fn comark_vectors() {
        assert_eq!(rs(Algebra::A1).comarks, vec![1]);
        assert_eq!(rs(Algebra::A2).comarks, vec![1, 1]);
        assert_eq!(rs(Algebra::E6).comarks, vec![1, 2, 3, 2, 1, 2]);
        assert_eq!(rs(Algebra::E7).comarks, vec![2, 3, 4, 3, 2, 1, 2]);
        assert_eq!(rs(Algebra::E8).comarks, vec![2, 3, 4, 5, 6, 4, 2, 3]);
        assert_eq!(rs(Algebra::F4).comarks, vec![2, 3, 2, 1]);
        assert_eq!(rs(Algebra::G2).comarks, vec![2, 1]);
    }

    #[test]
    fn marks_and_scale() {
        assert_eq!(rs(Algebra::F4).marks, vec![2, 3, 4, 2]);
        assert_eq!(rs(Algebra::G2).marks, vec![2, 3]);
        assert_eq!(rs(Algebra::E8).marks, vec![2, 3, 4, 5, 6, 4, 2, 3]);
        let scales = [
            (Algebra::A1, 2),
            (Algebra::A2, 3),
            (Algebra::E6, 3),
            (Algebra::E7, 2),
            (Algebra::E8, 1),
            (Algebra::F4, 2),
            (Algebra::G2, 3),
        ];
        for (a, s) in scales {
            assert_eq!(rs(a).scale, s, "{a}");
        }
    }

    #[test]
    fn theta_normalization() {
        for a in Algebra::all() {
            let r = rs(a);
            let two = BigRational::from_integer(BigInt::from(2));
            assert_eq!(r.inner(&r.theta.0, &r.theta.0), two, "{a}");
        }
    }

    #[test]
    fn defining_dualities_a1() {
        let r = rs(Algebra::A1);
        let omega = [1i64];
        let alpha = &r.positive_roots[0];
        assert_eq!(r.coroot_pairing(&omega, alpha), 1);
        assert_eq!(r.coroot_pairing(&r.rho.0, alpha), 1);
        // (omega_1, omega_1) = 1/2 for A1.
        assert_eq!(
            r.inner(&omega, &omega),
            BigRational::new(1.into(), 2.into())
        );
    }

    #[test]
    fn long_short_root_counts() {
        let f4 = rs(Algebra::F4);
        let long = f4.positive_roots.iter().filter(|r| r.norm_s == 4).count();
        let short = f4.positive_roots.iter().filter(|r| r.norm_s == 2).count();
        assert_eq!((long, short), (12, 12));
        let g2 = rs(Algebra::G2);
        let long = g2.positive_roots.iter().filter(|r| r.norm_s == 6).count();
        let short = g2.positive_roots.iter().filter(|r| r.norm_s == 2).count();
        assert_eq!((long, short), (3, 3));
    }

    #[test]
    fn to_dominant_basics() {
        let r = rs(Algebra::A1);
        let (w, sign, n) = r.to_dominant(&[-2]);
        assert_eq!((w.as_slice(), sign, n), (&[2i64][..], -1, 1));
        let (w, sign, n) = r.to_dominant(&[3]);
        assert_eq!((w.as_slice(), sign, n), (&[3i64][..], 1, 0));
    }

    #[test]
    fn to_dominant_preserves_norm() {
        // A deterministic spread of weights, including far-from-dominant
        // ones, across all algebras.
        for a in Algebra::all() {
            let r = rs(a);
            let mut state = 0x9e3779b97f4a7c15u64;
            for _ in 0..40 {
                let coords: Vec<i64> = (0..r.rank)
                    .map(|_| {
                        state = state
                            .wrapping_mul(6364136223846793005)
                            .wrapping_add(1442695040888963407);
                        ((state >> 33) % 11) as i64 - 5
                    })
                    .collect();
                let (dom, sign, _) = r.to_dominant(&coords);
                assert!(r.is_dominant(&dom));
                assert_eq!(r.norm_s(&coords), r.norm_s(&dom), "{a} {coords:?}");
                assert!(sign == 1 || sign == -1);
                let (again, s2, n2) = r.to_dominant(&dom);
                assert_eq!((again, s2, n2), (dom, 1, 0));
            }
        }
    }

    #[test]
    fn weyl_orders() {
        let expect = [
            (Algebra::A1, 2u128),
            (Algebra::A2, 6),
            (Algebra::E6, 51_840),
            (Algebra::E7, 2_903_040),
            (Algebra::E8, 696_729_600),
            (Algebra::F4, 1_152),
            (Algebra::G2, 12),
        ];
        for (a, w) in expect {
            assert_eq!(rs(a).weyl_order(), w, "{a}");
        }
    }

    #[test]
    fn orbit_sizes_match_bfs() {
        let cases: Vec<(Algebra, Vec<i64>)> = vec![
            (Algebra::A1, vec![0]),
            (Algebra::A1, vec![1]),
            (Algebra::A2, vec![1, 0]),
            (Algebra::A2, vec![1, 1]),
            (Algebra::A2, vec![2, 1]),
            (Algebra::G2, vec![1, 0]),
            (Algebra::G2, vec![0, 1]),
            (Algebra::G2, vec![2, 1]),
            (Algebra::F4, vec![1, 0, 0, 0]),
            (Algebra::F4, vec![0, 0, 0, 1]),
            (Algebra::F4, vec![1, 1, 1, 1]),
            (Algebra::E6, vec![1, 0, 0, 0, 0, 0]),
            (Algebra::E6, vec![0, 0, 0, 0, 1, 0]),
            (Algebra::E6, vec![0, 0, 0, 0, 0, 1]),
            (Algebra::E7, vec![0, 0, 0, 0, 0, 1, 0]),
        ];
        for (a, w) in cases {
            let r = rs(a);
            let fast = r.orbit_size(&w);
            let slow = r.orbit_size_bfs(&w, 2_000_000).unwrap() as u128;
            assert_eq!(fast, slow, "{a} {w:?}");
        }
    }

    #[test]
    fn orbit_size_examples() {
        let e8 = rs(Algebra::E8);
        assert_eq!(e8.orbit_size(&e8.theta.0.clone()), 240);
        assert_eq!(e8.orbit_size_bfs(&e8.theta.0.clone(), 1_000).unwrap(), 240);
        assert_eq!(e8.orbit_size(&[0; 8]), 1);
        let a1 = rs(Algebra::A1);
        assert_eq!(a1.orbit_size(&[1]), 2);
        // E7's 56: the orbit of the level-1 fundamental.
        let e7 = rs(Algebra::E7);
        assert_eq!(e7.orbit_size(&[0, 0, 0, 0, 0, 1, 0]), 56);
    }

    #[test]
    fn orbit_cap_is_enforced() {
        let f4 = rs(Algebra::F4);
        assert!(matches!(
            f4.orbit_size_bfs(&[1, 1, 1, 1], 100),
            Err(Error::OrbitTooLarge { cap: 100 })
        ));
    }

    #[test]
    fn weyl_dimensions() {
        let cases: Vec<(Algebra, Vec<i64>, i64)> = vec![
            (Algebra::A1, vec![1], 2),
            (Algebra::A1, vec![2], 3),
            (Algebra::A2, vec![1, 0], 3),
            (Algebra::A2, vec![1, 1], 8),
            (Algebra::G2, vec![1, 0], 14),
            (Algebra::G2, vec![0, 1], 7),
            (Algebra::F4, vec![0, 0, 0, 1], 26),
            (Algebra::F4, vec![1, 0, 0, 0], 52),
            (Algebra::E6, vec![1, 0, 0, 0, 0, 0], 27),
            (Algebra::E6, vec![0, 0, 0, 0, 0, 1], 78),
            (Algebra::E7, vec![0, 0, 0, 0, 0, 1, 0], 56),
            (Algebra::E7, vec![1, 0, 0, 0, 0, 0, 0], 133),
            (Algebra::E8, vec![1, 0, 0, 0, 0, 0, 0, 0], 248),
            (Algebra::E8, vec![0, 0, 0, 0, 0, 0, 1, 0], 3875),
        ];
        for (a, w, dim) in cases {
            assert_eq!(rs(a).weyl_dimension(&w), BigInt::from(dim), "{a} {w:?}");
        }
    }

    #[test]
    fn adjoint_is_theta() {
        for a in Algebra::all() {
            let r = rs(a);
            assert_eq!(
                r.weyl_dimension(&r.theta.0.clone()),
                BigInt::from(r.dimension),
                "{a}"
            );
        }
    }

    #[test]
    fn root_lattice_membership() {
        let a2 = rs(Algebra::A2);
        // alpha_1 = 2 omega_1 - omega_2.
        assert!(a2.in_root_lattice(&[2, -1]));
        assert!(!a2.in_root_lattice(&[1, 0]));
        let e8 = rs(Algebra::E8);
        // E8 is self-dual: every weight lies in the root lattice.
        assert!(e8.in_root_lattice(&[1, 0, 0, 0, 0, 0, 0, 0]));
        let e7 = rs(Algebra::E7);
        assert!(!e7.in_root_lattice(&[0, 0, 0, 0, 0, 1, 0]));
        assert!(e7.in_root_lattice(&[1, 0, 0, 0, 0, 0, 0]));
    }

    #[test]
    fn dominant_ball_a1() {
        let a1 = rs(Algebra::A1);
        // S=2: weights n*omega with 2*|n*omega|^2 = n^2 <= 9 and n even.
        let ball = a1.dominant_ball(&[0], false, 9);
        let coords: Vec<i64> = ball.iter().map(|w| w.0[0]).collect();
        assert_eq!(coords, vec![0, 2]);
        // Shifted mode: 2*|n+1|^2/2 ... ball on (n+1)^2 <= 18.
        let ball = a1.dominant_ball(&[1], true, 18);
        let coords: Vec<i64> = ball.iter().map(|w| w.0[0]).collect();
        assert_eq!(coords, vec![1, 3]);
    }

    #[test]
    fn dominant_ball_counts_match_filter() {
        // Cross-check the pruned enumeration against a plain box scan.
        let g2 = rs(Algebra::G2);
        let bound = 60;
        let ball = g2.dominant_ball(&[0, 0], true, bound);
        let mut brute = Vec::new();
        for a in 0..8 {
            for b in 0..8 {
                let mu = [a, b];
                let nu = [a + 1, b + 1];
                if g2.norm_s(&nu) <= bound && g2.in_root_lattice(&mu) {
                    brute.push(Weight(vec![a, b]));
                }
            }
        }
        let mut ball = ball;
        ball.sort();
        brute.sort();
        assert_eq!(ball, brute);
    }

    #[test]
    fn weight_parsing() {
        assert_eq!(Weight::parse("1,0,2", 3).unwrap(), Weight(vec![1, 0, 2]));
        assert_eq!(Weight::parse("[0,1]", 2).unwrap(), Weight(vec![0, 1]));
        assert!(Weight::parse("1,2", 3).is_err());
        assert!(Weight::parse("a,b", 2).is_err());
        assert_eq!(Weight(vec![1, 0]).to_string(), "[1,0]");
    }

    #[test]
    fn algebra_parsing() {
        assert_eq!("e8".parse::<Algebra>().unwrap(), Algebra::E8);
        assert!("B2".parse::<Algebra>().is_err());
    }
}
