//! Exact-arithmetic engine for affine Lie algebra characters, string
//! functions, Virasoro minimal-model characters, and coset branching
//! verification, with every quantity carried as a truncated q-series over
//! arbitrary-precision integers.
//!
//! The crate is layered bottom-up:
//!
//! * [`qseries`]: truncated formal q-series with rational exponent offsets.
//! * [`rootsys`]: finite root systems (A1, A2, E6, E7, E8, F4, G2), exact
//!   inner products, Weyl machinery, orbit counting.
//! * [`affine`]: affine weights, central charges, conformal dimensions,
//!   weight-graded characters, the winding transform, specialization.
//! * [`freudenthal`]: the grade-by-grade affine multiplicity engine.
//! * [`virasoro`]: unitary minimal models, Kac table, characters, and an
//!   independent Shapovalov-rank oracle.
//! * [`coset`]: the branching catalog and the verification engine.
//!
//! No floating point is used anywhere; failures surface as [`Error`]
//! values, and internal exactness violations (a division that should be
//! exact but is not) panic rather than round.

pub mod affine;
pub mod coset;
pub mod freudenthal;
pub mod qseries;
pub mod rootsys;
pub mod virasoro;

pub use affine::{AffineWeight, Normalization, WeightCharacter};
pub use coset::{catalog, verify_case, verify_identity, verify_projection, CosetCase};
pub use freudenthal::{string_function, weight_character, StringFunction};
pub use qseries::{Parity, QSeries};
pub use rootsys::{Algebra, Root, RootSystem, Weight};
pub use virasoro::MinimalModelLabel;

use thiserror::Error;

/// Crate-wide error type. Anything representable as a caller mistake or a
/// legitimately unsupported request is an `Error`; violations of internal
/// invariants panic instead.
#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot invert a series whose leading coefficient {found} is not \u{b1}1")]
    NonUnitLeadingCoefficient { found: String },

    #[error("series has a term at non-integer exponent {exponent}; parity split is undefined")]
    NonIntegerExponents { exponent: String },

    #[error("cannot parse {input:?} as an exact rational")]
    BadRational { input: String },

    #[error("unknown algebra {name:?}; expected one of A1, A2, E6, E7, E8, F4, G2")]
    UnknownAlgebra { name: String },

    #[error("invalid weight: {detail}")]
    InvalidWeight { detail: String },

    #[error("weight {weight} is not integrable at level {level} for {algebra}: {detail}")]
    NotIntegrable {
        algebra: String,
        level: i64,
        weight: String,
        detail: String,
    },

    #[error("Kac label (r={r}, s={s}) lies outside the m={m} table (need 1 <= r <= m-1 and 1 <= s <= m)")]
    OutOfKacTable { m: i64, r: i64, s: i64 },

    #[error("weight {weight} does not occur in the module through grade {max_grade}")]
    EmptyString { weight: String, max_grade: i64 },

    #[error("Weyl orbit enumeration exceeded the cap of {cap} points")]
    OrbitTooLarge { cap: usize },

    #[error(
        "multiplicity recursion hit a vanishing denominator with nonzero numerator at {detail}"
    )]
    ZeroDenominator { detail: String },

    #[error("requested order {requested} exceeds the computed truncation {available}")]
    TruncationTooShallow {
        requested: String,
        available: String,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
