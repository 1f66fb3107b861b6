//! Shared fixtures for the criterion benchmarks: small, representative
//! workloads pinned here so the bench targets stay declarative.

use qwind_core::qseries::QSeries;
use qwind_core::{Algebra, RootSystem, Weight};

/// A dense integer series: the inverse of phi(q)^8 known through q^order.
pub fn dense_series(order: u64) -> QSeries {
    QSeries::euler_phi(order)
        .pow(8)
        .invert()
        .expect("unit leading coefficient")
}

pub fn root_system(algebra: Algebra) -> RootSystem {
    RootSystem::new(algebra)
}

/// Highest weight used by the character benchmarks: the adjoint-side
/// fundamental of G2 at level 2 exercises both root lengths.
pub fn g2_top() -> Weight {
    Weight(vec![1, 0])
}

pub fn e6_top() -> Weight {
    Weight(vec![1, 0, 0, 0, 0, 0])
}
