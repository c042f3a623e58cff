//! Shared inputs for the benchmarks.

use orient_core::analysis::uniform_grid;
use orient_core::{encode, Angle, ReprScheme, ReprVector};

/// Evenly spaced angles used by every benchmark.
pub fn angles(n: usize) -> Vec<Angle> {
    uniform_grid(n)
}

pub fn encoded(scheme: &ReprScheme, n: usize) -> Vec<ReprVector> {
    angles(n).iter().map(|&t| encode(scheme, t)).collect()
}
