//! Shared fixtures for the benchmarks.

use repmap_core::Params;

/// The certified chaotic member used throughout the docs.
pub fn certified() -> Params {
    Params::new(30.0, 1.0 / 3.0).expect("valid parameters")
}

/// A member with two coexisting period-4 attractors.
pub fn bistable() -> Params {
    Params::new(19.06, 0.3961).expect("valid parameters")
}

/// `n` interior points of `(0, 1)`, evenly spaced.
pub fn unit_grid(n: usize) -> Vec<f64> {
    (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect()
}
