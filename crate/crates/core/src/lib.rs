//! Dynamics of the replicator map `f(x) = x / (x + (1 - x) e^{a (x - b)})`.
//!
//! - [`map`]: evaluation, fixed and critical points, Schwarzian derivative.
//! - [`conjugacy`]: the logit chart in which `f` becomes `g(y) = y + a/(e^y + 1) - a b`.
//! - [`horseshoe`]: certification of a two-interval horseshoe for `g` and its
//!   coding by binary words without two adjacent ones.
//! - [`orbits`]: periodic orbits, attractors, Lyapunov exponents, bifurcation scans.
//! - [`meanclass`]: maps `H^-1(H(x) + x - b)` whose periodic orbits all have mean `b`.

// Negated float comparisons are deliberate: NaN must fail every check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod conjugacy;
pub mod error;
pub mod horseshoe;
pub mod interval_map;
pub mod map;
pub mod meanclass;
pub mod orbits;
mod roots;

pub use conjugacy::{GCriticalData, YPoint};
pub use error::{Error, Result};
pub use horseshoe::{CylinderInterval, Horseshoe, HorseshoeCertificate, ItineraryWord, Landmarks};
pub use interval_map::IntervalMap;
pub use map::{CriticalPoints, FixedPointReport, Params, Stability};
pub use meanclass::{BirkhoffReport, InducedMap, MeanMapSpec, Potential};
pub use orbits::{Attractor, AttractorOptions, BifurcationSample, PeriodicOrbit};
