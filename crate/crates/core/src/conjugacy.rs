//! The logit chart `y = h(x) = ln((1 - x) / x)` and the conjugate map
//! `g(y) = y + a / (e^y + 1) - a b`, with `g = h o f o h^-1`.
//!
//! `h` is decreasing, so `x -> 0` corresponds to `y -> +inf`, and the local
//! maximum `x_max` of `f` corresponds to the local minimum `y_min` of `g`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::map::{logistic, Params};

/// A point in the conjugate coordinate.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct YPoint(pub f64);

impl YPoint {
    pub fn to_x(self) -> f64 {
        h_inv(self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GCriticalData {
    pub y_max: f64,
    pub y_min: f64,
    pub g_min: f64,
    pub g_max: f64,
    /// The unique fixed point `ln((1 - b) / b)`.
    pub y0: f64,
}

pub fn h(x: f64) -> Result<f64> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::domain("x", x, "(0, 1)"));
    }
    Ok(h_unchecked(x))
}

#[inline]
pub(crate) fn h_unchecked(x: f64) -> f64 {
    (-x).ln_1p() - x.ln()
}

/// `1 / (e^y + 1)`; strictly positive for `y <= 700`.
#[inline]
pub fn h_inv(y: f64) -> f64 {
    logistic(y).0
}

/// `(h_inv(y), 1 - h_inv(y))`, each to full relative precision.
#[inline]
pub fn h_inv_pair(y: f64) -> (f64, f64) {
    logistic(y)
}

/// `h(x)` from `x` and `1 - x` supplied separately, for points too close to
/// one for `1 - x` to be formed from `x`.
#[inline]
pub fn h_from_pair(x: f64, one_minus_x: f64) -> f64 {
    one_minus_x.ln() - x.ln()
}

#[inline]
pub fn eval_g(p: &Params, y: f64) -> f64 {
    y + p.a() * h_inv(y) - p.a() * p.b()
}

/// `1 - a s (1 - s)` with `s = 1 / (e^y + 1)`.
#[inline]
pub fn eval_g_prime(p: &Params, y: f64) -> f64 {
    let (s, c) = logistic(y);
    1.0 - p.a() * s * c
}

/// `a e^y (e^y - 1) / (e^y + 1)^3`, written as `a s (1 - s) (1 - 2 s)`.
#[inline]
pub fn eval_g_second(p: &Params, y: f64) -> f64 {
    let (s, c) = logistic(y);
    p.a() * s * c * (c - s)
}

/// Closed-form turning points of `g`. `y_max` is taken as `-y_min`, which is
/// exact: the two logarithm arguments multiply to one.
pub fn g_critical_data(p: &Params) -> Result<GCriticalData> {
    if !p.is_unimodal_regime() {
        return Err(Error::MonotoneRegime { a: p.a() });
    }
    let a = p.a();
    let y_min = (0.5 * a - 1.0 + (0.25 * a * a - a).sqrt()).ln();
    let y_max = -y_min;
    Ok(GCriticalData {
        y_max,
        y_min,
        g_min: eval_g(p, y_min),
        g_max: eval_g(p, y_max),
        y0: fixed_point_y(p),
    })
}

pub fn fixed_point_y(p: &Params) -> f64 {
    h_unchecked(p.b())
}
