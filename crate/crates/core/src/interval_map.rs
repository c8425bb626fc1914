//! The minimal interface the periodic-orbit search needs from a map.

use crate::conjugacy::{h_inv, h_unchecked};
use crate::map::{critical_points, logistic, Params};

/// Logit-chart range used when the map has no absorbing interval.
const MONOTONE_LOGIT_SPAN: f64 = 36.0;

/// A continuous self-map of an interval with a known derivative.
///
/// Implementations must be stateless so that grids can be evaluated in
/// parallel.
pub trait IntervalMap: Sync {
    /// `f(x)`, or NaN where `f` is undefined.
    fn apply(&self, x: f64) -> f64;

    fn derivative(&self, x: f64) -> f64;

    /// The closed interval scanned for periodic points.
    fn search_interval(&self) -> (f64, f64);

    /// Increasing coordinate `u` in which the periodic-orbit search runs.
    /// Charts that keep full precision where `x` loses it (e.g. near an
    /// endpoint) let orbits through such regions be resolved.
    fn to_chart(&self, x: f64) -> f64 {
        x
    }

    /// Inverse of [`to_chart`](IntervalMap::to_chart).
    fn chart_inverse(&self, u: f64) -> f64 {
        u
    }

    /// The map in chart coordinates.
    fn chart_apply(&self, u: f64) -> f64 {
        self.to_chart(self.apply(self.chart_inverse(u)))
    }

    /// Derivative of [`chart_apply`](IntervalMap::chart_apply). Its product
    /// along a cycle is the cycle's multiplier.
    fn chart_derivative(&self, u: f64) -> f64 {
        self.derivative(self.chart_inverse(u))
    }

    /// [`search_interval`](IntervalMap::search_interval) in chart coordinates.
    fn chart_interval(&self) -> (f64, f64) {
        let (lo, hi) = self.search_interval();
        (self.to_chart(lo), self.to_chart(hi))
    }

    /// Fixed points known exactly; the search divides them out of `f^n(x) - x`
    /// so that nearby orbits are not masked by them.
    fn known_fixed_points(&self) -> Vec<f64> {
        Vec::new()
    }
}

impl IntervalMap for Params {
    #[inline]
    fn apply(&self, x: f64) -> f64 {
        Params::apply(self, x)
    }

    #[inline]
    fn derivative(&self, x: f64) -> f64 {
        self.slope(x)
    }

    /// `[f_min, f_max]` widened to contain `b`, which absorbs every orbit of
    /// `(0, 1)` after one step. For `a <= 4` a logit window on `(0, 1)`.
    fn search_interval(&self) -> (f64, f64) {
        match critical_points(self) {
            Ok(cp) => (
                cp.f_min.min(self.b()).max(f64::MIN_POSITIVE),
                cp.f_max.max(self.b()).min(1.0 - f64::EPSILON),
            ),
            Err(_) => (h_inv(MONOTONE_LOGIT_SPAN), h_inv(-MONOTONE_LOGIT_SPAN)),
        }
    }

    /// The logit `u = ln(x / (1 - x))`, in which the map is
    /// `u - a (x(u) - b)`. Orbits passing within `1e-8` of `1` keep full
    /// precision there, and the layers near `0` get as many grid cells as
    /// the bulk.
    fn to_chart(&self, x: f64) -> f64 {
        -h_unchecked(x)
    }

    fn chart_inverse(&self, u: f64) -> f64 {
        logistic(-u).0
    }

    fn chart_apply(&self, u: f64) -> f64 {
        u - self.a() * (logistic(-u).0 - self.b())
    }

    fn chart_derivative(&self, u: f64) -> f64 {
        let (x, one_minus_x) = logistic(-u);
        1.0 - self.a() * x * one_minus_x
    }

    /// Exact logit images of the turning points, so the interval does not
    /// collapse when `f_max` rounds to `1`.
    fn chart_interval(&self) -> (f64, f64) {
        match critical_points(self) {
            Ok(cp) => {
                let u_b = self.to_chart(self.b());
                let low = self.chart_apply(self.to_chart(cp.x_min));
                let high = self.chart_apply(self.to_chart(cp.x_max));
                (low.min(u_b), high.max(u_b))
            }
            Err(_) => (-MONOTONE_LOGIT_SPAN, MONOTONE_LOGIT_SPAN),
        }
    }

    fn known_fixed_points(&self) -> Vec<f64> {
        vec![self.b()]
    }
}
