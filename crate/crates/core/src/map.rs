//! The two-parameter replicator map
//!
//! ```text
//! f(x) = x / (x + (1 - x) exp(a (x - b)))
//! ```
//!
//! on `[0, 1]`. Evaluation goes through the logit form
//! `f(x) = 1 / (1 + exp(u))`, `u = a (x - b) + ln((1 - x) / x)`, which never
//! forms `exp(a (x - b))` and therefore stays finite for any `a`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Multipliers within this distance of modulus one are classified neutral.
pub const NEUTRAL_BAND: f64 = 1e-9;

/// One member `(a, b)` of the family. Immutable once validated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params {
    a: f64,
    b: f64,
}

impl Params {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !a.is_finite() || a <= 0.0 {
            return Err(Error::InvalidParams {
                a,
                b,
                reason: "a must be positive and finite",
            });
        }
        if !b.is_finite() || b <= 0.0 || b >= 1.0 {
            return Err(Error::InvalidParams {
                a,
                b,
                reason: "b must lie in (0, 1)",
            });
        }
        Ok(Params { a, b })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// `a > 4`: the map has a local maximum and a local minimum.
    pub fn is_unimodal_regime(&self) -> bool {
        self.a > 4.0
    }

    /// The interior fixed point `b` has multiplier below -1.
    pub fn is_fixed_point_unstable(&self) -> bool {
        self.a > period_doubling_threshold_unchecked(self.b)
    }

    /// The mirror image `(a, 1 - b)`, conjugate through `x -> 1 - x`.
    pub fn reflected(&self) -> Params {
        Params {
            a: self.a,
            b: 1.0 - self.b,
        }
    }

    /// `f(x)` for `x` already known to lie in `[0, 1]`.
    #[inline]
    pub fn apply(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        if x >= 1.0 {
            return 1.0;
        }
        logistic(self.logit_exponent(x)).0
    }

    /// `f'(x)` for `x` already known to lie in `[0, 1]`.
    #[inline]
    pub fn slope(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return (self.a * self.b).exp();
        }
        if x >= 1.0 {
            return (self.a * (1.0 - self.b)).exp();
        }
        let (f, cf) = logistic(self.logit_exponent(x));
        let q = x * (1.0 - x);
        f * cf * (1.0 - self.a * q) / q
    }

    #[inline]
    fn logit_exponent(&self, x: f64) -> f64 {
        self.a * (x - self.b) + (-x).ln_1p() - x.ln()
    }

    fn unimodal(&self) -> Result<()> {
        if self.is_unimodal_regime() {
            Ok(())
        } else {
            Err(Error::MonotoneRegime { a: self.a })
        }
    }
}

/// `(1 / (1 + e^u), e^u / (1 + e^u))` without overflow for either sign of `u`.
#[inline]
pub(crate) fn logistic(u: f64) -> (f64, f64) {
    if u >= 0.0 {
        let e = (-u).exp();
        (e / (1.0 + e), 1.0 / (1.0 + e))
    } else {
        let e = u.exp();
        (1.0 / (1.0 + e), e / (1.0 + e))
    }
}

pub(crate) fn period_doubling_threshold_unchecked(b: f64) -> f64 {
    2.0 / (b * (1.0 - b))
}

fn check_unit(x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::domain("x", x, "[0, 1]"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stability {
    Attracting,
    Repelling,
    Neutral,
}

impl Stability {
    pub fn classify(multiplier: f64) -> Stability {
        let m = multiplier.abs();
        if m < 1.0 - NEUTRAL_BAND {
            Stability::Attracting
        } else if m > 1.0 + NEUTRAL_BAND {
            Stability::Repelling
        } else {
            Stability::Neutral
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Stability::Attracting => "attracting",
            Stability::Repelling => "repelling",
            Stability::Neutral => "neutral",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedPointReport {
    pub location: f64,
    pub multiplier: f64,
    pub classification: Stability,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoints {
    pub x_max: f64,
    pub x_min: f64,
    /// Local maximum value `f(x_max)`.
    pub f_max: f64,
    /// Local minimum value `f(x_min)`.
    pub f_min: f64,
}

pub fn eval_f(p: &Params, x: f64) -> Result<f64> {
    check_unit(x)?;
    Ok(p.apply(x))
}

/// `(f(x), 1 - f(x))`, each to full relative precision.
///
/// Near `f = 1` the complement cannot be recovered from the rounded `f`;
/// pass the pair to [`crate::conjugacy::h_from_pair`] to move to the chart.
pub fn eval_f_pair(p: &Params, x: f64) -> Result<(f64, f64)> {
    check_unit(x)?;
    Ok(if x <= 0.0 {
        (0.0, 1.0)
    } else if x >= 1.0 {
        (1.0, 0.0)
    } else {
        logistic(p.logit_exponent(x))
    })
}

pub fn eval_f_prime(p: &Params, x: f64) -> Result<f64> {
    check_unit(x)?;
    Ok(p.slope(x))
}

/// Reports for the fixed points `0`, `b` and `1`, in that order.
pub fn fixed_points(p: &Params) -> Vec<FixedPointReport> {
    let (a, b) = (p.a, p.b);
    [
        (0.0, (a * b).exp()),
        (b, 1.0 - a * b * (1.0 - b)),
        (1.0, (a * (1.0 - b)).exp()),
    ]
    .into_iter()
    .map(|(location, multiplier)| FixedPointReport {
        location,
        multiplier,
        classification: Stability::classify(multiplier),
    })
    .collect()
}

/// Closed-form turning points `1/2 -/+ sqrt(1/4 - 1/a)`.
///
/// `x_max` is recovered from `x_max * x_min = 1/a` so it keeps full relative
/// precision for large `a`.
pub fn critical_points(p: &Params) -> Result<CriticalPoints> {
    p.unimodal()?;
    let x_min = 0.5 + (0.25 - 1.0 / p.a).sqrt();
    let x_max = 1.0 / (p.a * x_min);
    Ok(CriticalPoints {
        x_max,
        x_min,
        f_max: p.apply(x_max),
        f_min: p.apply(x_min),
    })
}

/// The orbit segment `[x0, f(x0), ..., f^n(x0)]`.
pub fn iterate(p: &Params, x0: f64, n: usize) -> Result<Vec<f64>> {
    check_unit(x0)?;
    let mut out = Vec::with_capacity(n + 1);
    let mut x = x0;
    out.push(x);
    for _ in 0..n {
        x = p.apply(x);
        out.push(x);
    }
    Ok(out)
}

/// `f^n(x0)` through the partial-sum identity
/// `f^n(x) = x / (x + (1 - x) exp(a * sum_{i<n} (f^i(x) - b)))`.
pub fn iterate_sum_formula(p: &Params, x0: f64, n: usize) -> Result<f64> {
    if !(x0 > 0.0 && x0 < 1.0) {
        return Err(Error::domain("x0", x0, "(0, 1)"));
    }
    if n == 0 {
        return Err(Error::domain("n", 0.0, "n >= 1"));
    }
    let mut x = x0;
    let mut sum = 0.0;
    for _ in 0..n {
        sum += x - p.b;
        x = p.apply(x);
    }
    let u = p.a * sum + (-x0).ln_1p() - x0.ln();
    Ok(logistic(u).0)
}

/// Schwarzian derivative with the default exclusion radius
/// `1e-6 * (x_min - x_max)` around the critical points.
pub fn schwarzian(p: &Params, x: f64) -> Result<f64> {
    let cp = critical_points(p)?;
    schwarzian_with_radius(p, x, 1e-6 * (cp.x_min - cp.x_max))
}

pub fn schwarzian_with_radius(p: &Params, x: f64, radius: f64) -> Result<f64> {
    let cp = critical_points(p)?;
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::domain("x", x, "(0, 1)"));
    }
    if !(radius > 0.0) {
        return Err(Error::domain("radius", radius, "(0, inf)"));
    }
    for critical in [cp.x_max, cp.x_min] {
        if (x - critical).abs() <= radius {
            return Err(Error::CriticalPointSingularity { x, critical, radius });
        }
    }
    // With f = 1/(1+e^u): f'/f' terms reduce to derivatives of u.
    let (f, cf) = logistic(p.logit_exponent(x));
    let y = 1.0 - x;
    let u1 = p.a - 1.0 / x - 1.0 / y;
    let u2 = 1.0 / (x * x) - 1.0 / (y * y);
    let u3 = -2.0 / (x * x * x) - 2.0 / (y * y * y);
    let skew = 1.0 - 2.0 * f;
    let n = -skew * u1 + u2 / u1;
    let dn = -2.0 * f * cf * u1 * u1 - skew * u2 + (u3 * u1 - u2 * u2) / (u1 * u1);
    Ok(dn - 0.5 * n * n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(a: f64, b: f64) -> Params {
        Params::new(a, b).unwrap()
    }

    #[test]
    fn rejects_bad_params() {
        assert!(Params::new(0.0, 0.5).is_err());
        assert!(Params::new(-1.0, 0.5).is_err());
        assert!(Params::new(5.0, 0.0).is_err());
        assert!(Params::new(5.0, 1.0).is_err());
        assert!(Params::new(f64::NAN, 0.5).is_err());
    }

    #[test]
    fn regime_flags() {
        assert!(!p(4.0, 0.3).is_unimodal_regime());
        assert!(p(4.0 + 1e-12, 0.3).is_unimodal_regime());
        assert!(!p(8.9, 1.0 / 3.0).is_fixed_point_unstable());
        assert!(p(9.1, 1.0 / 3.0).is_fixed_point_unstable());
    }

    #[test]
    fn fixed_point_values() {
        let q = p(8.0, 1.0 / 3.0);
        assert_eq!(eval_f(&q, 0.0).unwrap(), 0.0);
        assert_eq!(eval_f(&q, 1.0).unwrap(), 1.0);
        assert!((eval_f(&q, 1.0 / 3.0).unwrap() - 1.0 / 3.0).abs() <= 1e-15);
    }

    #[test]
    fn oracle_value_at_half() {
        // mpmath, 50 digits
        let v = eval_f(&p(8.0, 1.0 / 3.0), 0.5).unwrap();
        assert!((v - 0.208_608_527_326_044_94).abs() < 1e-15);
    }

    #[test]
    fn domain_errors() {
        let q = p(8.0, 1.0 / 3.0);
        assert!(matches!(eval_f(&q, -0.1), Err(Error::Domain { .. })));
        assert!(matches!(eval_f_prime(&q, 1.5), Err(Error::Domain { .. })));
        assert!(iterate(&q, 2.0, 3).is_err());
        assert!(iterate_sum_formula(&q, 0.0, 3).is_err());
        assert!(iterate_sum_formula(&q, 1.0, 3).is_err());
    }

    #[test]
    fn derivative_closed_forms() {
        let q = p(8.0, 1.0 / 3.0);
        assert!((eval_f_prime(&q, 0.0).unwrap() - (8.0f64 / 3.0).exp()).abs() < 1e-12);
        assert!((eval_f_prime(&q, 0.0).unwrap() - 14.391_916_095_149_892).abs() < 1e-9);
        let half = p(8.0, 0.5);
        assert!((eval_f_prime(&half, 0.5).unwrap() + 1.0).abs() < 1e-14);
        let b = 1.0 / 3.0;
        assert!((q.slope(b) - (1.0 - 8.0 * b * (1.0 - b))).abs() < 1e-13);
        // mpmath derivative at 0.4
        assert!((q.slope(0.4) + 0.774_723_046_073_559_8).abs() < 1e-13);
    }

    #[test]
    fn fixed_point_reports() {
        let r = fixed_points(&p(8.0, 0.5));
        assert_eq!(r[1].multiplier, -1.0);
        assert_eq!(r[1].classification, Stability::Neutral);
        assert_eq!(r[0].classification, Stability::Repelling);
        assert_eq!(r[2].classification, Stability::Repelling);

        let r = fixed_points(&p(9.0, 1.0 / 3.0));
        assert!((r[1].multiplier + 1.0).abs() < 1e-14);
        assert_eq!(r[1].classification, Stability::Neutral);

        let r = fixed_points(&p(4.0, 0.5));
        let e2 = 2f64.exp();
        assert!((r[0].multiplier - e2).abs() < 1e-14);
        assert_eq!(r[1].multiplier, 0.0);
        assert!((r[2].multiplier - e2).abs() < 1e-14);
        assert_eq!(r[1].classification, Stability::Attracting);
    }

    #[test]
    fn critical_point_cases() {
        let cp = critical_points(&p(8.0, 0.2)).unwrap();
        assert!((cp.x_max - (2.0 - 2f64.sqrt()) / 4.0).abs() < 1e-15);
        assert!((cp.x_min - 0.853_553_390_593_273_8).abs() < 1e-15);
        let cp = critical_points(&p(4.0 + 1e-12, 1.0 / 3.0)).unwrap();
        assert!((cp.x_max - 0.5).abs() < 1e-6 && (cp.x_min - 0.5).abs() < 1e-6);
        assert!(cp.x_max < cp.x_min);
        assert!(matches!(
            critical_points(&p(4.0, 1.0 / 3.0)),
            Err(Error::MonotoneRegime { .. })
        ));
    }

    #[test]
    fn iterate_fixed_point() {
        let b = 1.0 / 3.0;
        let orbit = iterate(&p(8.0, b), b, 5).unwrap();
        assert_eq!(orbit.len(), 6);
        assert!(orbit.iter().all(|x| (x - b).abs() <= 1e-15));
        let seg = iterate(&p(8.0, b), 0.5, 1).unwrap();
        assert!((seg[1] - 0.208_608_527_326_044_94).abs() < 1e-15);
    }

    #[test]
    fn iterate_sum_formula_cases() {
        let b = 1.0 / 3.0;
        let q = p(8.0, b);
        assert!((iterate_sum_formula(&q, b, 7).unwrap() - b).abs() < 1e-15);
        // mpmath: f(f(0.5))
        assert!((iterate_sum_formula(&q, 0.5, 2).unwrap() - 0.416_894_512_899_846_6).abs() < 1e-14);
    }

    #[test]
    fn schwarzian_cases() {
        let q = p(8.0, 1.0 / 3.0);
        // mpmath reference values
        assert!((schwarzian(&q, 0.5).unwrap() + 16.0).abs() < 1e-10);
        assert!((schwarzian(&q, 1.0 / 3.0).unwrap() + 29.061_224_489_795_92).abs() < 1e-9);
        let cp = critical_points(&q).unwrap();
        assert!(matches!(
            schwarzian(&q, cp.x_max),
            Err(Error::CriticalPointSingularity { .. })
        ));
        assert!(schwarzian(&q, 0.0).is_err());
    }

    #[test]
    fn huge_a_does_not_overflow() {
        let q = p(5000.0, 0.4);
        for x in [1e-9, 0.1, 0.4, 0.7, 1.0 - 1e-9] {
            let v = q.apply(x);
            assert!((0.0..=1.0).contains(&v), "{x} -> {v}");
            assert!(q.slope(x).is_finite());
        }
    }
}
