use serde::{Deserialize, Serialize};

use crate::conjugacy::{eval_g, eval_g_prime, g_critical_data, h_inv};
use crate::error::{Error, Result};
use crate::map::Params;
use crate::roots::{solve_bracketed, RootOptions};

/// Inequality slacks at or below this are treated as inconclusive.
pub const MARGIN_THRESHOLD: f64 = 1e-9;

/// Upper end of the doubling search in [`min_certified_a`].
pub const MAX_CERTIFIED_SEARCH_A: f64 = 1e6;

/// A conjugate-coordinate map shaped increasing / decreasing / increasing.
pub trait ConjugateChart: Sync {
    fn params(&self) -> Params;
    fn value(&self, y: f64) -> f64;
    fn slope(&self, y: f64) -> f64;
    /// `(y_max, y_min)`: the local maximum and local minimum, `y_max < y_min`.
    fn turning_points(&self) -> Result<(f64, f64)>;
    /// Back to the original interval coordinate.
    fn to_x(&self, y: f64) -> f64;
}

/// The closed-form conjugate `g` of the replicator map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReplicatorChart(pub Params);

impl ConjugateChart for ReplicatorChart {
    fn params(&self) -> Params {
        self.0
    }

    fn value(&self, y: f64) -> f64 {
        eval_g(&self.0, y)
    }

    fn slope(&self, y: f64) -> f64 {
        eval_g_prime(&self.0, y)
    }

    fn turning_points(&self) -> Result<(f64, f64)> {
        let cd = g_critical_data(&self.0)?;
        Ok((cd.y_max, cd.y_min))
    }

    fn to_x(&self, y: f64) -> f64 {
        h_inv(y)
    }
}

/// `G(y) = s * C(s * y)` for orientation `s = +-1`.
pub(crate) struct Oriented<'a, C: ?Sized> {
    pub chart: &'a C,
    pub sigma: f64,
}

impl<C: ConjugateChart + ?Sized> Oriented<'_, C> {
    #[inline]
    pub fn g(&self, y: f64) -> f64 {
        self.sigma * self.chart.value(self.sigma * y)
    }

    #[inline]
    pub fn gp(&self, y: f64) -> f64 {
        self.chart.slope(self.sigma * y)
    }

    fn turning_points(&self) -> Result<(f64, f64)> {
        let (lo, hi) = self.chart.turning_points()?;
        Ok(if self.sigma > 0.0 { (lo, hi) } else { (-hi, -lo) })
    }
}

/// The four preimage landmarks, in the oriented frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Landmarks {
    pub y1_minus: f64,
    pub y1_plus: f64,
    pub y2_minus: f64,
    pub y2_plus: f64,
}

/// Outcome of the horseshoe checks for one parameter pair.
///
/// Field order is the JSON key order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HorseshoeCertificate {
    pub params: Params,
    /// `+1` when computed on `g`, `-1` when computed on `y -> -g(-y)`.
    pub orientation: i8,
    pub y_max: Option<f64>,
    pub y_min: Option<f64>,
    pub g_min: Option<f64>,
    pub g_max: Option<f64>,
    pub y1_minus: Option<f64>,
    pub y1_plus: Option<f64>,
    pub y2_minus: Option<f64>,
    pub y2_plus: Option<f64>,
    /// `y_max - g_min`
    pub margin1: Option<f64>,
    /// `g_max - y_min`
    pub margin2: Option<f64>,
    /// `g(g_max) - y_min`
    pub margin3: Option<f64>,
    /// Smallest strict endpoint gap among the covering relations.
    pub covering_margin: Option<f64>,
    /// `min(|g'(y1_minus)|, |g'(y1_plus)|) * g'(y2_minus)`
    pub expansion: Option<f64>,
    pub valid: bool,
    /// Diagnostic token of the first failing check.
    pub failure: Option<String>,
}

impl HorseshoeCertificate {
    fn empty(params: Params, orientation: i8) -> Self {
        HorseshoeCertificate {
            params,
            orientation,
            y_max: None,
            y_min: None,
            g_min: None,
            g_max: None,
            y1_minus: None,
            y1_plus: None,
            y2_minus: None,
            y2_plus: None,
            margin1: None,
            margin2: None,
            margin3: None,
            covering_margin: None,
            expansion: None,
            valid: false,
            failure: None,
        }
    }

    pub fn margins(&self) -> Option<[f64; 3]> {
        Some([self.margin1?, self.margin2?, self.margin3?])
    }

    pub fn landmarks(&self) -> Option<Landmarks> {
        Some(Landmarks {
            y1_minus: self.y1_minus?,
            y1_plus: self.y1_plus?,
            y2_minus: self.y2_minus?,
            y2_plus: self.y2_plus?,
        })
    }

    /// The failure as an error carrying the diagnostic token.
    pub fn to_error(&self) -> Option<Error> {
        if self.valid {
            return None;
        }
        let token = self.failure.clone().unwrap_or_else(|| "horseshoe-invalid".into());
        let (condition, margin) = match token.split_once(", margin=") {
            Some((c, m)) => (c.to_string(), m.parse().unwrap_or(f64::NAN)),
            None => (token, f64::NAN),
        };
        Some(Error::PreconditionFailed { condition, margin })
    }

    fn fail(mut self, token: impl Into<String>) -> Self {
        self.valid = false;
        self.failure = Some(token.into());
        self
    }
}

fn orientation_for(b: f64) -> Option<i8> {
    if b < 0.5 {
        Some(1)
    } else if b > 0.5 {
        Some(-1)
    } else {
        None
    }
}

pub fn certify(p: &Params) -> HorseshoeCertificate {
    certify_chart(&ReplicatorChart(*p))
}

pub fn certify_chart<C: ConjugateChart + ?Sized>(chart: &C) -> HorseshoeCertificate {
    let params = chart.params();
    let Some(orientation) = orientation_for(params.b()) else {
        return HorseshoeCertificate::empty(params, 1).fail("horseshoe-b-is-half");
    };
    let cert = HorseshoeCertificate::empty(params, orientation);
    let map = Oriented {
        chart,
        sigma: f64::from(orientation),
    };
    let (y_max, y_min) = match map.turning_points() {
        Ok(t) => t,
        Err(Error::MonotoneRegime { .. }) => return cert.fail("monotone-regime"),
        Err(e) => return cert.fail(format!("horseshoe-turning-points-failed ({e})")),
    };
    let g_min = map.g(y_min);
    let g_max = map.g(y_max);
    let margins = [y_max - g_min, g_max - y_min, map.g(g_max) - y_min];
    let mut cert = HorseshoeCertificate {
        y_max: Some(y_max),
        y_min: Some(y_min),
        g_min: Some(g_min),
        g_max: Some(g_max),
        margin1: Some(margins[0]),
        margin2: Some(margins[1]),
        margin3: Some(margins[2]),
        ..cert
    };
    if let Some(i) = margins.iter().position(|m| !(*m > MARGIN_THRESHOLD)) {
        return cert.fail(format!("horseshoe-inequality-{}-failed, margin={}", i + 1, margins[i]));
    }

    let lm = match landmarks_oriented(&map, y_max, y_min) {
        Ok(lm) => lm,
        Err(e) => return cert.fail(format!("horseshoe-landmarks-failed ({e})")),
    };
    cert.y1_minus = Some(lm.y1_minus);
    cert.y1_plus = Some(lm.y1_plus);
    cert.y2_minus = Some(lm.y2_minus);
    cert.y2_plus = Some(lm.y2_plus);

    let ordered = [y_max, lm.y1_minus, lm.y1_plus, y_min, lm.y2_minus, lm.y2_plus]
        .windows(2)
        .all(|w| w[0] < w[1]);
    if !ordered {
        return cert.fail("horseshoe-ordering-failed");
    }

    // Tight by construction: g(y1-) = y2+, g(y1+) = g(y2-) = y_max, g(y2+) = y_min.
    let tol = |t: f64| 1e-11 * (1.0 + t.abs());
    let constructive = [
        (map.g(lm.y1_minus), lm.y2_plus),
        (map.g(lm.y1_plus), y_max),
        (map.g(lm.y2_minus), y_max),
        (map.g(lm.y2_plus), y_min),
    ];
    if let Some((v, t)) = constructive.iter().find(|(v, t)| (v - t).abs() > tol(*t)) {
        return cert.fail(format!("horseshoe-landmark-residual-failed, margin={}", -(v - t).abs()));
    }

    // Images of monotone branches are spanned by endpoint images:
    // g(J1) = [g(y1+), g(y1-)], g(J2) = [g(y2-), g(y2+)].
    let gaps = [
        ("g(J1)-covers-J1", lm.y1_minus - map.g(lm.y1_plus)),
        ("g(J2)-covers-J1-left", lm.y1_minus - map.g(lm.y2_minus)),
        ("g(J2)-covers-J1-right", map.g(lm.y2_plus) - lm.y1_plus),
        ("g(J2)-misses-J2", lm.y2_minus - map.g(lm.y2_plus)),
    ];
    let covering_margin = gaps.iter().map(|g| g.1).fold(f64::INFINITY, f64::min);
    cert.covering_margin = Some(covering_margin);
    if let Some((name, gap)) = gaps.iter().find(|g| !(g.1 >= MARGIN_THRESHOLD)) {
        return cert.fail(format!("horseshoe-covering-{name}-failed, margin={gap}"));
    }

    let expansion = map.gp(lm.y1_minus).abs().min(map.gp(lm.y1_plus).abs()) * map.gp(lm.y2_minus);
    cert.expansion = Some(expansion);
    if !(expansion - 1.0 > MARGIN_THRESHOLD) {
        return cert.fail(format!("horseshoe-expansion-failed, margin={}", expansion - 1.0));
    }

    cert.valid = true;
    cert
}

/// Landmarks of the replicator conjugate; errors name the violated inequality.
pub fn landmark_points(p: &Params) -> Result<Landmarks> {
    let chart = ReplicatorChart(*p);
    let sigma = match orientation_for(p.b()) {
        Some(o) => f64::from(o),
        None => {
            return Err(Error::PreconditionFailed {
                condition: "horseshoe-b-is-half".into(),
                margin: 0.0,
            })
        }
    };
    let map = Oriented { chart: &chart, sigma };
    let (y_max, y_min) = map.turning_points()?;
    let g_max = map.g(y_max);
    let margins = [y_max - map.g(y_min), g_max - y_min, map.g(g_max) - y_min];
    if let Some(i) = margins.iter().position(|m| !(*m > 0.0)) {
        return Err(Error::PreconditionFailed {
            condition: format!("horseshoe-inequality-{}-failed", i + 1),
            margin: margins[i],
        });
    }
    landmarks_oriented(&map, y_max, y_min)
}

pub(crate) fn landmarks_oriented<C: ConjugateChart + ?Sized>(
    map: &Oriented<'_, C>,
    y_max: f64,
    y_min: f64,
) -> Result<Landmarks> {
    let upper = increasing_branch_upper(map, y_min, y_min)?;
    let solve = |target: f64, lo: f64, hi: f64| {
        solve_bracketed(
            |y| map.g(y) - target,
            |y| map.gp(y),
            lo,
            hi,
            RootOptions::with_residual(1e-11 * (1.0 + target.abs())),
        )
    };
    let y2_plus = solve(y_min, y_min, upper)?;
    let y1_minus = solve(y2_plus, y_max, y_min)?;
    let y1_plus = solve(y_max, y_max, y_min)?;
    let y2_minus = solve(y_max, y_min, y2_plus)?;
    Ok(Landmarks {
        y1_minus,
        y1_plus,
        y2_minus,
        y2_plus,
    })
}

/// A point past `y_min` where the right branch already exceeds `target`.
fn increasing_branch_upper<C: ConjugateChart + ?Sized>(map: &Oriented<'_, C>, y_min: f64, target: f64) -> Result<f64> {
    let mut step = 1.0;
    for _ in 0..80 {
        let y = y_min + step;
        if map.g(y) > target {
            return Ok(y);
        }
        step *= 2.0;
    }
    Err(Error::convergence("right branch never reaches y_min"))
}

/// Smallest `a` (to within `tol`) on a doubling-then-bisection path at which
/// the certificate is valid.
///
/// Certifiability is only evaluated pointwise along the search path; it is
/// not known to be monotone in `a`.
pub fn min_certified_a(b: f64, tol: f64) -> Result<f64> {
    if !(b > 0.0 && b < 1.0) || b == 0.5 {
        return Err(Error::domain("b", b, "(0, 1) without 1/2"));
    }
    if !(tol > 0.0) {
        return Err(Error::domain("tol", tol, "(0, inf)"));
    }
    let valid = |a: f64| Params::new(a, b).map(|p| certify(&p).valid).unwrap_or(false);
    let mut hi = 8.0;
    while !valid(hi) {
        hi *= 2.0;
        if hi > MAX_CERTIFIED_SEARCH_A {
            return Err(Error::NotFound {
                context: format!("no certified a <= {MAX_CERTIFIED_SEARCH_A} for b={b}"),
            });
        }
    }
    let mut lo = if hi == 8.0 { 4.0 } else { hi / 2.0 };
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if valid(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}
