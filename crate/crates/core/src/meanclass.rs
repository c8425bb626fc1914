//! Maps with prescribed orbit mean, generated from a strictly monotone
//! potential `H` by
//!
//! ```text
//! f(x) = H^-1(H(x) + x - b)
//! ```
//!
//! Such maps satisfy `H(f(x)) - H(x) = x - b`, so summing along any periodic
//! orbit shows its mean is exactly `b`, and Birkhoff averages differ from `b`
//! by the telescoped term `(H(f^n(x)) - H(x)) / n`.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, SQRT_2};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use statrs::function::erf::{erfc, erfc_inv};

use crate::conjugacy::{h_inv, h_unchecked};
use crate::error::{Error, Result};
use crate::horseshoe::{certify, ConjugateChart};
use crate::interval_map::IntervalMap;
use crate::map::{critical_points, Params};
use crate::orbits::PeriodicOrbit;
use crate::roots::bisect_to_resolution;

/// A stateless real function, safe to evaluate from several threads.
pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Samples used when validating a potential.
const VALIDATION_SAMPLES: usize = 1000;

/// Samples used for the C1 distance of a perturbed potential.
const C1_SAMPLES: usize = 10_000;

/// A strictly monotone function on an open interval, with optional closed
/// forms for its inverse and derivative.
///
/// Without an inverse, `H^-1` is found by bisection to rounding resolution.
/// Without a derivative, a central difference is used.
#[derive(Clone)]
pub struct Potential {
    label: String,
    domain: (f64, f64),
    h: RealFn,
    inverse: Option<RealFn>,
    derivative: Option<RealFn>,
}

impl fmt::Debug for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Potential")
            .field("label", &self.label)
            .field("domain", &self.domain)
            .field("inverse", &self.inverse.is_some())
            .field("derivative", &self.derivative.is_some())
            .finish()
    }
}

impl Potential {
    pub fn new(label: impl Into<String>, domain: (f64, f64), h: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Potential {
            label: label.into(),
            domain,
            h: Arc::new(h),
            inverse: None,
            derivative: None,
        }
    }

    pub fn with_inverse(mut self, inv: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.inverse = Some(Arc::new(inv));
        self
    }

    pub fn with_derivative(mut self, d: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.derivative = Some(Arc::new(d));
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    pub fn has_closed_inverse(&self) -> bool {
        self.inverse.is_some()
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        (self.h)(x)
    }

    pub fn derivative(&self, x: f64) -> f64 {
        match &self.derivative {
            Some(d) => d(x),
            None => {
                let step = 1e-6 * x.abs().max(1e-3);
                let (lo, hi) = self.interior();
                let (u, v) = ((x - step).max(lo), (x + step).min(hi));
                (self.eval(v) - self.eval(u)) / (v - u)
            }
        }
    }

    fn in_domain(&self, x: f64) -> bool {
        self.domain.0 < x && x < self.domain.1
    }

    /// The closed interval of representable points strictly inside the domain.
    fn interior(&self) -> (f64, f64) {
        let (lo, hi) = self.domain;
        let lo = if lo.is_finite() { lo.next_up() } else { -f64::MAX };
        let hi = if hi.is_finite() { hi.next_down() } else { f64::MAX };
        (lo, hi)
    }

    fn is_increasing(&self) -> bool {
        let (lo, hi) = self.interior();
        self.eval(hi) > self.eval(lo)
    }

    /// `H^-1(t)`, or `DomainEscape` when `t` is outside the range of `H`.
    pub fn inverse(&self, t: f64) -> Result<f64> {
        if let Some(inv) = &self.inverse {
            let x = inv(t);
            return if self.in_domain(x) {
                Ok(x)
            } else {
                Err(Error::DomainEscape {
                    context: format!("{}: H^-1({t}) = {x} outside {:?}", self.label, self.domain),
                })
            };
        }
        let (lo, hi) = self.interior();
        let (hl, hh) = (self.eval(lo), self.eval(hi));
        let (rmin, rmax) = if hl < hh { (hl, hh) } else { (hh, hl) };
        if !(rmin <= t && t <= rmax) {
            return Err(Error::DomainEscape {
                context: format!("{}: {t} outside the range [{rmin}, {rmax}] of H", self.label),
            });
        }
        bisect_to_resolution(|x| self.eval(x) - t, lo, hi).ok_or_else(|| Error::DomainEscape {
            context: format!("{}: no preimage of {t}", self.label),
        })
    }
}

/// A potential together with the target mean `b` and the interval searched
/// for periodic orbits.
#[derive(Debug, Clone)]
pub struct MeanMapSpec {
    potential: Potential,
    b: f64,
    search: (f64, f64),
}

impl MeanMapSpec {
    /// Validates the potential and derives the search interval with
    /// [`absorbing_hull`]. Unbounded domains need
    /// [`MeanMapSpec::with_search_interval`].
    pub fn new(potential: Potential, b: f64) -> Result<Self> {
        let (lo, hi) = potential.domain;
        if !(lo < hi) {
            return Err(Error::InvalidSpec {
                reason: format!("empty domain ({lo}, {hi})"),
            });
        }
        if !potential.in_domain(b) {
            return Err(Error::InvalidSpec {
                reason: format!("b={b} outside the domain ({lo}, {hi})"),
            });
        }
        if !(lo.is_finite() && hi.is_finite()) {
            return Err(Error::InvalidSpec {
                reason: "unbounded domain needs an explicit search interval".into(),
            });
        }
        let spec = MeanMapSpec {
            potential,
            b,
            search: potential_interior_mesh_bounds(lo, hi),
        };
        spec.validate()?;
        let search = absorbing_hull(&spec);
        Ok(MeanMapSpec { search, ..spec })
    }

    /// A spec with a caller-chosen search interval inside the domain.
    pub fn with_search_interval(potential: Potential, b: f64, search: (f64, f64)) -> Result<Self> {
        if !(potential.in_domain(search.0) && potential.in_domain(search.1) && search.0 < search.1) {
            return Err(Error::InvalidSpec {
                reason: format!("search interval {search:?} not inside {:?}", potential.domain),
            });
        }
        if !potential.in_domain(b) {
            return Err(Error::InvalidSpec {
                reason: format!("b={b} outside the domain {:?}", potential.domain),
            });
        }
        let spec = MeanMapSpec { potential, b, search };
        spec.validate()?;
        Ok(spec)
    }

    pub fn potential(&self) -> &Potential {
        &self.potential
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn search_interval(&self) -> (f64, f64) {
        self.search
    }

    /// Sample points over the domain when bounded, over the search interval
    /// otherwise. Used for validation.
    pub fn mesh(&self, n: usize) -> Vec<f64> {
        let (lo, hi) = self.potential.domain;
        let range = if lo.is_finite() && hi.is_finite() {
            (lo, hi)
        } else {
            self.search
        };
        midpoints(range, n)
    }

    /// Strict monotonicity and inverse round trip on a sample grid; a map
    /// that leaves the domain is only logged.
    pub fn validate(&self) -> Result<()> {
        let h = &self.potential;
        let xs = self.mesh(VALIDATION_SAMPLES);
        let vals: Vec<f64> = xs.iter().map(|&x| h.eval(x)).collect();
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidSpec {
                reason: format!("{} is not finite on its domain", h.label),
            });
        }
        let up = vals.windows(2).all(|w| w[0] < w[1]);
        let down = vals.windows(2).all(|w| w[0] > w[1]);
        if !(up || down) {
            return Err(Error::InvalidSpec {
                reason: format!("{} is not strictly monotone", h.label),
            });
        }
        for (&x, &v) in xs.iter().zip(&vals) {
            let back = h.inverse(v)?;
            if (back - x).abs() > 1e-9 * x.abs().max(1.0) {
                return Err(Error::InvalidSpec {
                    reason: format!("{}: H^-1(H({x})) = {back}", h.label),
                });
            }
        }
        let map = InducedMap { spec: self.clone() };
        if let Some(&x) = xs.iter().find(|&&x| !h.in_domain(map.apply(x))) {
            log::warn!("{}: induced map sends {x} outside the domain {:?}", h.label, h.domain);
        }
        Ok(())
    }
}

fn potential_interior_mesh_bounds(lo: f64, hi: f64) -> (f64, f64) {
    let m = midpoints((lo, hi), VALIDATION_SAMPLES);
    (m[0], m[m.len() - 1])
}

/// The hull of `b` and the critical values of the induced map, grown until it
/// contains its own sampled image.
///
/// Critical points are the sign changes of `H'(x) + 1` on a domain mesh.
/// Without them the map is monotone and the whole mesh range is returned.
pub fn absorbing_hull(spec: &MeanMapSpec) -> (f64, f64) {
    const MESH: usize = 4096;
    let map = InducedMap { spec: spec.clone() };
    let h = &spec.potential;
    let xs = spec.mesh(MESH);
    let slope = |x: f64| h.derivative(x) + 1.0;
    let crit: Vec<f64> = xs
        .windows(2)
        .filter(|w| (slope(w[0]) < 0.0) != (slope(w[1]) < 0.0))
        .filter_map(|w| bisect_to_resolution(slope, w[0], w[1]))
        .collect();
    if crit.is_empty() {
        return (xs[0], xs[xs.len() - 1]);
    }
    let grow = |(lo, hi): (f64, f64), y: f64| {
        if y.is_finite() {
            (lo.min(y), hi.max(y))
        } else {
            (lo, hi)
        }
    };
    let mut hull = crit.iter().map(|&c| map.apply(c)).fold((spec.b, spec.b), grow);
    for _ in 0..8 {
        let mut next = grow(grow(hull, map.apply(hull.0)), map.apply(hull.1));
        next = midpoints(hull, MESH).into_iter().map(|x| map.apply(x)).fold(next, grow);
        if next == hull {
            break;
        }
        hull = next;
    }
    let (ilo, ihi) = h.interior();
    (hull.0.max(ilo), hull.1.min(ihi))
}

fn midpoints((lo, hi): (f64, f64), n: usize) -> Vec<f64> {
    let n = n.max(1);
    (0..n).map(|i| lo + (hi - lo) * ((i as f64 + 0.5) / n as f64)).collect()
}

/// The map `x -> H^-1(H(x) + x - b)`.
#[derive(Debug, Clone)]
pub struct InducedMap {
    spec: MeanMapSpec,
}

impl InducedMap {
    pub fn spec(&self) -> &MeanMapSpec {
        &self.spec
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        let h = &self.spec.potential;
        if !h.in_domain(x) {
            return Err(Error::DomainEscape {
                context: format!("{}: x={x} outside {:?}", h.label, h.domain),
            });
        }
        if x == self.spec.b {
            // Exact: H(f(b)) = H(b). Rounding in H^-1(H(b)) would otherwise
            // push the orbit off a repelling fixed point.
            return Ok(x);
        }
        h.inverse(h.eval(x) + x - self.spec.b)
    }

    /// `f'(x) = (H'(x) + 1) / H'(f(x))`.
    pub fn eval_derivative(&self, x: f64) -> Result<f64> {
        let y = self.eval(x)?;
        let h = &self.spec.potential;
        Ok((h.derivative(x) + 1.0) / h.derivative(y))
    }

    /// `[x0, f(x0), ..., f^n(x0)]`.
    pub fn iterate(&self, x0: f64, n: usize) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(n + 1);
        let mut x = x0;
        out.push(x);
        for _ in 0..n {
            x = self.eval(x)?;
            out.push(x);
        }
        Ok(out)
    }
}

impl IntervalMap for InducedMap {
    fn apply(&self, x: f64) -> f64 {
        self.eval(x).unwrap_or(f64::NAN)
    }

    fn derivative(&self, x: f64) -> f64 {
        self.eval_derivative(x).unwrap_or(f64::NAN)
    }

    fn search_interval(&self) -> (f64, f64) {
        self.spec.search
    }

    /// `b` is always fixed: `H(f(b)) = H(b)`.
    fn known_fixed_points(&self) -> Vec<f64> {
        vec![self.spec.b]
    }
}

/// The induced map of a validated spec.
#[allow(non_snake_case)]
pub fn make_map_from_H(spec: &MeanMapSpec) -> Result<InducedMap> {
    spec.validate()?;
    Ok(InducedMap { spec: spec.clone() })
}

/// `max |H(f(x)) - H(x) - (x - b)|` over a `grid`-point mesh of the search
/// interval, where the orbits live.
///
/// Near a domain edge where `H` blows up the residual is dominated by
/// rounding of `f(x)` amplified by `H'(f(x))`; see [`cohomology_residual_on`]
/// to probe such regions explicitly.
pub fn verify_cohomology(spec: &MeanMapSpec, grid: usize) -> Result<f64> {
    cohomology_residual_on(spec, spec.search, grid)
}

/// `max |H(f(x)) - H(x) - (x - b)|` over a `grid`-point mesh of `interval`.
pub fn cohomology_residual_on(spec: &MeanMapSpec, interval: (f64, f64), grid: usize) -> Result<f64> {
    let map = InducedMap { spec: spec.clone() };
    let h = &spec.potential;
    let mut worst = 0.0f64;
    for x in midpoints(interval, grid) {
        let y = map.eval(x)?;
        worst = worst.max((h.eval(y) - h.eval(x) - (x - spec.b)).abs());
    }
    Ok(worst)
}

/// `|mean - b|` for an orbit of the induced map.
///
/// The orbit is first checked to close up: `|f(x_i) - x_{i+1}| <= 1e-10`
/// around its stored cycle.
pub fn orbit_mean_check(spec: &MeanMapSpec, orbit: &PeriodicOrbit) -> Result<f64> {
    let map = InducedMap { spec: spec.clone() };
    let residual = orbit.closure_residual(&map);
    if !(residual <= 1e-10) {
        return Err(Error::NotPeriodic { residual });
    }
    Ok((orbit.mean - spec.b).abs())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BirkhoffReport {
    /// `(1/n) * sum_{j<n} f^j(x0)`
    pub average: f64,
    /// `(H(f^n(x0)) - H(x0)) / n`, so that `average = b + correction`.
    pub correction: f64,
    /// `|average - b - correction|`
    pub identity_residual: f64,
    pub n: usize,
}

pub fn birkhoff_average(spec: &MeanMapSpec, x0: f64, n: usize) -> Result<BirkhoffReport> {
    if n == 0 {
        return Err(Error::domain("n", 0.0, "[1, inf)"));
    }
    let map = InducedMap { spec: spec.clone() };
    let h = &spec.potential;
    let h0 = h.eval(x0);
    if !h.in_domain(x0) {
        return Err(Error::DomainEscape {
            context: format!("{}: x0={x0} outside {:?}", h.label, h.domain),
        });
    }
    let mut x = x0;
    let mut sum = 0.0;
    for _ in 0..n {
        sum += x;
        x = map.eval(x)?;
    }
    let average = sum / n as f64;
    let correction = (h.eval(x) - h0) / n as f64;
    Ok(BirkhoffReport {
        average,
        correction,
        identity_residual: (average - spec.b - correction).abs(),
        n,
    })
}

/// Checks that `h_tilde` is within `delta` of `h / a` in value and slope on
/// the absorbing interval of `base`, and returns the spec it induces with
/// mean `b` of `base`.
pub fn perturbed_chaotic_member(base: &Params, h_tilde: Potential, delta: f64) -> Result<MeanMapSpec> {
    let cert = certify(base);
    if !cert.valid {
        return Err(Error::CertificateRequired {
            reason: cert.failure.unwrap_or_default(),
        });
    }
    let cp = critical_points(base)?;
    let a = base.a();
    let xs = midpoints((cp.f_min, cp.f_max), C1_SAMPLES);
    let vals: Vec<f64> = xs.iter().map(|&x| h_tilde.eval(x)).collect();
    if !vals.windows(2).all(|w| w[0] > w[1]) {
        return Err(Error::InvalidSpec {
            reason: format!("{} is not strictly decreasing on the absorbing interval", h_tilde.label),
        });
    }
    let mut distance = 0.0f64;
    for (&x, &v) in xs.iter().zip(&vals) {
        let dv = (v - h_unchecked(x) / a).abs();
        let dd = (h_tilde.derivative(x) + 1.0 / (a * x * (1.0 - x))).abs();
        distance = distance.max(dv).max(dd);
    }
    if !(distance <= delta) {
        return Err(Error::NotClose {
            distance,
            tolerance: delta,
        });
    }
    MeanMapSpec::with_search_interval(h_tilde, base.b(), (cp.f_min, cp.f_max))
}

/// The conjugate picture `y = a H(x)` of a decreasing potential, in which the
/// induced map reads `y -> y + a H^-1(y / a) - a b`. For `H = h / a` this is
/// the replicator conjugate.
#[derive(Debug, Clone)]
pub struct PotentialChart {
    params: Params,
    potential: Potential,
}

impl PotentialChart {
    pub fn new(params: Params, potential: Potential) -> Result<Self> {
        if potential.is_increasing() {
            return Err(Error::InvalidSpec {
                reason: format!("{} must be decreasing to serve as a chart", potential.label),
            });
        }
        Ok(PotentialChart { params, potential })
    }

    fn x_of(&self, y: f64) -> f64 {
        self.potential.inverse(y / self.params.a()).unwrap_or(f64::NAN)
    }
}

impl ConjugateChart for PotentialChart {
    fn params(&self) -> Params {
        self.params
    }

    fn value(&self, y: f64) -> f64 {
        let a = self.params.a();
        y + a * self.x_of(y) - a * self.params.b()
    }

    /// `1 + 1 / H'(x)`.
    fn slope(&self, y: f64) -> f64 {
        1.0 + 1.0 / self.potential.derivative(self.x_of(y))
    }

    /// Solutions of `H'(x) = -1` on either side of `1/2`, bracketed around the
    /// unperturbed turning points.
    fn turning_points(&self) -> Result<(f64, f64)> {
        let cp = critical_points(&self.params)?;
        let g = |x: f64| self.potential.derivative(x) + 1.0;
        let solve = |lo: f64, hi: f64| {
            bisect_to_resolution(g, lo, hi)
                .ok_or_else(|| Error::convergence(format!("H' + 1 has no sign change on [{lo}, {hi}]")))
        };
        let x_left = solve(0.5 * cp.x_max, 0.5 * (cp.x_max + 0.5))?;
        let x_right = solve(0.5 * (cp.x_min + 0.5), 0.5 * (cp.x_min + 1.0))?;
        let a = self.params.a();
        // H decreases, so the right turning point in x is the left one in y.
        Ok((a * self.potential.eval(x_right), a * self.potential.eval(x_left)))
    }

    fn to_x(&self, y: f64) -> f64 {
        self.x_of(y)
    }
}

/// `H = h / a` on `(0, 1)`; induces the replicator map `f_{a,b}`.
pub fn replicator_spec(p: &Params) -> Result<MeanMapSpec> {
    let a = p.a();
    let h = Potential::new(format!("replicator(a={a})"), (0.0, 1.0), move |x| h_unchecked(x) / a)
        .with_inverse(move |t| h_inv(a * t))
        .with_derivative(move |x| -1.0 / (a * x * (1.0 - x)));
    let search = IntervalMap::search_interval(p);
    MeanMapSpec::with_search_interval(h, p.b(), search)
}

/// `H = -ln x` on `(0, inf)`; induces `x -> e^b x e^-x`.
pub fn ricker_spec(b: f64) -> Result<MeanMapSpec> {
    if !(b > 0.0 && b.is_finite()) {
        return Err(Error::domain("b", b, "(0, inf)"));
    }
    let h = Potential::new(format!("ricker(b={b})"), (0.0, f64::INFINITY), |x: f64| -x.ln())
        .with_inverse(|t: f64| (-t).exp())
        .with_derivative(|x| -1.0 / x);
    // x e^{b-x} peaks at x = 1; [f(f_max), f_max] together with b absorbs.
    let f_max = (b - 1.0).exp();
    let f_low = f_max * (b - f_max).exp();
    // Widened so the interval stays proper when everything meets at b = 1.
    let search = (0.5 * f_low.min(b), 1.5 * f_max.max(b));
    MeanMapSpec::with_search_interval(h, b, search)
}

/// `H = -tan(x) / a` on `(-pi/2, pi/2)`; induces `x -> arctan(tan x - a (x - b))`.
pub fn arctan_spec(a: f64, b: f64) -> Result<MeanMapSpec> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::domain("a", a, "(0, inf)"));
    }
    let h = Potential::new(format!("arctan(a={a})"), (-FRAC_PI_2, FRAC_PI_2), move |x: f64| {
        -x.tan() / a
    })
    .with_inverse(move |t: f64| (-a * t).atan())
    .with_derivative(move |x: f64| {
        let t = x.tan();
        -(1.0 + t * t) / a
    });
    MeanMapSpec::new(h, b)
}

pub const PROBIT_DEFAULT_A: f64 = 10.0;
pub const PROBIT_DEFAULT_B: f64 = 0.4;

/// Standard normal distribution function.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z * FRAC_1_SQRT_2)
}

fn normal_density(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Standard normal quantile, evaluated from the nearer tail and refined by
/// one Newton step against [`normal_cdf`] in that same tail.
pub fn normal_quantile(p: f64) -> f64 {
    if p < 0.5 {
        let z = -SQRT_2 * erfc_inv(2.0 * p);
        let d = normal_density(z);
        if z.is_finite() && d > 0.0 {
            return z - (normal_cdf(z) - p) / d;
        }
        z
    } else {
        let z = SQRT_2 * erfc_inv(2.0 * (1.0 - p));
        let d = normal_density(z);
        if z.is_finite() && d > 0.0 {
            return z + (normal_cdf(-z) - (1.0 - p)) / d;
        }
        z
    }
}

/// `H = -Phi^-1(x) / a` on `(0, 1)`; induces `x -> Phi(Phi^-1(x) - a (x - b))`.
pub fn probit_spec(a: f64, b: f64) -> Result<MeanMapSpec> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::domain("a", a, "(0, inf)"));
    }
    let h = Potential::new(format!("probit(a={a})"), (0.0, 1.0), move |x| -normal_quantile(x) / a)
        .with_inverse(move |t| normal_cdf(-a * t))
        .with_derivative(move |x| -1.0 / (a * normal_density(normal_quantile(x))));
    MeanMapSpec::new(h, b)
}
