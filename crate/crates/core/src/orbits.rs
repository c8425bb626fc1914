//! Periodic orbits, attractors and bifurcation scans.

use rayon::prelude::*;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::interval_map::IntervalMap;
use crate::map::{critical_points, period_doubling_threshold_unchecked, Params, Stability, NEUTRAL_BAND};
use crate::roots::{bisect_to_resolution, solve_bracketed, RootOptions};

/// Roots of `f^n - id` closer than this, relative to `1 + |u|` in the map's
/// chart, are the same point.
pub const ROOT_DEDUP_TOL: f64 = 1e-9;

/// Grid cells per unit of period used when the caller has no preference.
pub const DEFAULT_GRID_PER_PERIOD: usize = 2048;

/// Recurrence tolerance for cycle detection on a settled orbit.
pub const RECURRENCE_TOL: f64 = 1e-9;

/// Iterates that land this close (relative, in the chart) to an earlier point
/// count as the same point when assembling a cycle from grid roots.
const SNAP_TOL: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodicOrbit {
    /// Least period.
    pub period: usize,
    /// The orbit points in increasing order.
    pub points: Vec<f64>,
    /// The orbit points in dynamical order, starting from the smallest.
    pub cycle: Vec<f64>,
    /// Product of `f'` along the cycle.
    pub multiplier: f64,
    pub mean: f64,
    pub stability: Stability,
}

impl PeriodicOrbit {
    /// Builds the record for a cycle given in dynamical order.
    pub fn from_cycle<M: IntervalMap + ?Sized>(map: &M, cycle: Vec<f64>) -> Self {
        let multiplier = cycle.iter().map(|&x| map.derivative(x)).product();
        Self::assemble(cycle, multiplier)
    }

    /// Builds the record for a cycle given in the map's chart coordinates.
    fn chart_inverse_cycle<M: IntervalMap + ?Sized>(map: &M, chart_cycle: &[f64]) -> Self {
        let multiplier = chart_cycle.iter().map(|&u| map.chart_derivative(u)).product();
        let cycle = chart_cycle.iter().map(|&u| map.chart_inverse(u)).collect();
        Self::assemble(cycle, multiplier)
    }

    fn assemble(mut cycle: Vec<f64>, multiplier: f64) -> Self {
        let start = cycle
            .iter()
            .enumerate()
            .min_by(|x, y| x.1.total_cmp(y.1))
            .map_or(0, |(i, _)| i);
        cycle.rotate_left(start);
        let mut points = cycle.clone();
        points.sort_by(f64::total_cmp);
        let mean = cycle.iter().sum::<f64>() / cycle.len() as f64;
        PeriodicOrbit {
            period: cycle.len(),
            points,
            cycle,
            multiplier,
            mean,
            stability: Stability::classify(multiplier),
        }
    }

    pub fn is_attracting(&self) -> bool {
        self.stability == Stability::Attracting
    }

    /// `max_i |f^period(x_i) - x_i|`.
    pub fn return_residual<M: IntervalMap + ?Sized>(&self, map: &M) -> f64 {
        self.cycle
            .iter()
            .map(|&x| (return_map(map, x, self.period).0 - x).abs())
            .fold(0.0, f64::max)
    }

    /// `max_i |f(x_i) - x_{i+1}|` around the stored cycle.
    pub fn closure_residual<M: IntervalMap + ?Sized>(&self, map: &M) -> f64 {
        let n = self.cycle.len();
        (0..n)
            .map(|i| (map.apply(self.cycle[i]) - self.cycle[(i + 1) % n]).abs())
            .fold(0.0, f64::max)
    }

    /// Smallest distance between a point of `self` and a point of `other`.
    pub fn separation(&self, other: &PeriodicOrbit) -> f64 {
        self.points
            .iter()
            .flat_map(|x| other.points.iter().map(move |y| (x - y).abs()))
            .fold(f64::INFINITY, f64::min)
    }

    fn contains_point(&self, x: f64, tol: f64) -> bool {
        self.points.iter().any(|p| (p - x).abs() <= tol)
    }
}

/// `(f^n(x), (f^n)'(x))`.
pub(crate) fn return_map<M: IntervalMap + ?Sized>(map: &M, x: f64, n: usize) -> (f64, f64) {
    let (mut z, mut d) = (x, 1.0);
    for _ in 0..n {
        d *= map.derivative(z);
        z = map.apply(z);
    }
    (z, d)
}

/// The `a` at which the interior fixed point has multiplier `-1`.
pub fn period_doubling_threshold(b: f64) -> Result<f64> {
    if !(b > 0.0 && b < 1.0) {
        return Err(Error::domain("b", b, "(0, 1)"));
    }
    Ok(period_doubling_threshold_unchecked(b))
}

pub fn find_periodic_orbits(p: &Params, n: usize, grid: usize) -> Result<Vec<PeriodicOrbit>> {
    find_periodic_orbits_in(p, n, grid)
}

/// `(F^n(u), (F^n)'(u))` for the map `F` in chart coordinates.
fn chart_return_map<M: IntervalMap + ?Sized>(map: &M, u: f64, n: usize) -> (f64, f64) {
    let (mut z, mut d) = (u, 1.0);
    for _ in 0..n {
        d *= map.chart_derivative(z);
        z = map.chart_apply(z);
    }
    (z, d)
}

/// Orbits of least period exactly `n`, from sign changes of `f^n - id` on a
/// `grid`-cell mesh, uniform in the map's chart, over its search interval.
///
/// Known fixed points are inserted as mesh nodes and divided out, so orbits
/// born from them (e.g. just past a period doubling) still show up as sign
/// changes. They are reported themselves when `n == 1`.
pub fn find_periodic_orbits_in<M: IntervalMap + ?Sized>(map: &M, n: usize, grid: usize) -> Result<Vec<PeriodicOrbit>> {
    if n == 0 {
        return Err(Error::domain("n", 0.0, "[1, inf)"));
    }
    if grid < 10 * n {
        return Err(Error::domain("grid", grid as f64, "at least 10 * n"));
    }
    let (lo, hi) = map.chart_interval();
    let known: Vec<f64> = map
        .known_fixed_points()
        .into_iter()
        .map(|k| map.to_chart(k))
        .filter(|&k| lo <= k && k <= hi && (map.chart_apply(k) - k).abs() <= 1e-12 * (1.0 + k.abs()))
        .collect();

    let node = |i: usize| {
        if i >= grid {
            hi
        } else {
            lo + (hi - lo) * (i as f64 / grid as f64)
        }
    };
    let mut nodes: Vec<f64> = (0..=grid).into_par_iter().map(node).collect();
    nodes.extend(known.iter().copied());
    nodes.sort_by(f64::total_cmp);
    nodes.dedup();

    let deflated = |u: f64| -> f64 {
        let (z, d) = chart_return_map(map, u, n);
        let mut num = z - u;
        let mut den = 1.0;
        for &k in &known {
            if u == k {
                num = d - 1.0;
            } else {
                den *= u - k;
            }
        }
        num / den
    };
    let values: Vec<f64> = nodes.par_iter().map(|&u| deflated(u)).collect();

    let residual = |u: f64| chart_return_map(map, u, n).0 - u;
    let slope = |u: f64| chart_return_map(map, u, n).1 - 1.0;
    let mut roots: Vec<f64> = (0..nodes.len() - 1)
        .into_par_iter()
        .filter_map(|i| {
            let (u0, u1, v0, v1) = (nodes[i], nodes[i + 1], values[i], values[i + 1]);
            if v0 == 0.0 && !known.contains(&u0) {
                return Some(u0);
            }
            if !(v0.is_finite() && v1.is_finite()) || v0 == 0.0 || v1 == 0.0 || (v0 < 0.0) == (v1 < 0.0) {
                return None;
            }
            solve_bracketed(residual, slope, u0, u1, RootOptions::with_residual(1e-12))
                .ok()
                .or_else(|| bisect_to_resolution(residual, u0, u1))
        })
        .collect();
    roots.extend(known.iter().copied());
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|u, v| (*u - *v).abs() <= ROOT_DEDUP_TOL * (1.0 + v.abs()));

    Ok(group_into_orbits(map, &roots, n))
}

/// Groups chart roots into cycles of least period `n`.
fn group_into_orbits<M: IntervalMap + ?Sized>(map: &M, roots: &[f64], n: usize) -> Vec<PeriodicOrbit> {
    let close = |u: f64, v: f64| (u - v).abs() <= SNAP_TOL * (1.0 + v.abs());
    let nearest = |u: f64| -> Option<usize> {
        let i = roots.partition_point(|&r| r < u);
        [i.checked_sub(1), (i < roots.len()).then_some(i)]
            .into_iter()
            .flatten()
            .min_by(|&j, &k| (roots[j] - u).abs().total_cmp(&(roots[k] - u).abs()))
            .filter(|&j| close(roots[j], u))
    };
    let mut used = vec![false; roots.len()];
    let mut orbits = Vec::new();
    for start in 0..roots.len() {
        if used[start] {
            continue;
        }
        let u0 = roots[start];
        let mut iterates = Vec::with_capacity(n + 1);
        let mut z = u0;
        for _ in 0..=n {
            iterates.push(z);
            z = map.chart_apply(z);
        }
        let least = (1..=n).find(|&k| n % k == 0 && close(iterates[k], u0)).unwrap_or(n);
        used[start] = true;
        if least != n {
            continue;
        }
        let mut cycle = vec![u0];
        for &u in &iterates[1..n] {
            match nearest(u) {
                Some(j) => {
                    used[j] = true;
                    cycle.push(roots[j]);
                }
                None => cycle.push(u),
            }
        }
        orbits.push(PeriodicOrbit::chart_inverse_cycle(map, &cycle));
    }
    orbits.sort_by(|x, y| x.points[0].total_cmp(&y.points[0]));
    orbits
}

/// The period-2 orbit `{p, q}` with `p < b < q` that exists past the period
/// doubling threshold.
pub fn period2_orbit(p: &Params) -> Result<PeriodicOrbit> {
    let threshold = period_doubling_threshold_unchecked(p.b());
    if p.a() <= threshold {
        return Err(Error::PreconditionFailed {
            condition: "period-doubling-threshold-not-exceeded".into(),
            margin: p.a() - threshold,
        });
    }
    let b = p.b();
    let m = 1.0 - p.a() * b * (1.0 - b);
    // (f^2(x) - x) / (x - b): negative near 0, tends to m^2 - 1 > 0 at b.
    let deflated = |x: f64| {
        if x == b {
            m * m - 1.0
        } else {
            (return_map(p, x, 2).0 - x) / (x - b)
        }
    };
    let lo = f64::MIN_POSITIVE;
    let x = bisect_to_resolution(deflated, lo, b)
        .filter(|&x| x > lo && x < b)
        .ok_or_else(|| Error::convergence("no sign change of the deflated f^2 - x on (0, b)"))?;
    let residual = |x: f64| return_map(p, x, 2).0 - x;
    let slope = |x: f64| return_map(p, x, 2).1 - 1.0;
    // One safeguarded polish on the undeflated residual within a tight bracket.
    let width = 1e-9 * x.max(1e-300);
    let x = solve_bracketed(
        residual,
        slope,
        x - width,
        (x + width).min(b),
        RootOptions::with_residual(1e-14),
    )
    .unwrap_or(x);
    Ok(PeriodicOrbit::from_cycle(p, vec![x, p.apply(x)]))
}

/// Settings for [`attractors_from_critical_orbits`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttractorOptions {
    pub transient: usize,
    pub max_period: usize,
}

impl Default for AttractorOptions {
    fn default() -> Self {
        AttractorOptions {
            transient: 10_000,
            max_period: 64,
        }
    }
}

/// Where a critical orbit ends up.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Attractor {
    Periodic {
        orbit: PeriodicOrbit,
        /// Critical points whose orbits settle here.
        seeds: Vec<f64>,
    },
    Aperiodic {
        /// Consecutive iterates after the transient.
        samples: Vec<f64>,
        lyapunov: f64,
        seeds: Vec<f64>,
    },
}

impl Attractor {
    pub fn is_attracting(&self) -> bool {
        matches!(self, Attractor::Periodic { orbit, .. } if orbit.is_attracting())
    }

    pub fn orbit(&self) -> Option<&PeriodicOrbit> {
        match self {
            Attractor::Periodic { orbit, .. } => Some(orbit),
            Attractor::Aperiodic { .. } => None,
        }
    }

    pub fn period(&self) -> Option<usize> {
        self.orbit().map(|o| o.period)
    }

    pub fn seeds(&self) -> &[f64] {
        match self {
            Attractor::Periodic { seeds, .. } | Attractor::Aperiodic { seeds, .. } => seeds,
        }
    }

    /// Cycle points, or samples for an aperiodic attractor.
    pub fn points(&self) -> &[f64] {
        match self {
            Attractor::Periodic { orbit, .. } => &orbit.cycle,
            Attractor::Aperiodic { samples, .. } => samples,
        }
    }

    /// `ln|multiplier| / period`, or the sampled estimate.
    pub fn lyapunov(&self) -> f64 {
        match self {
            Attractor::Periodic { orbit, .. } => orbit.multiplier.abs().ln() / orbit.period as f64,
            Attractor::Aperiodic { lyapunov, .. } => *lyapunov,
        }
    }

    fn seeds_mut(&mut self) -> &mut Vec<f64> {
        match self {
            Attractor::Periodic { seeds, .. } | Attractor::Aperiodic { seeds, .. } => seeds,
        }
    }
}

/// Follows both critical orbits past a transient and classifies where they
/// settle. Negative Schwarzian limits the result to two attractors.
///
/// Periodic results are polished by Newton on `f^k(x) - x`; their stability
/// field tells attracting from neutral. Two critical orbits landing on the
/// same cycle produce a single entry with both seeds.
pub fn attractors_from_critical_orbits(p: &Params, transient: usize, max_period: usize) -> Result<Vec<Attractor>> {
    let cp = critical_points(p)?;
    if max_period == 0 {
        return Err(Error::domain("max_period", 0.0, "[1, inf)"));
    }
    let found: Vec<Attractor> = [cp.x_max, cp.x_min]
        .par_iter()
        .map(|&seed| settle(p, seed, transient, max_period))
        .collect();
    let mut out: Vec<Attractor> = Vec::with_capacity(2);
    for att in found {
        let duplicate = out.iter_mut().find(|known| same_attractor(known, &att));
        match duplicate {
            Some(known) => known.seeds_mut().extend_from_slice(att.seeds()),
            None => out.push(att),
        }
    }
    Ok(out)
}

fn same_attractor(x: &Attractor, y: &Attractor) -> bool {
    match (x, y) {
        (Attractor::Periodic { orbit: o1, .. }, Attractor::Periodic { orbit: o2, .. }) => {
            o1.period == o2.period && o1.contains_point(o2.points[0], 1e-7)
        }
        (Attractor::Aperiodic { samples: s1, .. }, Attractor::Aperiodic { samples: s2, .. }) => {
            let hull = |s: &[f64]| {
                s.iter()
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)))
            };
            let ((l1, h1), (l2, h2)) = (hull(s1), hull(s2));
            l1 <= h2 && l2 <= h1
        }
        _ => false,
    }
}

fn settle(p: &Params, seed: f64, transient: usize, max_period: usize) -> Attractor {
    let mut x = seed;
    for _ in 0..transient {
        x = p.apply(x);
    }
    let mut window = Vec::with_capacity(2 * max_period + 1);
    let mut z = x;
    for _ in 0..=2 * max_period {
        window.push(z);
        z = p.apply(z);
    }
    let recurs = |k: usize| (0..k).all(|j| (window[j + k] - window[j]).abs() <= RECURRENCE_TOL);
    if let Some(k) = (1..=max_period).find(|&k| recurs(k)) {
        if let Some(orbit) = polish_cycle(p, x, k) {
            return Attractor::Periodic {
                orbit,
                seeds: vec![seed],
            };
        }
    }
    // Slowly converging cycles (multiplier near one in modulus) get a Newton
    // attempt from the closest near-return.
    let gaps: Vec<f64> = (1..=max_period).map(|k| (window[k] - x).abs()).collect();
    let best = gaps.iter().copied().fold(f64::INFINITY, f64::min);
    if best < 1e-3 {
        let k = 1 + gaps.iter().position(|&g| g <= 10.0 * best).unwrap_or(0);
        if let Some(orbit) = polish_cycle(p, x, k) {
            return Attractor::Periodic {
                orbit,
                seeds: vec![seed],
            };
        }
    }
    let samples = window[..max_period.min(window.len())].to_vec();
    let lyapunov = lyapunov_from(p, x, 10_000);
    Attractor::Aperiodic {
        samples,
        lyapunov,
        seeds: vec![seed],
    }
}

/// A non-repelling cycle of period dividing `k` near `x`.
///
/// Divisors are tried first: at a neutral cycle `f^k(x) - x` has a multiple
/// root that Newton only resolves to about the cube root of rounding, which
/// would otherwise masquerade as a tiny cycle of period `k`. Repelling
/// candidates are skipped since they cannot attract a critical orbit.
fn polish_cycle(p: &Params, x: f64, k: usize) -> Option<PeriodicOrbit> {
    (1..=k).filter(|d| k % d == 0).find_map(|d| {
        let root = newton_return(p, x, d)?;
        let mut cycle = Vec::with_capacity(d);
        let mut z = root;
        for _ in 0..d {
            cycle.push(z);
            z = p.apply(z);
        }
        let orbit = PeriodicOrbit::from_cycle(p, cycle);
        (orbit.multiplier.abs() <= 1.0 + NEUTRAL_BAND).then_some(orbit)
    })
}

fn newton_return(p: &Params, start: f64, k: usize) -> Option<f64> {
    let mut x = start;
    // Linear convergence at neutral cycles needs the longer budget.
    for _ in 0..400 {
        let (z, d) = return_map(p, x, k);
        let step = (z - x) / (d - 1.0);
        if !step.is_finite() {
            break;
        }
        let next = x - step;
        if !(next > 0.0 && next < 1.0) {
            return None;
        }
        x = next;
        if step.abs() <= 4.0 * f64::EPSILON * x {
            break;
        }
    }
    let ok = (return_map(p, x, k).0 - x).abs() <= RECURRENCE_TOL && (x - start).abs() <= 0.05;
    ok.then_some(x)
}

/// Mean of `ln|f'|` over `n` steps after a discarded transient.
pub fn lyapunov_exponent(p: &Params, x0: f64, n: usize, transient: usize) -> Result<f64> {
    if !(x0 > 0.0 && x0 < 1.0) {
        return Err(Error::domain("x0", x0, "(0, 1)"));
    }
    if n < 1000 {
        return Err(Error::domain("n", n as f64, "at least 1000"));
    }
    let mut x = x0;
    for _ in 0..transient {
        x = p.apply(x);
    }
    Ok(lyapunov_from(p, x, n))
}

fn lyapunov_from(p: &Params, mut x: f64, n: usize) -> f64 {
    let mut sum = 0.0;
    for _ in 0..n {
        let mut d = p.slope(x).abs();
        if d == 0.0 {
            d = p.slope(x + 1e-15).abs();
        }
        sum += d.ln();
        x = p.apply(x);
    }
    sum / n as f64
}

/// One attractor at one `a` of a bifurcation scan.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BifurcationSample {
    pub a: f64,
    /// Index of the attractor at this `a`.
    pub branch: usize,
    pub attractor_points: Vec<f64>,
    #[serde(serialize_with = "period_or_aperiodic")]
    pub detected_period: Option<usize>,
    pub lyapunov: f64,
}

fn period_or_aperiodic<S: Serializer>(p: &Option<usize>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match p {
        Some(k) => s.serialize_u64(*k as u64),
        None => s.serialize_str("aperiodic"),
    }
}

pub fn bifurcation_scan(b: f64, a_lo: f64, a_hi: f64, steps: usize, samples: usize) -> Result<Vec<BifurcationSample>> {
    bifurcation_scan_with(b, a_lo, a_hi, steps, samples, AttractorOptions::default())
}

/// Attractors on the uniform grid of `steps` values of `a` in `[a_lo, a_hi]`,
/// in grid order.
pub fn bifurcation_scan_with(
    b: f64,
    a_lo: f64,
    a_hi: f64,
    steps: usize,
    samples: usize,
    opts: AttractorOptions,
) -> Result<Vec<BifurcationSample>> {
    if !(a_lo > 4.0 && a_lo < a_hi && a_hi.is_finite()) {
        return Err(Error::domain("a_lo", a_lo, "4 < a_lo < a_hi"));
    }
    if steps < 2 {
        return Err(Error::domain("steps", steps as f64, "at least 2"));
    }
    Params::new(a_lo, b)?;
    let rows: Vec<Vec<BifurcationSample>> = (0..steps)
        .into_par_iter()
        .map(|i| {
            let a = if i + 1 == steps {
                a_hi
            } else {
                a_lo + (a_hi - a_lo) * (i as f64 / (steps - 1) as f64)
            };
            let p = Params::new(a, b)?;
            let atts = attractors_from_critical_orbits(&p, opts.transient, opts.max_period)?;
            Ok(atts
                .iter()
                .enumerate()
                .map(|(branch, att)| BifurcationSample {
                    a,
                    branch,
                    attractor_points: att.points().iter().take(samples).copied().collect(),
                    detected_period: att.period(),
                    lyapunov: att.lyapunov(),
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    Ok(rows.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conjugacy::h_inv;
    use crate::horseshoe::{admissible_count, Horseshoe};

    fn p(a: f64, b: f64) -> Params {
        Params::new(a, b).unwrap()
    }

    #[test]
    fn threshold_values() {
        assert_eq!(period_doubling_threshold(0.5).unwrap(), 8.0);
        assert!((period_doubling_threshold(1.0 / 3.0).unwrap() - 9.0).abs() < 1e-14);
        assert!(period_doubling_threshold(0.01).unwrap() > period_doubling_threshold(0.1).unwrap());
        assert!(period_doubling_threshold(0.0).is_err());
        assert!(period_doubling_threshold(1.0).is_err());
    }

    #[test]
    fn neutral_fixed_point_at_threshold() {
        let orbits = find_periodic_orbits(&p(8.0, 0.5), 1, 2048).unwrap();
        assert_eq!(orbits.len(), 1);
        assert_eq!(orbits[0].points, vec![0.5]);
        assert!((orbits[0].multiplier + 1.0).abs() < 1e-15);
        assert_eq!(orbits[0].stability, Stability::Neutral);
    }

    #[test]
    fn symmetric_period_two() {
        // mpmath: root of x/(1-x) = exp(a(2x-1)/4) on (0, 1/2)
        let x1 = 0.021_247_987_961_365_63;
        let orbits = find_periodic_orbits(&p(16.0, 0.5), 2, 4096).unwrap();
        assert_eq!(orbits.len(), 1);
        let o = &orbits[0];
        assert!((o.points[0] - x1).abs() < 1e-12);
        assert!((o.points[0] + o.points[1] - 1.0).abs() < 1e-12);
        let direct = period2_orbit(&p(16.0, 0.5)).unwrap();
        assert!((direct.points[0] - x1).abs() < 1e-13);
        assert!((direct.mean - 0.5).abs() < 1e-15);
    }

    #[test]
    fn period_two_straddles_b() {
        let o = period2_orbit(&p(9.1, 1.0 / 3.0)).unwrap();
        // mpmath, 50 digits
        assert!((o.points[0] - 0.263_909_392_583_402_2).abs() < 1e-12);
        assert!((o.points[1] - 0.402_757_274_083_264_5).abs() < 1e-12);
        assert!((o.mean - 1.0 / 3.0).abs() < 1e-8);
        assert!(o.return_residual(&p(9.1, 1.0 / 3.0)) <= 1e-10);
        match period2_orbit(&p(8.9, 1.0 / 3.0)) {
            Err(Error::PreconditionFailed { condition, margin }) => {
                assert_eq!(condition, "period-doubling-threshold-not-exceeded");
                assert!(margin < 0.0);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn period_two_appears_exactly_past_threshold() {
        for b in [0.2, 1.0 / 3.0, 0.5, 0.7] {
            let a0 = period_doubling_threshold(b).unwrap();
            assert!(find_periodic_orbits(&p(a0 - 1e-6, b), 2, 4096).unwrap().is_empty());
            for a in [a0 + 1e-6, a0 + 0.01, a0 + 1.0, a0 + 1.99] {
                let found = find_periodic_orbits(&p(a, b), 2, 4096).unwrap();
                assert_eq!(found.len(), 1, "a={a}, b={b}");
                let direct = period2_orbit(&p(a, b)).unwrap();
                assert!(found[0].separation(&direct) < 1e-9);
                assert!(direct.points[0] < b && b < direct.points[1]);
            }
        }
    }

    #[test]
    fn half_period_two_structure() {
        for a in [8.5, 12.0, 16.0, 40.0] {
            let pp = p(a, 0.5);
            let o = period2_orbit(&pp).unwrap();
            assert!((o.points[0] + o.points[1] - 1.0).abs() < 1e-12, "a={a}");
            assert!(o.multiplier >= 0.0);
        }
    }

    #[test]
    fn large_a_period_two_upper_point() {
        let o = period2_orbit(&p(100.0, 0.25)).unwrap();
        assert!((o.points[1] - 0.5).abs() < 0.025);
    }

    #[test]
    fn orbit_invariants_hold() {
        for (a, b) in [(12.0, 0.3), (20.0, 0.45), (30.0, 1.0 / 3.0)] {
            let pp = p(a, b);
            for n in 1..=6 {
                for o in find_periodic_orbits(&pp, n, DEFAULT_GRID_PER_PERIOD * n).unwrap() {
                    assert_eq!(o.period, n);
                    assert!((o.mean - b).abs() <= 1e-8, "a={a} n={n} mean={}", o.mean);
                    assert!(o.closure_residual(&pp) <= 1e-10);
                    assert!(o.points.windows(2).all(|w| w[0] < w[1]));
                }
            }
        }
    }

    #[test]
    fn horseshoe_orbits_are_repelling_and_counted() {
        let pp = p(30.0, 1.0 / 3.0);
        let shoe = Horseshoe::for_params(&pp).unwrap();
        let (j1, j2) = (shoe.base_interval(0), shoe.base_interval(1));
        let in_k = |x: f64| {
            let y = crate::conjugacy::h_unchecked(x);
            (j1.0..=j1.1).contains(&y) || (j2.0..=j2.1).contains(&y)
        };
        let mut lucas = [0u64; 9];
        for n in 1..=8 {
            let orbits = find_periodic_orbits(&pp, n, 1 << 20).unwrap();
            let inside: Vec<_> = orbits.iter().filter(|o| o.points.iter().all(|&x| in_k(x))).collect();
            for o in &inside {
                assert!(o.multiplier.abs() > 1.0);
            }
            let primitive = inside.len() as u64;
            // Lucas count = sum over divisors d of n of d * (orbits of least period d).
            lucas[n] = primitive * n as u64;
            let total: u64 = (1..=n).filter(|d| n % d == 0).map(|d| lucas[d]).sum();
            assert_eq!(total, admissible_count(n, true), "n={n}");
        }
        let _ = h_inv;
    }

    #[test]
    fn attractor_period_two_at_half() {
        let atts = attractors_from_critical_orbits(&p(8.5, 0.5), 10_000, 64).unwrap();
        assert_eq!(atts.len(), 1);
        assert_eq!(atts[0].period(), Some(2));
        assert!(atts[0].is_attracting());
        assert_eq!(atts[0].seeds().len(), 2);
        // mpmath: smaller period-2 point at a=8.5, b=1/2
        let o = atts[0].orbit().unwrap();
        assert!((o.points[0] - 0.294_950_665_485_570_4).abs() < 1e-12);
    }

    #[test]
    fn attractors_below_threshold_converge_to_b() {
        for a in [5.0, 7.0, 7.9] {
            let atts = attractors_from_critical_orbits(&p(a, 0.5), 10_000, 64).unwrap();
            assert_eq!(atts.len(), 1);
            assert_eq!(atts[0].orbit().unwrap().points, vec![0.5]);
        }
        assert!(matches!(
            attractors_from_critical_orbits(&p(4.0, 0.5), 100, 8),
            Err(Error::MonotoneRegime { .. })
        ));
    }

    #[test]
    fn lyapunov_signs() {
        let l7 = lyapunov_exponent(&p(7.0, 0.5), 0.3, 10_000, 1000).unwrap();
        assert!((l7 - (0.75f64).ln()).abs() < 1e-6);
        // ln|(f^2)'|/2 at the a=8.5 period-2 orbit; mpmath: -0.264466259...
        let l85 = lyapunov_exponent(&p(8.5, 0.5), 0.3, 100_000, 10_000).unwrap();
        assert!((l85 + 0.264_466_259_023_113_4).abs() < 1e-6);
        assert!(lyapunov_exponent(&p(8.5, 0.5), 0.3, 999, 0).is_err());
        assert!(lyapunov_exponent(&p(8.5, 0.5), 1.0, 1000, 0).is_err());
    }

    #[test]
    fn horseshoe_orbit_is_expanding() {
        let pp = p(30.0, 1.0 / 3.0);
        let shoe = Horseshoe::for_params(&pp).unwrap();
        let y = shoe.point_from_itinerary(&"10".parse().unwrap()).unwrap();
        let o = PeriodicOrbit::from_cycle(&pp, vec![y.to_x(), pp.apply(y.to_x())]);
        let rate = o.multiplier.abs().ln() / 2.0;
        assert!(rate >= 0.5 * shoe.certificate().expansion.unwrap().ln());
    }

    #[test]
    fn scan_period_one_then_two() {
        let below = bifurcation_scan(0.5, 6.0, 8.0, 21, 4).unwrap();
        assert_eq!(below.len(), 21);
        for s in &below {
            assert_eq!(s.detected_period, Some(1), "a={}", s.a);
            assert!((s.attractor_points[0] - 0.5).abs() < 1e-9);
        }
        let above = bifurcation_scan(0.5, 8.1, 9.0, 10, 4).unwrap();
        assert!(above.iter().all(|s| s.detected_period == Some(2)));
        let third = bifurcation_scan(1.0 / 3.0, 8.0, 12.0, 41, 4).unwrap();
        let first_two = third.iter().find(|s| s.detected_period == Some(2)).unwrap();
        assert!((first_two.a - 9.0).abs() <= 0.1 + 1e-12);
        assert!(third.windows(2).all(|w| w[0].a <= w[1].a));
        assert!(bifurcation_scan(0.5, 4.0, 9.0, 10, 4).is_err());
        assert!(bifurcation_scan(0.5, 6.0, 9.0, 1, 4).is_err());
    }
}
