use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::certificate::{certify_chart, ConjugateChart, HorseshoeCertificate, Oriented, ReplicatorChart};
use super::word::ItineraryWord;
use crate::conjugacy::YPoint;
use crate::error::{Error, Result};
use crate::map::Params;
use crate::roots::{bisect_to_resolution, solve_bracketed, RootOptions};

pub const MAX_CYLINDER_DEPTH: usize = 40;

/// Residual target for periodic points, relaxed only by the rounding floor
/// `|(g^n)'| * ulp(y)` when the orbit is strongly expanding.
const PERIODIC_RESIDUAL: f64 = 1e-10;

/// Points of `y` whose first `word.len()` iterates visit `J1`/`J2` as spelled by
/// `word` (symbol 0 for `J1`, 1 for `J2`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CylinderInterval {
    pub word: ItineraryWord,
    pub lo: f64,
    pub hi: f64,
}

impl CylinderInterval {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, y: f64) -> bool {
        self.lo <= y && y <= self.hi
    }
}

/// A certified horseshoe together with its coding.
///
/// Construction fails with `CertificateRequired` unless the certificate is
/// valid, so every method can rely on the covering relations.
#[derive(Debug, Clone)]
pub struct Horseshoe<C = ReplicatorChart> {
    chart: C,
    cert: HorseshoeCertificate,
    sigma: f64,
    y_max: f64,
    y_min: f64,
    /// Oriented-frame base intervals.
    j: [(f64, f64); 2],
}

impl Horseshoe<ReplicatorChart> {
    pub fn for_params(p: &Params) -> Result<Self> {
        Horseshoe::new(ReplicatorChart(*p))
    }
}

impl<C: ConjugateChart> Horseshoe<C> {
    pub fn new(chart: C) -> Result<Self> {
        let cert = certify_chart(&chart);
        if !cert.valid {
            return Err(Error::CertificateRequired {
                reason: cert.failure.clone().unwrap_or_default(),
            });
        }
        let lm = cert.landmarks().expect("valid certificate has landmarks");
        Ok(Horseshoe {
            sigma: f64::from(cert.orientation),
            y_max: cert.y_max.unwrap(),
            y_min: cert.y_min.unwrap(),
            j: [(lm.y1_minus, lm.y1_plus), (lm.y2_minus, lm.y2_plus)],
            chart,
            cert,
        })
    }

    pub fn certificate(&self) -> &HorseshoeCertificate {
        &self.cert
    }

    pub fn chart(&self) -> &C {
        &self.chart
    }

    /// `J1` or `J2` (symbol 0 or 1) in the original coordinate.
    pub fn base_interval(&self, symbol: u8) -> (f64, f64) {
        self.unorient(self.j[usize::from(symbol.min(1))])
    }

    fn oriented(&self) -> Oriented<'_, C> {
        Oriented {
            chart: &self.chart,
            sigma: self.sigma,
        }
    }

    fn unorient(&self, (lo, hi): (f64, f64)) -> (f64, f64) {
        if self.sigma > 0.0 {
            (lo, hi)
        } else {
            (-hi, -lo)
        }
    }

    /// The preimage of `[lo, hi]` under the branch of `symbol`.
    ///
    /// Branch 0 is decreasing on `[y_max, y_min]`, branch 1 increasing on
    /// `[y_min, y2_plus]`.
    fn pull_back(&self, symbol: u8, (lo, hi): (f64, f64)) -> Result<(f64, f64)> {
        let map = self.oriented();
        let (a, b) = if symbol == 0 {
            (self.y_max, self.y_min)
        } else {
            (self.y_min, self.j[1].1)
        };
        let inverse = |t: f64| -> Result<f64> {
            let opts = RootOptions::with_residual(1e-11 * (1.0 + t.abs()));
            solve_bracketed(|y| map.g(y) - t, |y| map.gp(y), a, b, opts)
        };
        let (u, v) = (inverse(lo)?, inverse(hi)?);
        Ok(if symbol == 0 { (v, u) } else { (u, v) })
    }

    fn cylinder_oriented(&self, symbols: &[u8]) -> Result<(f64, f64)> {
        let (&last, init) = symbols.split_last().ok_or_else(|| Error::InvalidWord {
            reason: "empty word".into(),
        })?;
        let mut iv = self.j[usize::from(last)];
        for &s in init.iter().rev() {
            iv = self.pull_back(s, iv)?;
        }
        Ok(iv)
    }

    /// Every cylinder of the given depth, sorted by word.
    pub fn cylinder_intervals(&self, depth: usize) -> Result<Vec<CylinderInterval>> {
        if depth == 0 {
            return Err(Error::InvalidWord {
                reason: "depth must be at least 1".into(),
            });
        }
        if depth > MAX_CYLINDER_DEPTH {
            return Err(Error::TooLarge {
                what: "depth",
                value: depth,
                max: MAX_CYLINDER_DEPTH,
            });
        }
        let mut level: Vec<(Vec<u8>, (f64, f64))> = vec![(vec![0], self.j[0]), (vec![1], self.j[1])];
        for _ in 1..depth {
            level = level
                .par_iter()
                .flat_map_iter(|(w, iv)| {
                    let extend = |s: u8| -> Result<(Vec<u8>, (f64, f64))> {
                        let mut word = Vec::with_capacity(w.len() + 1);
                        word.push(s);
                        word.extend_from_slice(w);
                        Ok((word, self.pull_back(s, *iv)?))
                    };
                    let one = (w[0] == 0).then(|| extend(1));
                    std::iter::once(extend(0)).chain(one)
                })
                .collect::<Result<_>>()?;
        }
        level.par_sort_unstable_by(|x, y| x.0.cmp(&y.0));
        level
            .into_iter()
            .map(|(w, iv)| {
                let (lo, hi) = self.unorient(iv);
                Ok(CylinderInterval {
                    word: ItineraryWord::linear(w)?,
                    lo,
                    hi,
                })
            })
            .collect()
    }

    /// The cylinder of a single linearly admissible word.
    pub fn cylinder(&self, word: &ItineraryWord) -> Result<CylinderInterval> {
        if word.len() > MAX_CYLINDER_DEPTH {
            return Err(Error::TooLarge {
                what: "depth",
                value: word.len(),
                max: MAX_CYLINDER_DEPTH,
            });
        }
        let (lo, hi) = self.unorient(self.cylinder_oriented(word.symbols())?);
        Ok(CylinderInterval {
            word: ItineraryWord::linear(word.symbols().to_vec())?,
            lo,
            hi,
        })
    }

    /// `(G^n(y) - y, (G^n)'(y))` in the oriented frame.
    fn return_residual(&self, y: f64, n: usize) -> (f64, f64) {
        let map = self.oriented();
        let (mut z, mut d) = (y, 1.0);
        for _ in 0..n {
            d *= map.gp(z);
            z = map.g(z);
        }
        (z - y, d - 1.0)
    }

    /// The periodic point whose itinerary is the infinite repetition of the
    /// cyclic word `w`.
    ///
    /// The depth-`n` cylinder of `w` is mapped by `g^n` monotonically across
    /// itself, so `g^n(y) - y` changes sign on it and the root is unique.
    pub fn point_from_itinerary(&self, w: &ItineraryWord) -> Result<YPoint> {
        if !w.is_cyclic() {
            return Err(Error::InvalidWord {
                reason: format!("{w} must be cyclically admissible"),
            });
        }
        let n = w.len();
        let (lo, hi) = self.cylinder_oriented(w.symbols())?;
        let floor = |y: f64| {
            let slope = self.return_residual(y, n).1 + 1.0;
            PERIODIC_RESIDUAL.max(8.0 * slope.abs() * f64::EPSILON * (1.0 + y.abs()))
        };
        let tol = floor(lo).max(floor(hi));
        let y = solve_bracketed(
            |y| self.return_residual(y, n).0,
            |y| self.return_residual(y, n).1,
            lo,
            hi,
            RootOptions::with_residual(tol),
        )?;
        let residual = self.return_residual(y, n).0;
        if !(residual.abs() <= floor(y)) {
            return Err(Error::convergence(format!("periodic residual {residual:e} for {w}")));
        }
        let y = YPoint(self.sigma * y);
        let code = self.code_orbit(y, n)?;
        if code.symbols() != w.symbols() {
            return Err(Error::convergence(format!("point for {w} codes as {code}")));
        }
        Ok(y)
    }

    /// The first `n` symbols of the itinerary of `y`.
    pub fn code_orbit(&self, y: YPoint, n: usize) -> Result<ItineraryWord> {
        let map = self.oriented();
        let mut z = self.sigma * y.0;
        let mut symbols = Vec::with_capacity(n);
        for step in 0..n {
            let slack = 1e-12 * (1.0 + z.abs());
            let inside = |(lo, hi): (f64, f64)| lo - slack <= z && z <= hi + slack;
            let s = if inside(self.j[0]) {
                0
            } else if inside(self.j[1]) {
                1
            } else {
                return Err(Error::EscapedSet {
                    step,
                    y: self.sigma * z,
                });
            };
            symbols.push(s);
            z = map.g(z);
        }
        ItineraryWord::linear(symbols)
    }

    /// Solutions of `g^n(y) = y` inside `J1 ∪ J2`, found by sign changes on a
    /// uniform grid of `grid` cells per interval and refined by bisection.
    ///
    /// Independent of the coding: the count checks it rather than assumes it.
    pub fn periodic_points(&self, n: usize, grid: usize) -> Result<Vec<f64>> {
        if n == 0 {
            return Err(Error::domain("n", 0.0, "[1, inf)"));
        }
        let grid = grid.max(2);
        let mut roots = Vec::new();
        for &(lo, hi) in &self.j {
            let step = (hi - lo) / grid as f64;
            let node = |i: usize| if i == grid { hi } else { lo + step * i as f64 };
            let values: Vec<f64> = (0..=grid)
                .into_par_iter()
                .map(|i| self.return_residual(node(i), n).0)
                .collect();
            let brackets: Vec<usize> = (0..grid)
                .filter(|&i| values[i] == 0.0 || values[i].signum() != values[i + 1].signum())
                .collect();
            let found: Vec<f64> = brackets
                .par_iter()
                .map(|&i| {
                    if values[i] == 0.0 {
                        node(i)
                    } else {
                        bisect_to_resolution(|y| self.return_residual(y, n).0, node(i), node(i + 1))
                            .unwrap_or(0.5 * (node(i) + node(i + 1)))
                    }
                })
                .collect();
            roots.extend(found);
        }
        let mut out: Vec<f64> = roots.into_iter().map(|y| self.sigma * y).collect();
        out.sort_by(f64::total_cmp);
        out.dedup_by(|x, y| (*x - *y).abs() <= 1e-9 * (1.0 + y.abs()));
        Ok(out)
    }
}

pub fn cylinder_intervals(p: &Params, depth: usize) -> Result<Vec<CylinderInterval>> {
    Horseshoe::for_params(p)?.cylinder_intervals(depth)
}

pub fn point_from_itinerary(p: &Params, w: &ItineraryWord) -> Result<YPoint> {
    Horseshoe::for_params(p)?.point_from_itinerary(w)
}

pub fn code_orbit(p: &Params, y: YPoint, n: usize) -> Result<ItineraryWord> {
    Horseshoe::for_params(p)?.code_orbit(y, n)
}
