use anyhow::{anyhow, Result};
use repmap_core::conjugacy::{h, h_inv};
use repmap_core::horseshoe::{certify, code_orbit, cylinder_intervals, point_from_itinerary};
use repmap_core::map::{critical_points, fixed_points, iterate};
use repmap_core::meanclass::{
    arctan_spec, make_map_from_H, orbit_mean_check, probit_spec, replicator_spec, ricker_spec, verify_cohomology,
    MeanMapSpec, PROBIT_DEFAULT_A, PROBIT_DEFAULT_B,
};
use repmap_core::orbits::{
    attractors_from_critical_orbits, bifurcation_scan_with, find_periodic_orbits, find_periodic_orbits_in,
    lyapunov_exponent, period2_orbit, DEFAULT_GRID_PER_PERIOD,
};
use repmap_core::{AttractorOptions, Error as CoreError, ItineraryWord, Params, PeriodicOrbit, YPoint};
use serde::Serialize;

use crate::args::{Cli, Command, Family, FamilyArgs, MapArgs};
use crate::report::{num, opt, Report};

/// A rendered result plus the condition to report after emitting it, if any.
pub struct Outcome {
    pub report: Report,
    pub failure: Option<CoreError>,
}

impl From<Report> for Outcome {
    fn from(report: Report) -> Self {
        Outcome { report, failure: None }
    }
}

struct Config(Vec<(String, String)>);

impl Config {
    fn new(cli: &Cli) -> Self {
        Config(vec![("command".into(), cli.command.name().into())])
    }

    fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.0.push((key.into(), value.to_string()));
        self
    }

    fn real(self, key: &str, value: f64) -> Self {
        self.with(key, num(value))
    }

    fn map(self, m: &MapArgs) -> Self {
        self.real("a", m.a).real("b", m.b)
    }
}

const ORBIT_HEADER: [&str; 7] = ["orbit", "period", "k", "x", "multiplier", "mean", "stability"];

fn orbit_rows(orbits: &[PeriodicOrbit]) -> Vec<Vec<String>> {
    orbits
        .iter()
        .enumerate()
        .flat_map(|(i, o)| {
            o.cycle.iter().enumerate().map(move |(k, &x)| {
                vec![
                    i.to_string(),
                    o.period.to_string(),
                    k.to_string(),
                    num(x),
                    num(o.multiplier),
                    num(o.mean),
                    o.stability.as_str().into(),
                ]
            })
        })
        .collect()
}

pub fn execute(cli: &Cli) -> Result<Outcome> {
    let cfg = Config::new(cli);
    Ok(match &cli.command {
        Command::Iterate { map, x0, n } => {
            let p = params(map)?;
            let orbit = iterate(&p, *x0, *n)?;
            #[derive(Serialize)]
            struct Doc<'a> {
                params: Params,
                x0: f64,
                orbit: &'a [f64],
            }
            let rows = orbit
                .iter()
                .enumerate()
                .map(|(k, &x)| vec![k.to_string(), num(x)])
                .collect();
            let cfg = cfg.map(map).real("x0", *x0).with("n", n);
            Report::new(
                cfg.0,
                vec!["n", "x"],
                rows,
                &Doc {
                    params: p,
                    x0: *x0,
                    orbit: &orbit,
                },
            )?
            .into()
        }
        Command::FixedPoints { map } => {
            let p = params(map)?;
            let fps = fixed_points(&p);
            let rows = fps
                .iter()
                .map(|r| vec![num(r.location), num(r.multiplier), r.classification.as_str().into()])
                .collect();
            Report::new(
                cfg.map(map).0,
                vec!["location", "multiplier", "classification"],
                rows,
                &fps,
            )?
            .into()
        }
        Command::CriticalPoints { map } => {
            let cp = critical_points(&params(map)?)?;
            let rows = vec![vec![num(cp.x_max), num(cp.x_min), num(cp.f_max), num(cp.f_min)]];
            Report::new(cfg.map(map).0, vec!["x_max", "x_min", "f_max", "f_min"], rows, &cp)?.into()
        }
        Command::Orbits { map, period, grid } => {
            let p = params(map)?;
            let grid = grid.unwrap_or(DEFAULT_GRID_PER_PERIOD * period);
            let orbits = find_periodic_orbits(&p, *period, grid)?;
            let cfg = cfg.map(map).with("period", period).with("grid", grid);
            Report::new(cfg.0, ORBIT_HEADER.to_vec(), orbit_rows(&orbits), &orbits)?.into()
        }
        Command::Period2 { map } => {
            let orbit = period2_orbit(&params(map)?)?;
            Report::new(
                cfg.map(map).0,
                ORBIT_HEADER.to_vec(),
                orbit_rows(std::slice::from_ref(&orbit)),
                &orbit,
            )?
            .into()
        }
        Command::Attractors {
            map,
            transient,
            max_period,
        } => {
            let atts = attractors_from_critical_orbits(&params(map)?, *transient, *max_period)?;
            let mut rows = Vec::new();
            for (i, att) in atts.iter().enumerate() {
                let kind = if att.orbit().is_some() { "periodic" } else { "aperiodic" };
                let period = att.period().map_or_else(|| "aperiodic".into(), |n| n.to_string());
                let multiplier = att.orbit().map_or_else(String::new, |o| num(o.multiplier));
                for (k, &x) in att.points().iter().enumerate() {
                    rows.push(vec![
                        i.to_string(),
                        kind.into(),
                        period.clone(),
                        k.to_string(),
                        num(x),
                        multiplier.clone(),
                        num(att.lyapunov()),
                    ]);
                }
            }
            let cfg = cfg.map(map).with("transient", transient).with("max_period", max_period);
            let header = vec!["attractor", "kind", "period", "k", "x", "multiplier", "lyapunov"];
            Report::new(cfg.0, header, rows, &atts)?.into()
        }
        Command::Bifurcation {
            b,
            a_lo,
            a_hi,
            steps,
            samples,
            transient,
            max_period,
        } => {
            let opts = AttractorOptions {
                transient: *transient,
                max_period: *max_period,
            };
            let scan = bifurcation_scan_with(*b, *a_lo, *a_hi, *steps, *samples, opts)?;
            let rows = scan
                .iter()
                .flat_map(|s| {
                    let period = s.detected_period.map_or_else(|| "aperiodic".into(), |n| n.to_string());
                    s.attractor_points
                        .iter()
                        .map(move |&x| vec![num(s.a), s.branch.to_string(), num(x), period.clone(), num(s.lyapunov)])
                })
                .collect();
            let cfg = cfg
                .real("b", *b)
                .real("a_lo", *a_lo)
                .real("a_hi", *a_hi)
                .with("steps", steps)
                .with("samples", samples)
                .with("transient", transient)
                .with("max_period", max_period);
            Report::new(cfg.0, vec!["a", "branch", "x", "period", "lyapunov"], rows, &scan)?.into()
        }
        Command::Lyapunov { map, x0, n, transient } => {
            let p = params(map)?;
            let x0 = x0.unwrap_or_else(|| critical_points(&p).map_or(0.5, |c| c.x_max));
            let lyapunov = lyapunov_exponent(&p, x0, *n, *transient)?;
            #[derive(Serialize)]
            struct Doc {
                params: Params,
                x0: f64,
                n: usize,
                transient: usize,
                lyapunov: f64,
            }
            let rows = vec![vec![num(x0), n.to_string(), transient.to_string(), num(lyapunov)]];
            let cfg = cfg.map(map).real("x0", x0).with("n", n).with("transient", transient);
            let doc = Doc {
                params: p,
                x0,
                n: *n,
                transient: *transient,
                lyapunov,
            };
            Report::new(cfg.0, vec!["x0", "n", "transient", "lyapunov"], rows, &doc)?.into()
        }
        Command::Certify { map } => {
            let c = certify(&params(map)?);
            let row = vec![
                num(c.params.a()),
                num(c.params.b()),
                c.orientation.to_string(),
                opt(c.y_max),
                opt(c.y_min),
                opt(c.g_min),
                opt(c.g_max),
                opt(c.y1_minus),
                opt(c.y1_plus),
                opt(c.y2_minus),
                opt(c.y2_plus),
                opt(c.margin1),
                opt(c.margin2),
                opt(c.margin3),
                opt(c.covering_margin),
                opt(c.expansion),
                c.valid.to_string(),
                c.failure.clone().unwrap_or_default(),
            ];
            let header = vec![
                "a",
                "b",
                "orientation",
                "y_max",
                "y_min",
                "g_min",
                "g_max",
                "y1_minus",
                "y1_plus",
                "y2_minus",
                "y2_plus",
                "margin1",
                "margin2",
                "margin3",
                "covering_margin",
                "expansion",
                "valid",
                "failure",
            ];
            Outcome {
                report: Report::new(cfg.map(map).0, header, vec![row], &c)?,
                failure: c.to_error(),
            }
        }
        Command::Cylinders { map, depth } => {
            let cyls = cylinder_intervals(&params(map)?, *depth)?;
            #[derive(Serialize)]
            struct Row {
                word: String,
                lo: f64,
                hi: f64,
                width: f64,
            }
            let doc: Vec<Row> = cyls
                .iter()
                .map(|c| Row {
                    word: c.word.to_string(),
                    lo: c.lo,
                    hi: c.hi,
                    width: c.width(),
                })
                .collect();
            let rows = doc
                .iter()
                .map(|r| vec![r.word.clone(), num(r.lo), num(r.hi), num(r.width)])
                .collect();
            Report::new(
                cfg.map(map).with("depth", depth).0,
                vec!["word", "lo", "hi", "width"],
                rows,
                &doc,
            )?
            .into()
        }
        Command::Itinerary { map, word } => {
            let w: ItineraryWord = word.parse()?;
            let y = point_from_itinerary(&params(map)?, &w)?;
            #[derive(Serialize)]
            struct Doc {
                word: String,
                y: f64,
                x: f64,
            }
            let doc = Doc {
                word: w.to_string(),
                y: y.0,
                x: y.to_x(),
            };
            let rows = vec![vec![doc.word.clone(), num(doc.y), num(doc.x)]];
            Report::new(cfg.map(map).with("word", &w).0, vec!["word", "y", "x"], rows, &doc)?.into()
        }
        Command::Code { map, y, x, n } => {
            let y = match (y, x) {
                (Some(y), _) => *y,
                (None, Some(x)) => h(*x)?,
                (None, None) => return Err(anyhow!("one of --y or --x is required")),
            };
            let word = code_orbit(&params(map)?, YPoint(y), *n)?;
            #[derive(Serialize)]
            struct Doc {
                y: f64,
                x: f64,
                n: usize,
                word: String,
            }
            let doc = Doc {
                y,
                x: h_inv(y),
                n: *n,
                word: word.to_string(),
            };
            let rows = vec![vec![num(doc.y), num(doc.x), n.to_string(), doc.word.clone()]];
            Report::new(
                cfg.map(map).real("y", y).with("n", n).0,
                vec!["y", "x", "n", "word"],
                rows,
                &doc,
            )?
            .into()
        }
        Command::MeanCheck {
            family,
            max_period,
            grid_per_period,
        } => {
            let fam = resolve(family)?;
            let mut doc = MeanCheck {
                family: fam.name,
                a: fam.a,
                b: fam.b,
                orbits: Vec::new(),
            };
            for n in 1..=*max_period {
                let grid = grid_per_period * n;
                match fam.family {
                    Family::Replicator => {
                        let p = Params::new(fam.a.unwrap_or_default(), fam.b)?;
                        for o in find_periodic_orbits(&p, n, grid)? {
                            let closure = o.closure_residual(&p);
                            doc.push(o, closure, fam.b);
                        }
                    }
                    _ => {
                        let map = make_map_from_H(&fam.spec)?;
                        for o in find_periodic_orbits_in(&map, n, grid)? {
                            orbit_mean_check(&fam.spec, &o)?;
                            let closure = o.closure_residual(&map);
                            doc.push(o, closure, fam.b);
                        }
                    }
                }
            }
            let rows = doc
                .orbits
                .iter()
                .enumerate()
                .map(|(i, r)| {
                    vec![
                        i.to_string(),
                        r.period.to_string(),
                        num(r.mean),
                        num(r.deviation),
                        num(r.closure_residual),
                        num(r.multiplier),
                    ]
                })
                .collect();
            let cfg = fam
                .config(cfg)
                .with("max_period", max_period)
                .with("grid_per_period", grid_per_period);
            let header = vec!["orbit", "period", "mean", "deviation", "closure_residual", "multiplier"];
            Report::new(cfg.0, header, rows, &doc)?.into()
        }
        Command::Cohomology { family, grid } => {
            let fam = resolve(family)?;
            let residual = verify_cohomology(&fam.spec, *grid)?;
            let (lo, hi) = fam.spec.search_interval();
            #[derive(Serialize)]
            struct Doc {
                family: &'static str,
                a: Option<f64>,
                b: f64,
                interval: (f64, f64),
                grid: usize,
                residual: f64,
            }
            let doc = Doc {
                family: fam.name,
                a: fam.a,
                b: fam.b,
                interval: (lo, hi),
                grid: *grid,
                residual,
            };
            let rows = vec![vec![num(lo), num(hi), grid.to_string(), num(residual)]];
            let cfg = fam.config(cfg).with("grid", grid);
            Report::new(cfg.0, vec!["lo", "hi", "grid", "residual"], rows, &doc)?.into()
        }
    })
}

fn params(m: &MapArgs) -> Result<Params> {
    Ok(Params::new(m.a, m.b)?)
}

#[derive(Serialize)]
struct MeanCheck {
    family: &'static str,
    a: Option<f64>,
    b: f64,
    orbits: Vec<MeanRow>,
}

#[derive(Serialize)]
struct MeanRow {
    period: usize,
    cycle: Vec<f64>,
    mean: f64,
    deviation: f64,
    closure_residual: f64,
    multiplier: f64,
}

impl MeanCheck {
    fn push(&mut self, o: PeriodicOrbit, closure_residual: f64, b: f64) {
        self.orbits.push(MeanRow {
            period: o.period,
            deviation: (o.mean - b).abs(),
            mean: o.mean,
            cycle: o.cycle,
            closure_residual,
            multiplier: o.multiplier,
        });
    }
}

struct Resolved {
    family: Family,
    name: &'static str,
    a: Option<f64>,
    b: f64,
    spec: MeanMapSpec,
}

impl Resolved {
    fn config(&self, cfg: Config) -> Config {
        let cfg = cfg.with("family", self.name);
        let cfg = match self.a {
            Some(a) => cfg.real("a", a),
            None => cfg,
        };
        cfg.real("b", self.b)
    }
}

fn resolve(args: &FamilyArgs) -> Result<Resolved> {
    let need =
        |v: Option<f64>, flag: &str, name: &str| v.ok_or_else(|| anyhow!("--{flag} is required for family {name}"));
    let (name, a, b, spec) = match args.family {
        Family::Replicator => {
            let (a, b) = (need(args.a, "a", "replicator")?, need(args.b, "b", "replicator")?);
            ("replicator", Some(a), b, replicator_spec(&Params::new(a, b)?)?)
        }
        Family::Ricker => {
            let b = need(args.b, "b", "ricker")?;
            ("ricker", None, b, ricker_spec(b)?)
        }
        Family::Arctan => {
            let (a, b) = (need(args.a, "a", "arctan")?, need(args.b, "b", "arctan")?);
            ("arctan", Some(a), b, arctan_spec(a, b)?)
        }
        Family::Probit => {
            let (a, b) = (args.a.unwrap_or(PROBIT_DEFAULT_A), args.b.unwrap_or(PROBIT_DEFAULT_B));
            ("probit", Some(a), b, probit_spec(a, b)?)
        }
    };
    Ok(Resolved {
        family: args.family,
        name,
        a,
        b,
        spec,
    })
}
