use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Clone, Parser)]
#[command(
    name = "repmap",
    version,
    about = "Replicator map dynamics: orbits, bifurcations, horseshoes and equal-mean maps"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    pub format: Format,

    /// Write the document here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// A member of the replicator family.
#[derive(Debug, Clone, Copy, Args)]
pub struct MapArgs {
    /// Selection intensity a > 0.
    #[arg(long, allow_hyphen_values = true)]
    pub a: f64,

    /// Interior fixed point b in (0, 1), as a decimal or an exact ratio "p/q".
    #[arg(long, value_parser = parse_real, allow_hyphen_values = true)]
    pub b: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    /// H = ln((1 - x) / x) / a on (0, 1).
    Replicator,
    /// H = -ln x on (0, inf), giving f(x) = x e^(b - x).
    Ricker,
    /// H = -tan(x) / a on (-pi/2, pi/2).
    Arctan,
    /// H = -Phi^-1(x) / a on (0, 1).
    Probit,
}

#[derive(Debug, Clone, Copy, Args)]
pub struct FamilyArgs {
    #[arg(long, value_enum)]
    pub family: Family,

    /// Family scale; unused by ricker. Defaults to 10 for probit.
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<f64>,

    /// Mean of every invariant measure. Defaults to 0.4 for probit.
    #[arg(long, value_parser = parse_real, allow_hyphen_values = true)]
    pub b: Option<f64>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// The orbit x0, f(x0), ..., f^n(x0).
    Iterate {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long, value_parser = parse_real, allow_hyphen_values = true)]
        x0: f64,
        #[arg(long, default_value_t = 100)]
        n: usize,
    },
    /// The fixed points 0, b, 1 with multipliers.
    FixedPoints {
        #[command(flatten)]
        map: MapArgs,
    },
    /// Turning points and critical values (a > 4).
    CriticalPoints {
        #[command(flatten)]
        map: MapArgs,
    },
    /// Periodic orbits of least period n.
    Orbits {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long)]
        period: usize,
        /// Grid cells; defaults to 2048 * period.
        #[arg(long)]
        grid: Option<usize>,
    },
    /// The period-2 orbit born at the period-doubling threshold.
    Period2 {
        #[command(flatten)]
        map: MapArgs,
    },
    /// Attractors reached by the critical orbits.
    Attractors {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long, default_value_t = 10_000)]
        transient: usize,
        #[arg(long, default_value_t = 64)]
        max_period: usize,
    },
    /// Attractor points over a range of a at fixed b.
    Bifurcation {
        #[arg(long, value_parser = parse_real, allow_hyphen_values = true)]
        b: f64,
        #[arg(long, allow_hyphen_values = true)]
        a_lo: f64,
        #[arg(long, allow_hyphen_values = true)]
        a_hi: f64,
        #[arg(long, default_value_t = 300)]
        steps: usize,
        /// Points emitted per attractor.
        #[arg(long, default_value_t = 64)]
        samples: usize,
        #[arg(long, default_value_t = 10_000)]
        transient: usize,
        #[arg(long, default_value_t = 64)]
        max_period: usize,
    },
    /// Lyapunov exponent along an orbit.
    Lyapunov {
        #[command(flatten)]
        map: MapArgs,
        /// Starting point; defaults to the left turning point, or 1/2 for a <= 4.
        #[arg(long, value_parser = parse_real, allow_hyphen_values = true)]
        x0: Option<f64>,
        #[arg(long, default_value_t = 100_000)]
        n: usize,
        #[arg(long, default_value_t = 10_000)]
        transient: usize,
    },
    /// Horseshoe certificate in the conjugate coordinate.
    Certify {
        #[command(flatten)]
        map: MapArgs,
    },
    /// Cylinder intervals of a certified horseshoe.
    Cylinders {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long, default_value_t = 12)]
        depth: usize,
    },
    /// The periodic point with a given cyclic itinerary.
    Itinerary {
        #[command(flatten)]
        map: MapArgs,
        /// Cyclic word over {0, 1} without adjacent 1s, e.g. "010".
        #[arg(long)]
        word: String,
    },
    /// The itinerary of a point of the horseshoe.
    Code {
        #[command(flatten)]
        map: MapArgs,
        /// Point in the conjugate coordinate y = ln((1 - x) / x).
        #[arg(
            long,
            allow_hyphen_values = true,
            conflicts_with = "x",
            required_unless_present = "x"
        )]
        y: Option<f64>,
        /// Point in the original coordinate.
        #[arg(long, value_parser = parse_real, allow_hyphen_values = true)]
        x: Option<f64>,
        #[arg(long)]
        n: usize,
    },
    /// Mean of every periodic orbit up to a period, against b.
    MeanCheck {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, default_value_t = 6)]
        max_period: usize,
        /// Grid cells per unit of period.
        #[arg(long, default_value_t = 2048)]
        grid_per_period: usize,
    },
    /// Residual of H(f(x)) - H(x) - (x - b) on a mesh of the absorbing interval.
    Cohomology {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, default_value_t = 10_000)]
        grid: usize,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Iterate { .. } => "iterate",
            Command::FixedPoints { .. } => "fixed-points",
            Command::CriticalPoints { .. } => "critical-points",
            Command::Orbits { .. } => "orbits",
            Command::Period2 { .. } => "period2",
            Command::Attractors { .. } => "attractors",
            Command::Bifurcation { .. } => "bifurcation",
            Command::Lyapunov { .. } => "lyapunov",
            Command::Certify { .. } => "certify",
            Command::Cylinders { .. } => "cylinders",
            Command::Itinerary { .. } => "itinerary",
            Command::Code { .. } => "code",
            Command::MeanCheck { .. } => "mean-check",
            Command::Cohomology { .. } => "cohomology",
        }
    }
}

/// A decimal, or a ratio `p/q`. Integer `p` and `q` below 2^53 give the
/// correctly rounded value of the exact fraction.
pub fn parse_real(s: &str) -> Result<f64, String> {
    let number = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
    let value = match s.split_once('/') {
        Some((p, q)) => {
            let (p, q) = (number(p)?, number(q)?);
            if q == 0.0 {
                return Err(format!("{s:?}: zero denominator"));
            }
            p / q
        }
        None => number(s)?,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(format!("{s:?} is not finite"))
    }
}
