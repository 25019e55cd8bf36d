//! Argument definitions and the numeric micro-formats of the flags.
//!
//! Rectangles are "x_min,x_max,y_min,y_max", points are "re,im", brackets
//! are "lo,hi". Every numeric position accepts a `pi` suffix which is
//! multiplied out, e.g. `--domain -10,10,-1.5pi,1.5pi`.

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use sepkit_core::{Complex64, Rectangle};

use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "sepkit", version, about = "Separatrix toolkit for holomorphic flows ż = f(z)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// TOML config file; flags override file values, file values override
    /// built-in defaults.
    #[arg(long, global = true, value_name = "FILE.toml")]
    pub config: Option<PathBuf>,

    /// Relative integration tolerance.
    #[arg(long, global = true)]
    pub rtol: Option<f64>,

    /// Absolute integration tolerance.
    #[arg(long, global = true)]
    pub atol: Option<f64>,

    /// Suppress progress notes on stderr.
    #[arg(long, global = true)]
    pub quiet: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate a seed grid of trajectories and render a phase portrait.
    Portrait {
        /// Function expression f(z).
        #[arg(long = "f", value_name = "EXPR")]
        function: String,
        /// Plot window "XMIN,XMAX,YMIN,YMAX".
        #[arg(long, allow_hyphen_values = true)]
        domain: Option<String>,
        /// Seeds per axis (grid² trajectories).
        #[arg(long)]
        grid: Option<usize>,
        /// Output SVG path.
        #[arg(long)]
        out: Option<PathBuf>,
        /// svg: portrait only; csv: also write per-trajectory CSV files.
        #[arg(long, value_enum)]
        format: Option<OutputFormat>,
    },
    /// Sample f on a grid and render the normalized direction field.
    Field {
        #[arg(long = "f", value_name = "EXPR")]
        function: String,
        #[arg(long, allow_hyphen_values = true)]
        domain: Option<String>,
        #[arg(long)]
        grid: Option<usize>,
        /// Output SVG path; the raw samples CSV lands next to it.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Locate and classify the zeros of f in the domain.
    Equilibria {
        #[arg(long = "f", value_name = "EXPR")]
        function: String,
        #[arg(long, allow_hyphen_values = true)]
        domain: Option<String>,
        #[arg(long)]
        grid: Option<usize>,
        /// Output JSON path (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Localize separatrices by one of the four methods.
    Separatrix {
        #[arg(long = "f", value_name = "EXPR")]
        function: String,
        #[arg(long, value_enum)]
        method: MethodArg,
        /// index: scan segment "RE1,IM1,RE2,IM2".
        #[arg(long, allow_hyphen_values = true)]
        segment: Option<String>,
        /// index: probe offset and walk step.
        #[arg(long)]
        epsilon: Option<f64>,
        /// bvp: target Re z(t1).
        #[arg(long, allow_negative_numbers = true)]
        xstar: Option<f64>,
        /// bvp: end time of the shooting horizon (t0 = 0).
        #[arg(long)]
        t1: Option<f64>,
        /// bvp: outer search bracket "LO,HI" for Im z(t0).
        #[arg(long, allow_hyphen_values = true)]
        bracket: Option<String>,
        /// curvature: trajectory seed "RE,IM".
        #[arg(long, allow_hyphen_values = true)]
        seed: Option<String>,
        /// index/zdp: search domain (also locates the flanking centers).
        #[arg(long, allow_hyphen_values = true)]
        domain: Option<String>,
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Forward/backward escape-time report for one start point.
    Escape {
        #[arg(long = "f", value_name = "EXPR")]
        function: String,
        /// Start point "RE,IM".
        #[arg(long, allow_hyphen_values = true)]
        z0: String,
        /// Integration time budget per direction.
        #[arg(long)]
        tmax: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Svg,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Index,
    Zdp,
    Bvp,
    Curvature,
}

impl MethodArg {
    pub fn name(self) -> &'static str {
        match self {
            MethodArg::Index => "index",
            MethodArg::Zdp => "zdp",
            MethodArg::Bvp => "bvp",
            MethodArg::Curvature => "curvature",
        }
    }
}

/// One number, with an optional `pi` factor suffix: "2", "-1.5pi", "pi".
pub fn parse_scalar(text: &str) -> Result<f64, CliError> {
    let t = text.trim();
    let (mantissa, pi) = match t.strip_suffix("pi") {
        Some(rest) => (rest.trim(), std::f64::consts::PI),
        None => (t, 1.0),
    };
    let value = if mantissa.is_empty() {
        1.0
    } else if mantissa == "-" {
        -1.0
    } else {
        mantissa
            .parse::<f64>()
            .map_err(|_| CliError::usage("number", format!("`{t}`")))?
    };
    Ok(value * pi)
}

fn parse_fields<const N: usize>(what: &'static str, text: &str) -> Result<[f64; N], CliError> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != N {
        return Err(CliError::usage(
            what,
            format!("`{text}` (expected {N} comma-separated values)"),
        ));
    }
    let mut out = [0.0; N];
    for (slot, part) in out.iter_mut().zip(parts) {
        *slot = parse_scalar(part)?;
    }
    Ok(out)
}

pub fn parse_domain(text: &str) -> Result<Rectangle, CliError> {
    let [x_min, x_max, y_min, y_max] = parse_fields("domain", text)?;
    if x_min >= x_max || y_min >= y_max {
        return Err(CliError::usage("domain", format!("`{text}` is degenerate")));
    }
    Ok(Rectangle::new(x_min, x_max, y_min, y_max))
}

pub fn parse_point(what: &'static str, text: &str) -> Result<Complex64, CliError> {
    let [re, im] = parse_fields(what, text)?;
    Ok(Complex64::new(re, im))
}

pub fn parse_segment(text: &str) -> Result<(Complex64, Complex64), CliError> {
    let [re1, im1, re2, im2] = parse_fields("segment", text)?;
    Ok((Complex64::new(re1, im1), Complex64::new(re2, im2)))
}

pub fn parse_bracket(text: &str) -> Result<(f64, f64), CliError> {
    let [lo, hi] = parse_fields("bracket", text)?;
    if lo >= hi {
        return Err(CliError::usage("bracket", format!("`{text}` is degenerate")));
    }
    Ok((lo, hi))
}
