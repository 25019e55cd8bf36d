//! JSON documents and CSV writers.
//!
//! JSON is the canonical machine format: one top-level object
//! {config, results, diagnostics} with lower_snake_case fields, written
//! byte-identically for identical configs (ordered maps, no timestamps).
//! CSV is per-trajectory / per-grid convenience.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use sepkit_core::{
    Complex64, ContourPolyline, Equilibrium, EquilibriumKind, EscapeReport, SeparatrixCandidate,
    Termination, Trajectory,
};

use crate::config::ConfigEcho;
use crate::CliError;

#[derive(Debug, Serialize)]
pub struct Document<R: Serialize> {
    pub config: ConfigEcho,
    pub results: Vec<R>,
    pub diagnostics: BTreeMap<String, serde_json::Value>,
}

impl<R: Serialize> Document<R> {
    pub fn new(config: ConfigEcho, results: Vec<R>) -> Self {
        Self {
            config,
            results,
            diagnostics: BTreeMap::new(),
        }
    }

    pub fn diagnostic(&mut self, key: &str, value: impl Into<serde_json::Value>) {
        self.diagnostics.insert(key.to_string(), value.into());
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("serializable document");
        text.push('\n');
        text
    }

    /// Writes to the path, or stdout when no path is given.
    pub fn emit(&self, out: Option<&Path>) -> Result<(), CliError> {
        let text = self.to_json();
        match out {
            Some(path) => std::fs::write(path, text)?,
            None => std::io::stdout().write_all(text.as_bytes())?,
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct PointJson {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for PointJson {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

#[derive(Debug, Serialize)]
pub struct EquilibriumJson {
    pub location: PointJson,
    pub f_prime: PointJson,
    pub kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stable: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub orientation: Option<i32>,
    pub residual: f64,
}

impl From<&Equilibrium> for EquilibriumJson {
    fn from(e: &Equilibrium) -> Self {
        let (kind, stable, orientation) = match e.kind {
            EquilibriumKind::Node { stable } => ("node", Some(stable), None),
            EquilibriumKind::Center { orientation } => ("center", None, Some(orientation)),
            EquilibriumKind::Focus {
                stable,
                orientation,
            } => ("focus", Some(stable), Some(orientation)),
            EquilibriumKind::Degenerate => ("degenerate", None, None),
        };
        Self {
            location: e.location.into(),
            f_prime: e.f_prime.into(),
            kind,
            stable,
            orientation,
            residual: e.residual,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct CandidateJson {
    pub location: PointJson,
    pub method: &'static str,
    pub residual: f64,
    pub converged: bool,
    pub diagnostics: BTreeMap<&'static str, f64>,
}

impl From<&SeparatrixCandidate> for CandidateJson {
    fn from(c: &SeparatrixCandidate) -> Self {
        Self {
            location: c.location.into(),
            method: c.method.name(),
            residual: c.residual,
            converged: c.converged,
            diagnostics: c.diagnostics.clone(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ContourPointJson {
    pub re: f64,
    pub im: f64,
    pub residual: f64,
}

#[derive(Debug, Serialize)]
pub struct PolylineJson {
    pub points: Vec<ContourPointJson>,
}

impl From<&ContourPolyline> for PolylineJson {
    fn from(pl: &ContourPolyline) -> Self {
        Self {
            points: pl
                .points
                .iter()
                .map(|p| ContourPointJson {
                    re: p.location.re,
                    im: p.location.im,
                    residual: p.residual,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct VerdictJson {
    pub verdict: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub escape_time: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub period: Option<f64>,
}

impl From<Termination> for VerdictJson {
    fn from(t: Termination) -> Self {
        match t {
            Termination::MaxTime => Self {
                verdict: "max_time",
                escape_time: None,
                period: None,
            },
            Termination::BlowUp { escape_time } => Self {
                verdict: "blow_up",
                escape_time: Some(escape_time),
                period: None,
            },
            Termination::ClosedOrbit { period } => Self {
                verdict: "closed_orbit",
                escape_time: None,
                period: Some(period),
            },
            Termination::StepUnderflow => Self {
                verdict: "step_underflow",
                escape_time: None,
                period: None,
            },
            Termination::GuardExit => Self {
                verdict: "guard_exit",
                escape_time: None,
                period: None,
            },
        }
    }
}

#[derive(Debug, Serialize)]
pub struct EscapeJson {
    pub forward: VerdictJson,
    pub backward: VerdictJson,
    pub positive_separatrix: bool,
    pub negative_separatrix: bool,
}

impl From<&EscapeReport> for EscapeJson {
    fn from(r: &EscapeReport) -> Self {
        Self {
            forward: r.forward.into(),
            backward: r.backward.into(),
            positive_separatrix: r.is_positive_separatrix,
            negative_separatrix: r.is_negative_separatrix,
        }
    }
}

/// Trajectory CSV: header "t,re,im", one sample per row, LF-terminated.
pub fn trajectory_csv(traj: &Trajectory) -> String {
    let mut out = String::from("t,re,im\n");
    for &(t, z) in &traj.samples {
        out.push_str(&format!("{t:?},{:?},{:?}\n", z.re, z.im));
    }
    out
}

/// Direction-field CSV: header "x,y,fx,fy", one grid node per row.
pub fn field_csv(rows: &[(f64, f64, f64, f64)]) -> String {
    let mut out = String::from("x,y,fx,fy\n");
    for &(x, y, fx, fy) in rows {
        out.push_str(&format!("{x:?},{y:?},{fx:?},{fy:?}\n"));
    }
    out
}
