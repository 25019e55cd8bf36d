//! Separatrix localization.
//!
//! Four methods, all producing [`SeparatrixCandidate`] values:
//!
//! * [`index_scan`] brackets the sign change of the orbit index along a
//!   segment and bisects it (with [`index_product_test`] as the underlying
//!   two-sided probe);
//! * [`zdp_curve`] extracts the zero contour of Im f (the order-1
//!   zero-derivative set of Im z along solutions) by marching squares
//!   with Newton refinement;
//! * [`bvp_separatrix_point`] minimizes the solution acceleration
//!   ‖z̈(t₀)‖² subject to a fixed Re z(t₁), by shooting;
//! * [`curvature_max_scan`] maximizes the trajectory curvature along pure
//!   imaginary-time paths.

mod bvp;
mod curvature;
mod scan;
mod zdp;

use std::collections::BTreeMap;

use num_complex::Complex64;
use thiserror::Error;

use crate::expr::EvalError;

pub use bvp::{bvp_separatrix_point, BvpProblem};
pub use curvature::{curvature_at, curvature_max_scan};
pub use scan::{index_product_test, index_scan, IndexProbe, ProbeOutcome};
pub use zdp::{zdp_curve, zdp_curve_component, ContourPoint, ContourPolyline, ZdpVariable};

/// Which localization method produced a candidate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    IndexScan,
    Zdp,
    Bvp,
    Curvature,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::IndexScan => "index",
            Method::Zdp => "zdp",
            Method::Bvp => "bvp",
            Method::Curvature => "curvature",
        }
    }
}

/// A localized separatrix point with method-specific residual and
/// diagnostics.
#[derive(Debug, Clone)]
pub struct SeparatrixCandidate {
    pub location: Complex64,
    pub method: Method,
    /// Method-specific: bracket width for the index scan, |Im f| for ZDP,
    /// end-constraint defect for the BVP, sample spacing for curvature.
    pub residual: f64,
    pub converged: bool,
    pub diagnostics: BTreeMap<&'static str, f64>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MethodError {
    #[error("no orbit orientation change found along the segment")]
    NoBracket,
    #[error("the sampled grid contains no zero contour")]
    EmptyContour,
    #[error("inner shooting iteration failed to satisfy the end constraint")]
    InnerNewtonDiverged,
    #[error("objective is not unimodal on the supplied bracket")]
    BracketInvalid,
    #[error("curvature varies below resolution along the trajectory")]
    FlatCurvature,
    #[error("velocity magnitude too small for a curvature")]
    ZeroVelocity,
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Golden-section minimization of `g` on [a, b]; `g` returning None counts
/// as +infinity. Returns the bracketing triple (lo, best, hi).
pub(crate) fn golden_section_min(
    mut g: impl FnMut(f64) -> Option<f64>,
    a: f64,
    b: f64,
    width_tol: f64,
    max_iter: usize,
) -> (f64, f64, f64) {
    const INV_PHI2: f64 = 0.381_966_011_250_105_2; // 2 - phi
    let mut lo = a;
    let mut hi = b;
    let mut x1 = lo + INV_PHI2 * (hi - lo);
    let mut x2 = hi - INV_PHI2 * (hi - lo);
    let mut g1 = g(x1).unwrap_or(f64::INFINITY);
    let mut g2 = g(x2).unwrap_or(f64::INFINITY);
    for _ in 0..max_iter {
        if (hi - lo).abs() <= width_tol {
            break;
        }
        if g1 < g2 {
            hi = x2;
            x2 = x1;
            g2 = g1;
            x1 = lo + INV_PHI2 * (hi - lo);
            g1 = g(x1).unwrap_or(f64::INFINITY);
        } else {
            lo = x1;
            x1 = x2;
            g1 = g2;
            x2 = hi - INV_PHI2 * (hi - lo);
            g2 = g(x2).unwrap_or(f64::INFINITY);
        }
    }
    let best = if g1 < g2 { x1 } else { x2 };
    (lo, best, hi)
}
