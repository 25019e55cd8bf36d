//! Analysis of one-dimensional holomorphic dynamical systems `ż = f(z)`.
//!
//! The crate parses holomorphic function expressions with exact symbolic
//! derivatives, integrates trajectories in rotated complex time with an
//! adaptive Dormand-Prince pair, locates and classifies equilibria from
//! `f'(z₀)`, computes winding-number orbit indices, and localizes
//! separatrices by four methods: index-product bisection, order-1
//! zero-derivative-principle contours, a shooting boundary-value
//! optimization, and imaginary-time curvature maximization.
//!
//! All operations are pure; scans decompose into independent tasks that run
//! on rayon when the default `parallel` feature is enabled and fall back to
//! sequential loops without it. Results are deterministic for fixed inputs
//! either way.

pub mod equilibria;
pub mod expr;
pub mod flow;
pub mod geom;
pub mod orbit;
pub mod par;
pub mod separatrix;

pub use equilibria::{classify, classify_under_rotation, find_zeros, Equilibrium, EquilibriumKind};
pub use expr::{EvalError, HolomorphicFunction, ParseError};
pub use flow::{
    escape_report, integrate, integrate_batch, EscapeReport, IntegrationSettings, Termination,
    TimeDirection, Trajectory,
};
pub use geom::Rectangle;
pub use num_complex::Complex64;
pub use orbit::{
    classify_orbit, tangent_winding, winding_number, ClosedCurve, CurveError, OrbitClassification,
    OrbitVerdict,
};
pub use separatrix::{
    bvp_separatrix_point, curvature_at, curvature_max_scan, index_product_test, index_scan,
    zdp_curve, BvpProblem, ContourPoint, ContourPolyline, IndexProbe, Method, MethodError,
    ProbeOutcome, SeparatrixCandidate,
};
