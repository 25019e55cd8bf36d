//! Winding numbers of closed curves and orbit indices.
//!
//! The index of a periodic orbit is its winding number about the enclosing
//! center; the tangent turning number is exposed separately as a
//! cross-check (the two coincide for convex orbits).

use num_complex::Complex64;
use thiserror::Error;

use crate::expr::HolomorphicFunction;
use crate::flow::{integrate_core, ClosureMode, IntegrationSettings, Termination, TimeDirection};

/// Angle sums further than this from an integer indicate an under-sampled
/// curve and surface as an error instead of silently rounding.
const ROUNDING_GUARD: f64 = 0.1;

/// Relative distance (to the curve diameter) below which a query point
/// counts as lying on the curve.
const EPS_ON_CURVE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CurveError {
    #[error("a closed curve needs at least 3 points, got {0}")]
    TooFewPoints(usize),
    #[error("consecutive curve points {0} and {1} coincide")]
    DuplicatePoint(usize, usize),
    #[error("query point lies on the curve")]
    PointOnCurve,
    #[error("angle sum {value} is not within {ROUNDING_GUARD} of an integer multiple of 2π")]
    AmbiguousWinding { value: f64 },
}

/// Polygonal closed curve; the edge from the last point back to the first
/// is implicit.
#[derive(Debug, Clone)]
pub struct ClosedCurve {
    points: Vec<Complex64>,
}

impl ClosedCurve {
    pub fn new(points: Vec<Complex64>) -> Result<Self, CurveError> {
        if points.len() < 3 {
            return Err(CurveError::TooFewPoints(points.len()));
        }
        let n = points.len();
        for i in 0..n {
            let j = (i + 1) % n;
            if points[i] == points[j] {
                return Err(CurveError::DuplicatePoint(i, j));
            }
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn reversed(&self) -> Self {
        let mut points = self.points.clone();
        points.reverse();
        Self { points }
    }

    /// Bounding-box diagonal; a cheap stand-in for the true diameter.
    pub fn diameter(&self) -> f64 {
        let mut lo = self.points[0];
        let mut hi = self.points[0];
        for p in &self.points {
            lo.re = lo.re.min(p.re);
            lo.im = lo.im.min(p.im);
            hi.re = hi.re.max(p.re);
            hi.im = hi.im.max(p.im);
        }
        (hi - lo).norm()
    }

    fn edges(&self) -> impl Iterator<Item = (Complex64, Complex64)> + '_ {
        let n = self.points.len();
        (0..n).map(move |i| (self.points[i], self.points[(i + 1) % n]))
    }
}

fn angle_between(a: Complex64, b: Complex64) -> f64 {
    let cross = a.re * b.im - a.im * b.re;
    let dot = a.re * b.re + a.im * b.im;
    cross.atan2(dot)
}

fn distance_to_segment(p: Complex64, a: Complex64, b: Complex64) -> f64 {
    let ab = b - a;
    let len_sq = ab.norm_sqr();
    if len_sq == 0.0 {
        return (p - a).norm();
    }
    let t = (((p - a).re * ab.re + (p - a).im * ab.im) / len_sq).clamp(0.0, 1.0);
    (p - (a + t * ab)).norm()
}

fn round_guarded(total_angle: f64) -> Result<i32, CurveError> {
    let winding = total_angle / std::f64::consts::TAU;
    let rounded = winding.round();
    if (winding - rounded).abs() > ROUNDING_GUARD {
        return Err(CurveError::AmbiguousWinding { value: winding });
    }
    Ok(rounded as i32)
}

/// Winding number of the curve about `p`: the summed signed angles each
/// edge subtends at `p`, divided by 2π and rounded under a 0.1 guard.
pub fn winding_number(curve: &ClosedCurve, p: Complex64) -> Result<i32, CurveError> {
    let eps = EPS_ON_CURVE * curve.diameter();
    let mut total = 0.0;
    for (a, b) in curve.edges() {
        if distance_to_segment(p, a, b) <= eps {
            return Err(CurveError::PointOnCurve);
        }
        total += angle_between(a - p, b - p);
    }
    round_guarded(total)
}

/// Turning number of the tangent: summed signed exterior angles between
/// consecutive edges, divided by 2π and rounded under the same guard.
pub fn tangent_winding(curve: &ClosedCurve) -> Result<i32, CurveError> {
    let edges: Vec<Complex64> = curve.edges().map(|(a, b)| b - a).collect();
    let n = edges.len();
    let mut total = 0.0;
    for i in 0..n {
        total += angle_between(edges[i], edges[(i + 1) % n]);
    }
    round_guarded(total)
}

/// Outcome of integrating one orbit around a supposed center.
#[derive(Debug, Clone, PartialEq)]
pub enum OrbitVerdict {
    Periodic { period: f64, index: i32 },
    Escaping,
    Indeterminate,
}

#[derive(Debug, Clone)]
pub struct OrbitClassification {
    pub verdict: OrbitVerdict,
    pub center: Complex64,
    /// |z(T) − z(0)| when closure was detected.
    pub closure_residual: Option<f64>,
    pub samples_used: usize,
}

/// Integrates the real-time orbit through `z0` and classifies it around
/// `center` (which should be an equilibrium: |f(center)| small).
///
/// Periodic requires a winding index of ±1 about the center; blow-up or a
/// guard exit (when `s.guard_radius` is set, anchored at the center) means
/// Escaping; anything else, including an ambiguous winding, is
/// Indeterminate.
pub fn classify_orbit(
    f: &HolomorphicFunction,
    z0: Complex64,
    center: Complex64,
    s: &IntegrationSettings,
) -> OrbitClassification {
    assert!(z0 != center, "start point must differ from the center");
    let guard = s.guard_radius.map(|r| (center, r));
    let traj = integrate_core(
        f,
        z0,
        TimeDirection::real_time(),
        s,
        ClosureMode::Around(center),
        guard,
    );
    let samples_used = traj.samples.len();
    let verdict = match traj.termination {
        Termination::ClosedOrbit { period } => match orbit_curve_index(&traj.samples, center) {
            Some(index) if index.abs() == 1 => OrbitVerdict::Periodic { period, index },
            _ => OrbitVerdict::Indeterminate,
        },
        Termination::BlowUp { .. } | Termination::GuardExit => OrbitVerdict::Escaping,
        Termination::MaxTime | Termination::StepUnderflow => OrbitVerdict::Indeterminate,
    };
    OrbitClassification {
        verdict,
        center,
        closure_residual: traj.closure_residual,
        samples_used,
    }
}

/// Builds the closed polygon of one orbit revolution and winds it about
/// `p`. The final sample (the closure return point) duplicates the start
/// and is dropped.
pub(crate) fn orbit_curve_index(samples: &[(f64, Complex64)], p: Complex64) -> Option<i32> {
    let curve = curve_from_orbit_samples(samples)?;
    winding_number(&curve, p).ok()
}

pub(crate) fn curve_from_orbit_samples(samples: &[(f64, Complex64)]) -> Option<ClosedCurve> {
    if samples.len() < 4 {
        return None;
    }
    let mut pts: Vec<Complex64> = Vec::with_capacity(samples.len() - 1);
    for &(_, z) in &samples[..samples.len() - 1] {
        if pts.last() != Some(&z) {
            pts.push(z);
        }
    }
    if pts.len() >= 2 && pts[pts.len() - 1] == pts[0] {
        pts.pop();
    }
    ClosedCurve::new(pts).ok()
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_PI_2, TAU};

    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn circle(n: usize, ccw: bool) -> ClosedCurve {
        let pts = (0..n)
            .map(|k| {
                let t = TAU * k as f64 / n as f64;
                let t = if ccw { t } else { -t };
                c(t.cos(), t.sin())
            })
            .collect();
        ClosedCurve::new(pts).unwrap()
    }

    #[test]
    fn unit_circle_windings() {
        let ccw = circle(64, true);
        assert_eq!(winding_number(&ccw, c(0.0, 0.0)).unwrap(), 1);
        assert_eq!(winding_number(&ccw.reversed(), c(0.0, 0.0)).unwrap(), -1);
        assert_eq!(winding_number(&ccw, c(3.0, 0.0)).unwrap(), 0);
    }

    #[test]
    fn tangent_turning_of_circle() {
        assert_eq!(tangent_winding(&circle(64, true)).unwrap(), 1);
        assert_eq!(tangent_winding(&circle(64, false)).unwrap(), -1);
    }

    #[test]
    fn doubled_traversal_doubles_turning() {
        // 128 samples of e^{i·2t}, t in [0, 2π): the circle traversed twice.
        let pts: Vec<Complex64> = (0..128)
            .map(|k| {
                let t = TAU * k as f64 / 128.0;
                c((2.0 * t).cos(), (2.0 * t).sin())
            })
            .collect();
        // Angle-sum oracle on the raw samples.
        let mut oracle = 0.0;
        for i in 0..pts.len() {
            let e1 = pts[(i + 1) % pts.len()] - pts[i];
            let e2 = pts[(i + 2) % pts.len()] - pts[(i + 1) % pts.len()];
            oracle += angle_between(e1, e2);
        }
        assert!((oracle / TAU - 2.0).abs() < 1e-9);
        let curve = ClosedCurve::new(pts).unwrap();
        assert_eq!(tangent_winding(&curve).unwrap(), 2);
        assert_eq!(winding_number(&curve, c(0.0, 0.0)).unwrap(), 2);
    }

    #[test]
    fn point_on_curve_detected() {
        let curve = circle(64, true);
        assert_eq!(
            winding_number(&curve, c(1.0, 0.0)),
            Err(CurveError::PointOnCurve)
        );
    }

    #[test]
    fn cyclic_rotation_invariance() {
        let base = circle(33, true);
        let p = c(0.2, -0.3);
        let expect = winding_number(&base, p).unwrap();
        for shift in [1, 7, 20] {
            let mut pts = base.points().to_vec();
            pts.rotate_left(shift);
            let rotated = ClosedCurve::new(pts).unwrap();
            assert_eq!(winding_number(&rotated, p).unwrap(), expect);
        }
    }

    #[test]
    fn degenerate_curves_rejected() {
        assert!(matches!(
            ClosedCurve::new(vec![c(0.0, 0.0), c(1.0, 0.0)]),
            Err(CurveError::TooFewPoints(2))
        ));
        assert!(matches!(
            ClosedCurve::new(vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]),
            Err(CurveError::DuplicatePoint(0, 1))
        ));
    }

    #[test]
    fn canonical_rotation_is_periodic_index_one() {
        // ż = iz circles the origin counterclockwise.
        let f = HolomorphicFunction::parse("i*z").unwrap();
        let out = classify_orbit(
            &f,
            c(1.0, 0.0),
            c(0.0, 0.0),
            &IntegrationSettings::default(),
        );
        match out.verdict {
            OrbitVerdict::Periodic { period, index } => {
                assert_eq!(index, 1);
                assert!((period - TAU).abs() < 1e-6, "period {period}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn fixture_orbit_indices_by_center() {
        let f = HolomorphicFunction::parse("cosh(z-0.5)").unwrap();
        let s = IntegrationSettings::default();
        let upper = classify_orbit(&f, c(0.5, FRAC_PI_2 + 0.3), c(0.5, FRAC_PI_2), &s);
        match upper.verdict {
            OrbitVerdict::Periodic { index, .. } => assert_eq!(index, 1),
            other => panic!("{other:?}"),
        }
        let lower = classify_orbit(&f, c(0.5, -(FRAC_PI_2 + 0.3)), c(0.5, -FRAC_PI_2), &s);
        match lower.verdict {
            OrbitVerdict::Periodic { index, .. } => assert_eq!(index, -1),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn pure_growth_escapes() {
        let f = HolomorphicFunction::parse("z").unwrap();
        let s = IntegrationSettings {
            guard_radius: Some(8.0),
            ..IntegrationSettings::default()
        };
        let out = classify_orbit(&f, c(1.0, 0.0), c(0.0, 0.0), &s);
        assert_eq!(out.verdict, OrbitVerdict::Escaping);
    }

    #[test]
    fn tangent_and_point_winding_agree_on_fixture_orbit() {
        let f = HolomorphicFunction::parse("cosh(z-0.5)").unwrap();
        let s = IntegrationSettings::default();
        let center = c(0.5, FRAC_PI_2);
        let traj = integrate_core(
            &f,
            c(0.5, FRAC_PI_2 - 0.4),
            TimeDirection::real_time(),
            &s,
            ClosureMode::Around(center),
            None,
        );
        assert!(matches!(traj.termination, Termination::ClosedOrbit { .. }));
        let curve = curve_from_orbit_samples(&traj.samples).unwrap();
        let by_point = winding_number(&curve, center).unwrap();
        let by_tangent = tangent_winding(&curve).unwrap();
        assert_eq!(by_point, by_tangent);
        assert_eq!(by_point, 1);
    }
}
