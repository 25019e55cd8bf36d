//! Separatrix approximation by imaginary-time curvature maximization.
//!
//! Imaginary-time trajectories cross the real-time separatrices; along
//! each such path the point of maximal unsigned curvature lies close to
//! the separatrix. Curvature is evaluated pointwise from f and f' rather
//! than by differentiating sampled paths, which keeps the argmax free of
//! sampling noise.

use std::collections::BTreeMap;

use num_complex::Complex64;

use super::{golden_section_min, Method, MethodError, SeparatrixCandidate};
use crate::expr::HolomorphicFunction;
use crate::flow::{integrate_core, ClosureMode, IntegrationSettings, TimeDirection};

/// Velocities below this magnitude have no defined path curvature.
const ZERO_VELOCITY_TOL: f64 = 1e-12;

/// Curvature variations below this are indistinguishable from a flat
/// profile.
const FLAT_TOL: f64 = 1e-12;

/// Signed curvature of the trajectory of ż = e^{iθ}f through `z`:
/// with velocity v = e^{iθ}f(z) and acceleration a = e^{2iθ}f'(z)f(z),
/// κ = Im(conj(v)·a)/|v|³.
pub fn curvature_at(
    f: &HolomorphicFunction,
    z: Complex64,
    dir: TimeDirection,
) -> Result<f64, MethodError> {
    let fz = f.eval(z)?;
    if fz.norm() < ZERO_VELOCITY_TOL {
        return Err(MethodError::ZeroVelocity);
    }
    let fpz = f.derivative(1).eval(z)?;
    let kappa = curvature_from_values(fz, fpz, dir.phase());
    if kappa.is_finite() {
        Ok(kappa)
    } else {
        // |v|³ overflows before |v| does; the quotient is then meaningless.
        Err(MethodError::Eval(crate::expr::EvalError::Overflow))
    }
}

fn curvature_from_values(fz: Complex64, fpz: Complex64, phase: Complex64) -> f64 {
    let v = phase * fz;
    let a = phase * phase * fpz * fz;
    (v.conj() * a).im / v.norm().powi(3)
}

/// Integrates the imaginary-time trajectory through `z0` in both time
/// directions, finds the sample of maximal |κ|, and golden-section refines
/// the maximum on a cubic Hermite reconstruction of the path between the
/// bracketing samples. The residual is the sample spacing at the maximum.
///
/// `s.guard_radius`, when set, bounds the excursion around `z0`.
pub fn curvature_max_scan(
    f: &HolomorphicFunction,
    z0: Complex64,
    s: &IntegrationSettings,
) -> Result<SeparatrixCandidate, MethodError> {
    let f0 = f.eval(z0)?;
    assert!(
        f0.norm() > ZERO_VELOCITY_TOL,
        "curvature scan cannot start at an equilibrium"
    );
    let fp = f.derivative(1);
    let phase = TimeDirection::imaginary_time().phase();
    let kappa_abs = |z: Complex64| -> f64 {
        match (f.eval(z), fp.eval(z)) {
            (Ok(fz), Ok(fpz)) if fz.norm() >= ZERO_VELOCITY_TOL => {
                let kappa = curvature_from_values(fz, fpz, phase);
                if kappa.is_finite() {
                    kappa.abs()
                } else {
                    0.0
                }
            }
            _ => 0.0,
        }
    };

    let guard = s.guard_radius.map(|r| (z0, r));
    let fwd = integrate_core(
        f,
        z0,
        TimeDirection::imaginary_time(),
        s,
        ClosureMode::Tangent,
        guard,
    );
    let bwd = integrate_core(
        f,
        z0,
        TimeDirection::imaginary_time().reversed(),
        s,
        ClosureMode::Tangent,
        guard,
    );

    // One path through z0, parametrized by signed imaginary time. The
    // velocity in this parametrization is i·f(z) on both halves.
    let mut path: Vec<(f64, Complex64)> = bwd
        .samples
        .iter()
        .skip(1)
        .rev()
        .map(|&(t, z)| (-t, z))
        .collect();
    path.extend(fwd.samples.iter().copied());
    if path.len() < 3 {
        return Err(MethodError::FlatCurvature);
    }

    let kappas: Vec<f64> = path.iter().map(|&(_, z)| kappa_abs(z)).collect();
    let k_max = kappas.iter().cloned().fold(f64::MIN, f64::max);
    let k_min = kappas.iter().cloned().fold(f64::MAX, f64::min);
    if k_max - k_min < FLAT_TOL {
        return Err(MethodError::FlatCurvature);
    }

    let j_star = kappas
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .map(|(j, _)| j)
        .unwrap();
    let interior = j_star > 0 && j_star + 1 < path.len();

    let (location, curvature) = if interior {
        let velocity = |z: Complex64| f.eval(z).map(|v| phase * v);
        let lo = path[j_star - 1];
        let mid = path[j_star];
        let hi = path[j_star + 1];
        let (va, vb, vc) = match (velocity(lo.1), velocity(mid.1), velocity(hi.1)) {
            (Ok(a), Ok(b), Ok(c)) => (a, b, c),
            _ => (Complex64::ZERO, Complex64::ZERO, Complex64::ZERO),
        };
        let position = |tau: f64| -> Complex64 {
            if tau <= mid.0 {
                hermite(lo.0, lo.1, va, mid.0, mid.1, vb, tau)
            } else {
                hermite(mid.0, mid.1, vb, hi.0, hi.1, vc, tau)
            }
        };
        let (_, tau_best, _) = golden_section_min(
            |tau| Some(-kappa_abs(position(tau))),
            lo.0,
            hi.0,
            1e-12 * (hi.0 - lo.0).abs().max(1e-12),
            200,
        );
        let z_best = position(tau_best);
        (z_best, kappa_abs(z_best))
    } else {
        (path[j_star].1, kappas[j_star])
    };

    let spacing_before = if j_star > 0 {
        (path[j_star].1 - path[j_star - 1].1).norm()
    } else {
        0.0
    };
    let spacing_after = if j_star + 1 < path.len() {
        (path[j_star + 1].1 - path[j_star].1).norm()
    } else {
        0.0
    };
    let residual = spacing_before.max(spacing_after);

    let mut diagnostics = BTreeMap::new();
    diagnostics.insert("curvature", curvature);
    diagnostics.insert("path_samples", path.len() as f64);
    diagnostics.insert("path_span", fwd.last().0 + bwd.last().0);

    Ok(SeparatrixCandidate {
        location,
        method: Method::Curvature,
        residual,
        converged: interior,
        diagnostics,
    })
}

/// Cubic Hermite interpolation of (z, ż) data at two times.
#[allow(clippy::too_many_arguments)]
fn hermite(
    ta: f64,
    za: Complex64,
    va: Complex64,
    tb: f64,
    zb: Complex64,
    vb: Complex64,
    tau: f64,
) -> Complex64 {
    let h = tb - ta;
    if h == 0.0 {
        return za;
    }
    let u = ((tau - ta) / h).clamp(0.0, 1.0);
    let u2 = u * u;
    let u3 = u2 * u;
    let h00 = 2.0 * u3 - 3.0 * u2 + 1.0;
    let h10 = u3 - 2.0 * u2 + u;
    let h01 = -2.0 * u3 + 3.0 * u2;
    let h11 = u3 - u2;
    h00 * za + h10 * h * va + h01 * zb + h11 * h * vb
}
