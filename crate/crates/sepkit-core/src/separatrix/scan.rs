//! Index-product probes and segment bisection.
//!
//! A point lies on the common boundary of two period regions exactly when
//! nearby orbits around the two neighboring centers have index product −1.
//! The scan walks a segment, watching the orbit index through each sample,
//! and bisects every sign change.

use std::collections::BTreeMap;

use num_complex::Complex64;

use super::{Method, MethodError, SeparatrixCandidate};
use crate::equilibria::Equilibrium;
use crate::expr::HolomorphicFunction;
use crate::flow::{integrate_core, ClosureMode, IntegrationSettings, Termination, TimeDirection};
use crate::orbit::{curve_from_orbit_samples, winding_number};
use crate::par;

/// Result of probing both sides of a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProbeOutcome {
    /// Both probe orbits are periodic; the value is the index product.
    Product(i32),
    /// At least one probe could not be classified.
    Indeterminate,
}

/// Two-sided probe around `z_star`: the probe points, their offset, and
/// the index product of their orbits.
#[derive(Debug, Clone)]
pub struct IndexProbe {
    pub z_star: Complex64,
    pub epsilon: f64,
    pub probe_0: Complex64,
    pub probe_1: Complex64,
    pub outcome: ProbeOutcome,
}

/// Classifies the orbits through z_star ± ε·normal around the respective
/// centers: probe 0 (toward +normal) around `centers.0`, probe 1 around
/// `centers.1`. The product is −1 across a separatrix between the two
/// period regions and +1 inside one region (pass the same center twice for
/// an interior check).
pub fn index_product_test(
    f: &HolomorphicFunction,
    z_star: Complex64,
    normal: Complex64,
    epsilon: f64,
    centers: (&Equilibrium, &Equilibrium),
    s: &IntegrationSettings,
) -> IndexProbe {
    assert!(epsilon > 0.0, "probe offset must be positive");
    assert!(
        (normal.norm() - 1.0).abs() < 1e-9,
        "normal must be a unit vector"
    );
    assert!(
        centers.0.kind.is_center() && centers.1.kind.is_center(),
        "index probes need Center-kind equilibria"
    );
    let probe_0 = z_star + epsilon * normal;
    let probe_1 = z_star - epsilon * normal;
    let jobs = [(probe_0, centers.0.location), (probe_1, centers.1.location)];
    let indices = par::map_slice(&jobs, |&(z, center)| orbit_index_about(f, z, center, s));
    let outcome = match (indices[0], indices[1]) {
        (Some(i0), Some(i1)) => ProbeOutcome::Product(i0 * i1),
        _ => ProbeOutcome::Indeterminate,
    };
    IndexProbe {
        z_star,
        epsilon,
        probe_0,
        probe_1,
        outcome,
    }
}

/// Walks the segment with step `epsilon`, assigns each sample the index of
/// its orbit (sign of the winding around whichever of the two centers it
/// encloses), and bisects every consecutive sign change down to
/// `bisect_tol`. Errors with `NoBracket` when no sign change shows up.
pub fn index_scan(
    f: &HolomorphicFunction,
    segment: (Complex64, Complex64),
    centers: (&Equilibrium, &Equilibrium),
    epsilon: f64,
    s: &IntegrationSettings,
    bisect_tol: f64,
) -> Result<Vec<SeparatrixCandidate>, MethodError> {
    assert!(epsilon > 0.0 && bisect_tol > 0.0);
    assert!(
        centers.0.kind.is_center() && centers.1.kind.is_center(),
        "index scan needs Center-kind equilibria"
    );
    let (a, b) = segment;
    let length = (b - a).norm();
    assert!(length > 0.0, "segment must not degenerate to a point");

    let pair = (centers.0.location, centers.1.location);
    let n = ((length / epsilon).ceil() as usize + 1).clamp(3, 513);
    let at = |u: f64| a + u * (b - a);
    let params: Vec<f64> = (0..n).map(|k| k as f64 / (n - 1) as f64).collect();
    let half_step = 0.5 / (n - 1) as f64;

    let mut probes = 0usize;
    let mut unresolved = 0usize;

    // First pass in parallel; indeterminate samples get one retry at a
    // half-step shift so a single stiff orbit cannot hide a bracket.
    let first: Vec<Option<i32>> =
        par::map_slice(&params, |&u| sample_index(f, at(u), pair, s));
    probes += first.len();
    let mut samples: Vec<(f64, i32)> = Vec::with_capacity(n);
    for (k, idx) in first.into_iter().enumerate() {
        let u = params[k];
        match idx {
            Some(i) => samples.push((u, i)),
            None => {
                let u_retry = (u + half_step).min(1.0);
                probes += 1;
                match sample_index(f, at(u_retry), pair, s) {
                    Some(i) => samples.push((u_retry, i)),
                    None => unresolved += 1,
                }
            }
        }
    }

    let mut brackets: Vec<(f64, i32, f64, i32)> = Vec::new();
    for w in samples.windows(2) {
        let (u_lo, i_lo) = w[0];
        let (u_hi, i_hi) = w[1];
        if i_lo * i_hi < 0 {
            brackets.push((u_lo, i_lo, u_hi, i_hi));
        }
    }
    if brackets.is_empty() {
        return Err(MethodError::NoBracket);
    }

    let mut out = Vec::new();
    for (mut u_lo, sign_lo, mut u_hi, _) in brackets {
        let mut aborted = false;
        let mut iterations = 0usize;
        while (u_hi - u_lo) * length >= bisect_tol && iterations < 200 {
            iterations += 1;
            let mid = 0.5 * (u_lo + u_hi);
            probes += 1;
            let mut decided = sample_index(f, at(mid), pair, s).map(|i| (mid, i));
            if decided.is_none() {
                // Shifted retries keep the bracket shrinking.
                for frac in [0.25, 0.75] {
                    let u = u_lo + frac * (u_hi - u_lo);
                    probes += 1;
                    if let Some(i) = sample_index(f, at(u), pair, s) {
                        decided = Some((u, i));
                        break;
                    }
                    unresolved += 1;
                }
            }
            match decided {
                Some((u, i)) => {
                    if i == sign_lo {
                        u_lo = u;
                    } else {
                        u_hi = u;
                    }
                }
                None => {
                    aborted = true;
                    break;
                }
            }
        }
        let width = (u_hi - u_lo) * length;
        let mut diagnostics = BTreeMap::new();
        diagnostics.insert("bracket_width", width);
        diagnostics.insert("orbit_probes", probes as f64);
        diagnostics.insert("unresolved_probes", unresolved as f64);
        out.push(SeparatrixCandidate {
            location: at(0.5 * (u_lo + u_hi)),
            method: Method::IndexScan,
            residual: width,
            converged: !aborted && width < bisect_tol,
            diagnostics,
        });
    }
    out.sort_by(|p, q| {
        (p.location.re, p.location.im)
            .partial_cmp(&(q.location.re, q.location.im))
            .unwrap()
    });
    Ok(out)
}

/// Index of the orbit through `z`: integrates once (tangent-turn closure,
/// no center needed) and winds the sampled orbit around both candidate
/// centers. Exactly one winding of ±1 with the other 0 identifies the
/// enclosing center and gives the sign.
fn sample_index(
    f: &HolomorphicFunction,
    z: Complex64,
    centers: (Complex64, Complex64),
    s: &IntegrationSettings,
) -> Option<i32> {
    let traj = integrate_core(f, z, TimeDirection::real_time(), s, ClosureMode::Tangent, None);
    if !matches!(traj.termination, Termination::ClosedOrbit { .. }) {
        return None;
    }
    let curve = curve_from_orbit_samples(&traj.samples)?;
    let w0 = winding_number(&curve, centers.0).ok()?;
    let w1 = winding_number(&curve, centers.1).ok()?;
    match (w0, w1) {
        (i, 0) if i.abs() == 1 => Some(i),
        (0, i) if i.abs() == 1 => Some(i),
        _ => None,
    }
}

/// Index of the orbit through `z` around one known center.
fn orbit_index_about(
    f: &HolomorphicFunction,
    z: Complex64,
    center: Complex64,
    s: &IntegrationSettings,
) -> Option<i32> {
    let traj = integrate_core(
        f,
        z,
        TimeDirection::real_time(),
        s,
        ClosureMode::Around(center),
        None,
    );
    if !matches!(traj.termination, Termination::ClosedOrbit { .. }) {
        return None;
    }
    let curve = curve_from_orbit_samples(&traj.samples)?;
    match winding_number(&curve, center).ok()? {
        i if i.abs() == 1 => Some(i),
        _ => None,
    }
}
