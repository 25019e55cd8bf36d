//! Boundary-value separatrix points by shooting.
//!
//! Minimize ‖z̈(t₀)‖² = |f'(z(t₀))·f(z(t₀))|² subject to ż = f(z) on
//! [t₀, t₁] and Re z(t₁) = x*. The feasible set is a curve parametrized by
//! s = Im z(t₀): for each s an inner safeguarded secant solve finds
//! r = Re z(t₀) meeting the end constraint, and an outer golden-section
//! search with parabolic polish minimizes the acceleration objective over
//! s. The returned candidate is z(t₁) of the optimum.

use std::collections::BTreeMap;

use num_complex::Complex64;

use super::{golden_section_min, Method, MethodError, SeparatrixCandidate};
use crate::expr::HolomorphicFunction;
use crate::flow::{integrate_core, ClosureMode, IntegrationSettings, Termination, TimeDirection};

/// One pointwise separatrix problem: fixed real part `target_re` of the
/// endpoint, search bracket for Im z(t₀).
#[derive(Debug, Clone)]
pub struct BvpProblem {
    pub target_re: f64,
    pub t0: f64,
    pub t1: f64,
    /// Outer search interval for Im z(t₀); one minimizer per period strip,
    /// so brackets are supplied per strip.
    pub bracket: (f64, f64),
    /// Time direction of the shooting flow. The default is real time;
    /// targets upstream of the flow are reached with the sign-switched
    /// field (θ = π), which leaves the acceleration objective unchanged.
    pub direction: TimeDirection,
    /// Acceptance tolerance on |Re z(t₁) − target_re|.
    pub constraint_tol: f64,
    pub max_shoot_iter: usize,
}

impl BvpProblem {
    pub fn new(target_re: f64) -> Self {
        Self {
            target_re,
            t0: 0.0,
            t1: 1.0,
            bracket: (-1.0, 1.0),
            direction: TimeDirection::real_time(),
            constraint_tol: 1e-11,
            max_shoot_iter: 80,
        }
    }
}

struct Shooter<'a> {
    f: &'a HolomorphicFunction,
    fp: HolomorphicFunction,
    direction: TimeDirection,
    horizon: f64,
    target: f64,
    settings: IntegrationSettings,
    tol: f64,
    max_iter: usize,
    objective_evals: usize,
    inner_failures: usize,
}

struct InnerSolution {
    start_re: f64,
    endpoint: Complex64,
}

impl<'a> Shooter<'a> {
    /// Endpoint z(t₀ + horizon) of the flow from `z_start`, if it exists.
    fn endpoint(&self, z_start: Complex64) -> Option<Complex64> {
        let traj = integrate_core(
            self.f,
            z_start,
            self.direction,
            &self.settings,
            ClosureMode::Off,
            None,
        );
        match traj.termination {
            Termination::MaxTime => {
                let (t_end, z_end) = traj.last();
                (t_end >= self.horizon - 1e-9 * self.horizon.max(1.0)).then_some(z_end)
            }
            _ => None,
        }
    }

    fn residual(&self, r: f64, s_im: f64) -> Option<(f64, Complex64)> {
        let z_end = self.endpoint(Complex64::new(r, s_im))?;
        Some((z_end.re - self.target, z_end))
    }

    /// Deterministic per-s seed for the inner solve: the backward-flow
    /// preimage of (target, s). The end constraint has several solution
    /// branches (orbits that overshoot and curl back meet it too); the
    /// upstream preimage stays on the branch the method is about, and
    /// seeding from it keeps the outer objective a pure function of s.
    fn seed(&self, s_im: f64) -> f64 {
        let back = integrate_core(
            self.f,
            Complex64::new(self.target, s_im),
            self.direction.reversed(),
            &self.settings,
            ClosureMode::Off,
            None,
        );
        match back.termination {
            Termination::MaxTime => back.last().1.re,
            _ => self.target,
        }
    }

    /// Solves Re z(t₁; r + i·s_im) = target for r.
    ///
    /// A ladder of probes around the backward-flow seed looks for a sign
    /// change of the residual; trajectories that blow up before t₁ are invalid
    /// probes. Because the residual grows without bound toward the edge of
    /// the valid region, a missing sign can be recovered by bisecting the
    /// valid/invalid boundary. The bracket is then closed by safeguarded
    /// secant/bisection.
    ///
    /// The error side carries the smallest |Re z(t₁) − target| observed:
    /// the end constraint may be unsatisfiable for this s (the time-t₁
    /// reachable set does not extend to the target), and the gap lets the
    /// outer search steer back toward feasible territory.
    fn solve_constraint(&mut self, s_im: f64) -> Result<InnerSolution, Option<f64>> {
        // Local ladder: wider excursions risk bracketing a zero of the
        // residual on a different solution branch.
        const LADDER: [f64; 19] = [
            0.0, -0.125, 0.125, -0.25, 0.25, -0.375, 0.375, -0.5, 0.5, -0.75, 0.75, -1.0, 1.0,
            -1.25, 1.25, -1.5, 1.5, -2.0, 2.0,
        ];
        let guess = self.seed(s_im);
        let mut lo: Option<(f64, f64)> = None; // residual < 0
        let mut hi: Option<(f64, f64)> = None; // residual > 0
        let mut gap = f64::INFINITY;
        let mut invalid: Vec<f64> = Vec::new();
        let mut found: Option<InnerSolution> = None;
        for offset in LADDER {
            let r = guess + offset;
            match self.residual(r, s_im) {
                Some((res, z_end)) => {
                    gap = gap.min(res.abs());
                    if res.abs() < self.tol {
                        found = Some(InnerSolution {
                            start_re: r,
                            endpoint: z_end,
                        });
                        break;
                    }
                    if res < 0.0 {
                        if lo.is_none_or(|(_, v)| res > v) {
                            lo = Some((r, res));
                        }
                    } else if hi.is_none_or(|(_, v)| res < v) {
                        hi = Some((r, res));
                    }
                    if lo.is_some() && hi.is_some() {
                        break;
                    }
                }
                None => invalid.push(r),
            }
        }

        // One sign only: push toward the nearest invalid probe, where the
        // residual diverges, until the other sign shows up.
        if found.is_none() && (lo.is_none() ^ hi.is_none()) && !invalid.is_empty() {
            let (r_valid, v_valid) = lo.or(hi).unwrap();
            let want_positive = v_valid < 0.0;
            let mut r_bad = invalid
                .iter()
                .copied()
                .min_by(|a, b| {
                    (a - r_valid).abs().partial_cmp(&(b - r_valid).abs()).unwrap()
                })
                .unwrap();
            let mut r_good = r_valid;
            for _ in 0..60 {
                let mid = 0.5 * (r_good + r_bad);
                if mid == r_good || mid == r_bad {
                    break;
                }
                match self.residual(mid, s_im) {
                    Some((res, _)) => {
                        gap = gap.min(res.abs());
                        if (res > 0.0) == want_positive {
                            if want_positive {
                                hi = Some((mid, res));
                            } else {
                                lo = Some((mid, res));
                            }
                            break;
                        }
                        r_good = mid;
                        if want_positive {
                            if lo.is_none_or(|(_, v)| res > v) {
                                lo = Some((mid, res));
                            }
                        } else if hi.is_none_or(|(_, v)| res < v) {
                            hi = Some((mid, res));
                        }
                    }
                    None => r_bad = mid,
                }
            }
        }

        if found.is_none() {
            let (Some(mut lo), Some(mut hi)) = (lo, hi) else {
                return Err(gap.is_finite().then_some(gap));
            };
            for _ in 0..self.max_iter {
                // Secant proposal, bisection fallback when it leaves the
                // bracket or the slope degenerates.
                let (r_lo, v_lo) = lo;
                let (r_hi, v_hi) = hi;
                let denom = v_hi - v_lo;
                let mut r_next = if denom.abs() > 1e-300 {
                    r_lo - v_lo * (r_hi - r_lo) / denom
                } else {
                    0.5 * (r_lo + r_hi)
                };
                let (inner, outer) = (r_lo.min(r_hi), r_lo.max(r_hi));
                if !(inner < r_next && r_next < outer) {
                    r_next = 0.5 * (r_lo + r_hi);
                }
                if r_next == r_lo || r_next == r_hi {
                    // Interval exhausted at f64 resolution; accept the
                    // closer endpoint.
                    let (r, _) = if v_lo.abs() < v_hi.abs() { lo } else { hi };
                    if let Some((res, z_end)) = self.residual(r, s_im) {
                        gap = gap.min(res.abs());
                        if res.abs() < self.tol {
                            found = Some(InnerSolution {
                                start_re: r,
                                endpoint: z_end,
                            });
                        }
                    }
                    break;
                }
                let mut probe = r_next;
                let mut value = self.residual(probe, s_im);
                // Blow-up inside the bracket: fall back to quarter points.
                if value.is_none() {
                    for frac in [0.5, 0.25, 0.75] {
                        probe = r_lo + frac * (r_hi - r_lo);
                        value = self.residual(probe, s_im);
                        if value.is_some() {
                            break;
                        }
                    }
                }
                let Some((res, z_end)) = value else {
                    return Err(gap.is_finite().then_some(gap));
                };
                gap = gap.min(res.abs());
                if res.abs() < self.tol {
                    found = Some(InnerSolution {
                        start_re: probe,
                        endpoint: z_end,
                    });
                    break;
                }
                if res < 0.0 {
                    lo = (probe, res);
                } else {
                    hi = (probe, res);
                }
            }
        }
        match found {
            Some(sol) => Ok(sol),
            None => Err(gap.is_finite().then_some(gap)),
        }
    }

    /// ‖z̈(t₀)‖² on the feasible curve. Infeasible s values (the reachable
    /// set at t₁ misses the target) map to a penalty tier above any
    /// feasible objective, graded by the constraint gap so the outer
    /// search descends back into the feasible band.
    fn objective(&mut self, s_im: f64) -> Option<f64> {
        self.objective_evals += 1;
        let out = match self.solve_constraint(s_im) {
            Ok(sol) => {
                let z0 = Complex64::new(sol.start_re, s_im);
                let accel = self.fp.eval(z0).ok().zip(self.f.eval(z0).ok());
                accel.map(|(a, b)| (a * b).norm_sqr())
            }
            Err(gap) => {
                self.inner_failures += 1;
                gap.map(|g| PENALTY_TIER * (1.0 + g))
            }
        };
        if std::env::var("SEPKIT_BVP_DEBUG").is_ok() {
            eprintln!("  objective(s={s_im:.6}) = {out:?}");
        }
        out
    }
}

/// Above any attainable |f'·f|² so infeasible points always lose.
const PENALTY_TIER: f64 = 1e150;

/// Solves one pointwise BVP problem and returns z(t₁) of the optimum.
pub fn bvp_separatrix_point(
    f: &HolomorphicFunction,
    problem: &BvpProblem,
    settings: &IntegrationSettings,
) -> Result<SeparatrixCandidate, MethodError> {
    assert!(problem.t0 < problem.t1, "need t0 < t1");
    let (b_lo, b_hi) = problem.bracket;
    assert!(b_lo < b_hi, "outer bracket must not degenerate");
    assert!(problem.constraint_tol > 0.0);

    let mut shoot_settings = settings.clone();
    shoot_settings.t_max = problem.t1 - problem.t0;
    shoot_settings.guard_radius = None;

    let mut shooter = Shooter {
        f,
        fp: f.derivative(1),
        direction: problem.direction,
        horizon: problem.t1 - problem.t0,
        target: problem.target_re,
        settings: shoot_settings,
        tol: problem.constraint_tol,
        max_iter: problem.max_shoot_iter,
        objective_evals: 0,
        inner_failures: 0,
    };

    let width = b_hi - b_lo;
    let (_, s_golden, _) =
        golden_section_min(|s| shooter.objective(s), b_lo, b_hi, 1e-6 * width, 120);
    if shooter.objective_evals == shooter.inner_failures {
        return Err(MethodError::InnerNewtonDiverged);
    }
    // A minimizer pinned to the bracket edge signals a bad or
    // multi-modal bracket; the caller may split it.
    if (s_golden - b_lo).abs() < 1e-3 * width || (b_hi - s_golden).abs() < 1e-3 * width {
        return Err(MethodError::BracketInvalid);
    }

    let s_best = parabolic_polish(&mut shooter, s_golden, 1e-6 * width);
    let sol = shooter
        .solve_constraint(s_best)
        .map_err(|_| MethodError::InnerNewtonDiverged)?;
    let z0 = Complex64::new(sol.start_re, s_best);
    let objective = (shooter.fp.eval(z0)? * shooter.f.eval(z0)?).norm_sqr();
    let residual = (sol.endpoint.re - problem.target_re).abs();

    // Finite-difference optimality along the feasible curve.
    let delta = 1e-3 * width;
    let gradient = match (
        shooter.objective(s_best + delta),
        shooter.objective(s_best - delta),
    ) {
        (Some(gp), Some(gm)) => (gp - gm) / (2.0 * delta),
        _ => f64::NAN,
    };

    let mut diagnostics = BTreeMap::new();
    diagnostics.insert("objective", objective);
    diagnostics.insert("objective_gradient", gradient);
    diagnostics.insert("start_re", sol.start_re);
    diagnostics.insert("start_im", s_best);
    diagnostics.insert("objective_evaluations", shooter.objective_evals as f64);
    diagnostics.insert("inner_failures", shooter.inner_failures as f64);

    Ok(SeparatrixCandidate {
        location: sol.endpoint,
        method: Method::Bvp,
        residual,
        converged: residual <= problem.constraint_tol,
        diagnostics,
    })
}

/// Successive parabolic interpolation around the golden-section result.
fn parabolic_polish(shooter: &mut Shooter<'_>, s_center: f64, spread: f64) -> f64 {
    let mut a = s_center - spread;
    let mut b = s_center;
    let mut c = s_center + spread;
    let (Some(mut fa), Some(mut fb), Some(mut fc)) = (
        shooter.objective(a),
        shooter.objective(b),
        shooter.objective(c),
    ) else {
        return s_center;
    };
    for _ in 0..16 {
        let d1 = (b - a) * (fb - fc);
        let d2 = (b - c) * (fb - fa);
        let denom = d1 - d2;
        if denom.abs() < 1e-300 {
            break;
        }
        let u = b - 0.5 * ((b - a) * d1 - (b - c) * d2) / denom;
        if !u.is_finite() || u <= a || u >= c || (u - b).abs() < 1e-14 * (1.0 + b.abs()) {
            break;
        }
        let Some(fu) = shooter.objective(u) else {
            break;
        };
        if fu < fb {
            if u < b {
                c = b;
                fc = fb;
            } else {
                a = b;
                fa = fb;
            }
            b = u;
            fb = fu;
        } else if u < b {
            a = u;
            fa = fu;
        } else {
            c = u;
            fc = fu;
        }
    }
    b
}
