//! Adaptive integration of ż = e^{iθ}·f(z) in rotated complex time.
//!
//! The integrator is an embedded Dormand-Prince 4(5) pair on the
//! real-and-imaginary-parts system, written directly in complex
//! arithmetic. Accepted steps carry a quartic dense-output interpolant
//! used to refine the in-step events: blow-up radius crossings and
//! Poincaré-section orbit closures.

use num_complex::Complex64;

use crate::expr::HolomorphicFunction;
use crate::par;

/// Direction of complex time τ·e^{iθ}: θ = 0 is real time, θ = π/2 is
/// imaginary time, θ = π is sign-switched real time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeDirection {
    theta: f64,
}

const THREE_FRAC_PI_2: f64 = 3.0 * std::f64::consts::FRAC_PI_2;

impl TimeDirection {
    /// Wraps `theta` into [0, 2π).
    pub fn new(theta: f64) -> Self {
        assert!(theta.is_finite(), "time direction must be finite");
        let mut t = theta.rem_euclid(std::f64::consts::TAU);
        if t >= std::f64::consts::TAU {
            t = 0.0;
        }
        Self { theta: t }
    }

    pub fn real_time() -> Self {
        Self { theta: 0.0 }
    }

    pub fn imaginary_time() -> Self {
        Self {
            theta: std::f64::consts::FRAC_PI_2,
        }
    }

    pub fn reversed(self) -> Self {
        Self::new(self.theta + std::f64::consts::PI)
    }

    pub fn theta(self) -> f64 {
        self.theta
    }

    /// e^{iθ}. The four axis directions produce exact unit phases so that
    /// rotation by i or −1 does not pick up trigonometric rounding.
    pub fn phase(self) -> Complex64 {
        if self.theta == 0.0 {
            Complex64::new(1.0, 0.0)
        } else if self.theta == std::f64::consts::FRAC_PI_2 {
            Complex64::new(0.0, 1.0)
        } else if self.theta == std::f64::consts::PI {
            Complex64::new(-1.0, 0.0)
        } else if self.theta == THREE_FRAC_PI_2 {
            Complex64::new(0.0, -1.0)
        } else {
            Complex64::from_polar(1.0, self.theta)
        }
    }
}

/// Controller and termination settings for [`integrate`].
#[derive(Debug, Clone)]
pub struct IntegrationSettings {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: f64,
    pub h_min: f64,
    /// Radius beyond which a trajectory counts as blown up (escape-time
    /// proxy for a finite maximal interval of existence).
    pub r_blowup: f64,
    pub t_max: f64,
    pub max_steps: usize,
    /// Orbit-closure tolerance, relative to the scale max(1, |z0|).
    pub closure_tol: f64,
    /// Optional escape guard radius; the anchor point is operation
    /// specific (orbit classification anchors at the center, curvature
    /// scans at the seed). Plain [`integrate`] ignores it.
    pub guard_radius: Option<f64>,
}

impl Default for IntegrationSettings {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-12,
            h_init: 1e-3,
            h_min: 1e-13,
            r_blowup: 1e6,
            t_max: 200.0,
            max_steps: 1_000_000,
            closure_tol: 1e-8,
            guard_radius: None,
        }
    }
}

impl IntegrationSettings {
    fn validate(&self) {
        assert!(
            self.rtol > 0.0
                && self.atol > 0.0
                && self.h_init > 0.0
                && self.h_min > 0.0
                && self.r_blowup > 0.0
                && self.t_max > 0.0
                && self.max_steps > 0
                && self.closure_tol > 0.0,
            "integration settings must be positive"
        );
        assert!(self.h_min < self.h_init, "h_min must be below h_init");
    }
}

/// Why an integration stopped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Termination {
    /// Reached t_max (or the step budget) without another verdict.
    MaxTime,
    /// |z| exceeded the blow-up radius; the escape time is refined by
    /// bisection on the dense output of the crossing step.
    BlowUp { escape_time: f64 },
    /// Returned to the initial point within the closure tolerance after
    /// accumulating a full turn.
    ClosedOrbit { period: f64 },
    /// The error controller demanded a step below h_min.
    StepUnderflow,
    /// Left the caller-supplied guard region (guarded runs only).
    GuardExit,
}

impl Termination {
    pub fn is_blow_up(&self) -> bool {
        matches!(self, Termination::BlowUp { .. })
    }
}

/// Time-stamped samples of one solution path.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub direction: TimeDirection,
    /// (t, z) at accepted steps; times strictly increasing from 0.
    pub samples: Vec<(f64, Complex64)>,
    pub termination: Termination,
    /// |z(T) − z(0)| recorded when a closed orbit was detected.
    pub closure_residual: Option<f64>,
}

impl Trajectory {
    pub fn last(&self) -> (f64, Complex64) {
        *self.samples.last().expect("trajectory has samples")
    }
}

/// How the in-flight closure detector accumulates its turning angle.
#[derive(Debug, Clone, Copy)]
pub(crate) enum ClosureMode {
    Off,
    /// Accumulate rotation of the velocity vector (Hopf turning); works
    /// for any simple orbit without knowing the enclosed center.
    Tangent,
    /// Accumulate the angle swept around a known center.
    Around(Complex64),
}

// Dormand-Prince 5(4) tableau. The field is autonomous, so the stage
// abscissae never appear explicitly.
const A: [[f64; 6]; 6] = [
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const ER: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

const SAFETY: f64 = 0.9;
const BETA: f64 = 0.04;
const EXPO1: f64 = 0.2 - BETA * 0.75;
const FAC_SHRINK_MAX: f64 = 5.0; // h may shrink by at most 1/5 per rejection
const FAC_GROW_MAX: f64 = 0.1; // and grow by at most 10x per acceptance

/// Quartic dense-output interpolant over one accepted step.
struct DenseStep {
    t: f64,
    h: f64,
    cont: [Complex64; 5],
}

impl DenseStep {
    fn eval(&self, tau: f64) -> Complex64 {
        let s = (tau - self.t) / self.h;
        let s1 = 1.0 - s;
        self.cont[0]
            + (self.cont[1] + (self.cont[2] + (self.cont[3] + self.cont[4] * s1) * s) * s1) * s
    }

    /// Bisects g(dense(τ)) = 0 over (t, t+h] given g(t) < 0 ≤ g(t+h).
    fn bisect_zero(&self, g: impl Fn(Complex64) -> f64) -> (f64, Complex64) {
        let mut lo = self.t;
        let mut hi = self.t + self.h;
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if g(self.eval(mid)) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        (hi, self.eval(hi))
    }
}

fn angle_between(a: Complex64, b: Complex64) -> f64 {
    let cross = a.re * b.im - a.im * b.re;
    let dot = a.re * b.re + a.im * b.im;
    cross.atan2(dot)
}

/// Step underflow while the field magnitude is already past the blow-up
/// radius means the remaining interval of existence is below resolution:
/// report it as blow-up at the current time. For fields of exponential
/// growth the state never reaches |z| = r_blowup in floating point, so
/// this is the escape path they take.
fn underflow_verdict(k1: Complex64, t: f64, s: &IntegrationSettings) -> Termination {
    if k1.norm() > s.r_blowup {
        Termination::BlowUp { escape_time: t }
    } else {
        Termination::StepUnderflow
    }
}

pub(crate) fn integrate_core(
    f: &HolomorphicFunction,
    z0: Complex64,
    dir: TimeDirection,
    s: &IntegrationSettings,
    closure: ClosureMode,
    guard: Option<(Complex64, f64)>,
) -> Trajectory {
    s.validate();
    assert!(z0.re.is_finite() && z0.im.is_finite(), "z0 must be finite");

    let phase = dir.phase();
    let rhs = |z: Complex64| -> Option<Complex64> {
        match f.eval(z) {
            Ok(v) => {
                let w = phase * v;
                (w.re.is_finite() && w.im.is_finite()).then_some(w)
            }
            Err(_) => None,
        }
    };

    let mut samples = vec![(0.0, z0)];
    let finish = |samples: Vec<(f64, Complex64)>, termination, closure_residual| Trajectory {
        direction: dir,
        samples,
        termination,
        closure_residual,
    };

    let mut k1 = match rhs(z0) {
        Some(v) => v,
        // f already overflows at the start point: escape is immediate.
        None => return finish(samples, Termination::BlowUp { escape_time: 0.0 }, None),
    };

    // Closure bookkeeping. The Poincaré section is the line through z0
    // orthogonal to the initial velocity; a return must cross it in the
    // flow direction after a near-full accumulated turn.
    let speed0 = k1.norm();
    let track_closure = !matches!(closure, ClosureMode::Off) && speed0 > 0.0;
    let section_normal = if speed0 > 0.0 { k1 / speed0 } else { k1 };
    let section = |z: Complex64| {
        let d = z - z0;
        section_normal.re * d.re + section_normal.im * d.im
    };
    let closure_tol_abs = s.closure_tol * z0.norm().max(1.0);
    let mut turn = 0.0_f64;
    let mut prev_angle_ref = match closure {
        ClosureMode::Around(c) => z0 - c,
        _ => k1,
    };

    let mut t = 0.0_f64;
    let mut y = z0;
    let mut h = s.h_init.min(s.t_max);
    let mut facold = 1e-4_f64;
    let mut steps = 0usize;
    let mut k = [Complex64::new(0.0, 0.0); 7];

    loop {
        if t >= s.t_max || s.t_max - t < s.h_min {
            return finish(samples, Termination::MaxTime, None);
        }
        if steps >= s.max_steps {
            return finish(samples, Termination::MaxTime, None);
        }
        steps += 1;
        let h_step = h.min(s.t_max - t);

        // Stages; an overflow inside a stage means the step reached too
        // far, so shrink, unless the field itself is already past the
        // blow-up radius.
        k[0] = k1;
        let mut stage_failed = false;
        for i in 0..6 {
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, kj) in k.iter().enumerate().take(i + 1) {
                acc += A[i][j] * kj;
            }
            match rhs(y + h_step * acc) {
                Some(v) => k[i + 1] = v,
                None => {
                    stage_failed = true;
                    break;
                }
            }
        }
        if stage_failed {
            if k1.norm() > s.r_blowup {
                return finish(samples, Termination::BlowUp { escape_time: t }, None);
            }
            h = h_step * 0.5;
            if h < s.h_min {
                return finish(samples, underflow_verdict(k1, t, s), None);
            }
            continue;
        }
        let y_new = y + h_step * (A[5][0] * k[0] + A[5][2] * k[2] + A[5][3] * k[3] + A[5][4] * k[4] + A[5][5] * k[5]);
        // k7 = f(y_new): the FSAL stage, part of the error estimate.
        if !(y_new.re.is_finite() && y_new.im.is_finite()) {
            h = h_step * 0.5;
            if h < s.h_min {
                return finish(samples, underflow_verdict(k1, t, s), None);
            }
            continue;
        }
        match rhs(y_new) {
            Some(v) => k[6] = v,
            None => {
                if y_new.norm() > s.r_blowup {
                    // The endpoint is already past the radius; refine the
                    // crossing on the 5th-order solution segment directly.
                    let dense = dense_step(t, h_step, y, y_new, &k);
                    let r = s.r_blowup;
                    let (tau, z_esc) = dense.bisect_zero(|z| z.norm() - r);
                    if tau > t {
                        samples.push((tau, z_esc));
                    }
                    return finish(samples, Termination::BlowUp { escape_time: tau }, None);
                }
                h = h_step * 0.5;
                if h < s.h_min {
                    return finish(samples, underflow_verdict(k1, t, s), None);
                }
                continue;
            }
        }

        // Weighted RMS error over the two real components.
        let mut err_acc = Complex64::new(0.0, 0.0);
        for (j, kj) in k.iter().enumerate() {
            err_acc += ER[j] * kj;
        }
        err_acc *= h_step;
        let sk_re = s.atol + s.rtol * y.re.abs().max(y_new.re.abs());
        let sk_im = s.atol + s.rtol * y.im.abs().max(y_new.im.abs());
        let err = (((err_acc.re / sk_re).powi(2) + (err_acc.im / sk_im).powi(2)) / 2.0).sqrt();

        let fac11 = err.powf(EXPO1);
        if err <= 1.0 {
            // Accepted.
            let fac = (fac11 / facold.powf(BETA) / SAFETY).clamp(FAC_GROW_MAX, FAC_SHRINK_MAX);
            facold = err.max(1.0e-4);
            let t_new = t + h_step;
            let dense = dense_step(t, h_step, y, y_new, &k);

            if y_new.norm() > s.r_blowup {
                let r = s.r_blowup;
                let (tau, z_esc) = dense.bisect_zero(|z| z.norm() - r);
                if tau > t {
                    samples.push((tau, z_esc));
                }
                return finish(samples, Termination::BlowUp { escape_time: tau }, None);
            }

            if track_closure {
                let new_ref = match closure {
                    ClosureMode::Around(c) => y_new - c,
                    _ => k[6],
                };
                turn += angle_between(prev_angle_ref, new_ref);
                prev_angle_ref = new_ref;
                if turn.abs() >= 1.9 * std::f64::consts::PI {
                    let s_old = section(y);
                    let s_new = section(y_new);
                    if s_old < 0.0 && s_new >= 0.0 {
                        let (tau, z_ret) = dense.bisect_zero(section);
                        let residual = (z_ret - z0).norm();
                        if residual < closure_tol_abs && tau > t {
                            samples.push((tau, z_ret));
                            return finish(
                                samples,
                                Termination::ClosedOrbit { period: tau },
                                Some(residual),
                            );
                        }
                    }
                }
            }

            if let Some((anchor, radius)) = guard {
                if (y_new - anchor).norm() > radius {
                    samples.push((t_new, y_new));
                    return finish(samples, Termination::GuardExit, None);
                }
            }

            samples.push((t_new, y_new));
            t = t_new;
            y = y_new;
            k1 = k[6];
            h = h_step / fac;
        } else {
            h = h_step / (FAC_SHRINK_MAX.min(fac11 / SAFETY));
            if h < s.h_min {
                return finish(samples, underflow_verdict(k1, t, s), None);
            }
        }
    }
}

fn dense_step(t: f64, h: f64, y: Complex64, y_new: Complex64, k: &[Complex64; 7]) -> DenseStep {
    let ydiff = y_new - y;
    let bspl = h * k[0] - ydiff;
    let mut dsum = Complex64::new(0.0, 0.0);
    for (j, kj) in k.iter().enumerate() {
        dsum += D[j] * kj;
    }
    DenseStep {
        t,
        h,
        cont: [y, ydiff, bspl, ydiff - h * k[6] - bspl, h * dsum],
    }
}

/// Integrates ż = e^{iθ}·f(z) from `z0` until t_max, blow-up, orbit
/// closure or step underflow, whichever verdict applies first.
pub fn integrate(
    f: &HolomorphicFunction,
    z0: Complex64,
    dir: TimeDirection,
    s: &IntegrationSettings,
) -> Trajectory {
    integrate_core(f, z0, dir, s, ClosureMode::Tangent, None)
}

/// Integrates from every seed; runs in parallel under the default feature.
pub fn integrate_batch(
    f: &HolomorphicFunction,
    seeds: &[Complex64],
    dir: TimeDirection,
    s: &IntegrationSettings,
) -> Vec<Trajectory> {
    par::map_slice(seeds, |&z0| integrate(f, z0, dir, s))
}

/// Finite-escape-time report: a trajectory is a positive (negative)
/// separatrix when its forward (backward) maximal interval of existence
/// is finite, proxied by blow-up past `r_blowup`.
#[derive(Debug, Clone)]
pub struct EscapeReport {
    pub forward: Termination,
    pub backward: Termination,
    pub is_positive_separatrix: bool,
    pub is_negative_separatrix: bool,
}

pub fn escape_report(
    f: &HolomorphicFunction,
    z0: Complex64,
    s: &IntegrationSettings,
) -> EscapeReport {
    let forward = integrate(f, z0, TimeDirection::real_time(), s).termination;
    let backward = integrate(f, z0, TimeDirection::real_time().reversed(), s).termination;
    EscapeReport {
        is_positive_separatrix: forward.is_blow_up(),
        is_negative_separatrix: backward.is_blow_up(),
        forward,
        backward,
    }
}
