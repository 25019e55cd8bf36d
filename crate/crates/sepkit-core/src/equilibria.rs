//! Zeros of f and their classification from the holomorphic derivative.
//!
//! A simple zero z₀ is a node when f'(z₀) is real, a center when it is
//! purely imaginary, and a focus otherwise; rotation of time by e^{iθ}
//! rotates f'(z₀) the same way, so a quarter turn swaps nodes and centers.

use num_complex::Complex64;

use crate::expr::HolomorphicFunction;
use crate::flow::TimeDirection;
use crate::geom::Rectangle;
use crate::par;

/// Relative half-width of the "real resp. imaginary" bands; exact-arithmetic
/// statements need a tolerance in floating point.
pub const DEFAULT_TOL_CLASS: f64 = 1e-9;

const NEWTON_MAX_ITER: usize = 80;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EquilibriumKind {
    Node { stable: bool },
    /// orientation +1: counterclockwise linearized rotation, −1: clockwise.
    Center { orientation: i32 },
    Focus { stable: bool, orientation: i32 },
    Degenerate,
}

impl EquilibriumKind {
    pub fn is_center(&self) -> bool {
        matches!(self, EquilibriumKind::Center { .. })
    }
}

/// A located zero of f with its local linearization data.
#[derive(Debug, Clone)]
pub struct Equilibrium {
    pub location: Complex64,
    pub f_prime: Complex64,
    pub kind: EquilibriumKind,
    /// |f(location)| after Newton refinement.
    pub residual: f64,
}

/// Classifies a simple zero from the value of f' there.
///
/// With a = Re f', b = Im f', m = |f'|: degenerate when m < tol, node when
/// |b| ≤ tol·m, center when |a| ≤ tol·m, focus otherwise. Stability of
/// nodes and foci follows the sign of a (ż ≈ f'·(z−z₀), negative real part
/// attracts); orientation is the sign of b.
pub fn classify(f_prime: Complex64, tol_class: f64) -> EquilibriumKind {
    let a = f_prime.re;
    let b = f_prime.im;
    let m = f_prime.norm();
    if m < tol_class {
        EquilibriumKind::Degenerate
    } else if b.abs() <= tol_class * m {
        EquilibriumKind::Node { stable: a < 0.0 }
    } else if a.abs() <= tol_class * m {
        EquilibriumKind::Center {
            orientation: if b > 0.0 { 1 } else { -1 },
        }
    } else {
        EquilibriumKind::Focus {
            stable: a < 0.0,
            orientation: if b > 0.0 { 1 } else { -1 },
        }
    }
}

/// Classification after rotating time by e^{iθ}: the flow of e^{iθ}f has
/// derivative e^{iθ}f'(z₀) at the same zero.
pub fn classify_under_rotation(
    f_prime: Complex64,
    dir: TimeDirection,
    tol_class: f64,
) -> EquilibriumKind {
    classify(dir.phase() * f_prime, tol_class)
}

/// Newton search for zeros of f from an n×n seed grid over the domain.
///
/// Converged roots are deduplicated within 1e-8 of the domain diagonal and
/// returned sorted by (re, im). Roots closer than the merge tolerance to
/// the boundary are not reported. Non-convergent seeds are dropped.
pub fn find_zeros(
    f: &HolomorphicFunction,
    domain: &Rectangle,
    grid_n: usize,
    zero_tol: f64,
) -> Vec<Equilibrium> {
    assert!(grid_n >= 2, "need at least a 2x2 seed grid");
    assert!(zero_tol > 0.0);
    let fp = f.derivative(1);
    let merge_tol = 1e-8 * domain.diagonal();

    let roots = par::map_range(grid_n * grid_n, |idx| {
        let seed = domain.grid_node(idx % grid_n, idx / grid_n, grid_n);
        newton_root(f, &fp, seed, domain)
    });

    let mut candidates: Vec<Complex64> = roots
        .into_iter()
        .flatten()
        .filter(|z| domain.contains_with_margin(*z, merge_tol))
        .collect();
    candidates.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());

    let mut out: Vec<Equilibrium> = Vec::new();
    for z in candidates {
        if out.iter().any(|e| (e.location - z).norm() < merge_tol) {
            continue;
        }
        let Ok(fz) = f.eval(z) else { continue };
        let Ok(fpz) = fp.eval(z) else { continue };
        let residual = fz.norm();
        if residual >= zero_tol {
            continue;
        }
        out.push(Equilibrium {
            location: z,
            f_prime: fpz,
            kind: classify(fpz, DEFAULT_TOL_CLASS),
            residual,
        });
    }
    out
}

fn newton_root(
    f: &HolomorphicFunction,
    fp: &HolomorphicFunction,
    seed: Complex64,
    domain: &Rectangle,
) -> Option<Complex64> {
    let scale = domain.diagonal();
    let mut z = seed;
    for _ in 0..NEWTON_MAX_ITER {
        let fz = f.eval(z).ok()?;
        let fpz = fp.eval(z).ok()?;
        if fpz.norm() < 1e-300 {
            return None;
        }
        let step = fz / fpz;
        z -= step;
        if !(z.re.is_finite() && z.im.is_finite()) || (z - domain.center()).norm() > 50.0 * scale {
            return None;
        }
        if step.norm() < 1e-14 * (1.0 + z.norm()) {
            // Two polish iterations to settle the residual.
            for _ in 0..2 {
                let fz = f.eval(z).ok()?;
                let fpz = fp.eval(z).ok()?;
                if fpz.norm() < 1e-300 {
                    break;
                }
                z -= fz / fpz;
            }
            return Some(z);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_PI_2, PI};

    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn fixture() -> HolomorphicFunction {
        HolomorphicFunction::parse("cosh(z-0.5)").unwrap()
    }

    #[test]
    fn classify_examples() {
        assert_eq!(
            classify(c(1.0, 0.0), DEFAULT_TOL_CLASS),
            EquilibriumKind::Node { stable: false }
        );
        assert_eq!(
            classify(c(0.0, 1.0), DEFAULT_TOL_CLASS),
            EquilibriumKind::Center { orientation: 1 }
        );
        assert_eq!(
            classify(c(-1.0, -1.0), DEFAULT_TOL_CLASS),
            EquilibriumKind::Focus {
                stable: true,
                orientation: -1
            }
        );
        assert_eq!(classify(c(0.0, 0.0), DEFAULT_TOL_CLASS), EquilibriumKind::Degenerate);
    }

    #[test]
    fn rotation_examples() {
        let quarter = TimeDirection::imaginary_time();
        assert_eq!(
            classify_under_rotation(c(1.0, 0.0), quarter, DEFAULT_TOL_CLASS),
            EquilibriumKind::Center { orientation: 1 }
        );
        // i·i = −1: a center becomes a stable node in imaginary time.
        assert_eq!(
            classify_under_rotation(c(0.0, 1.0), quarter, DEFAULT_TOL_CLASS),
            EquilibriumKind::Node { stable: true }
        );
        // Sign switch flips stability.
        assert_eq!(
            classify_under_rotation(c(1.0, 0.0), TimeDirection::new(PI), DEFAULT_TOL_CLASS),
            EquilibriumKind::Node { stable: true }
        );
        // theta = 0 is the identity.
        for f_prime in [c(1.0, 0.0), c(0.0, -2.0), c(0.3, 0.4)] {
            assert_eq!(
                classify_under_rotation(f_prime, TimeDirection::real_time(), DEFAULT_TOL_CLASS),
                classify(f_prime, DEFAULT_TOL_CLASS)
            );
        }
    }

    #[test]
    fn fixture_zeros_in_the_wide_window() {
        // cosh(z-0.5) = 0 iff z = 0.5 + i(k+1/2)π; the 1.5π strip holds
        // exactly k = 0 and k = −1 (the k = ±1 boundary zeros excluded).
        let domain = Rectangle::new(-10.0, 10.0, -1.5 * PI, 1.5 * PI);
        let zeros = find_zeros(&fixture(), &domain, 40, 1e-12);
        assert_eq!(zeros.len(), 2, "{zeros:?}");
        assert!((zeros[0].location - c(0.5, -FRAC_PI_2)).norm() < 1e-10);
        assert!((zeros[1].location - c(0.5, FRAC_PI_2)).norm() < 1e-10);
        assert!(zeros.iter().all(|e| e.residual < 1e-12));
        assert_eq!(zeros[0].kind, EquilibriumKind::Center { orientation: -1 });
        assert_eq!(zeros[1].kind, EquilibriumKind::Center { orientation: 1 });
    }

    #[test]
    fn identity_single_zero() {
        let f = HolomorphicFunction::parse("z").unwrap();
        let zeros = find_zeros(&f, &Rectangle::new(-1.0, 1.0, -1.0, 1.0), 8, 1e-12);
        assert_eq!(zeros.len(), 1);
        assert!(zeros[0].location.norm() < 1e-14);
        assert_eq!(zeros[0].kind, EquilibriumKind::Node { stable: false });
    }

    #[test]
    fn quadratic_pair() {
        let f = HolomorphicFunction::parse("z^2+1").unwrap();
        let zeros = find_zeros(&f, &Rectangle::new(-2.0, 2.0, -2.0, 2.0), 12, 1e-12);
        assert_eq!(zeros.len(), 2);
        assert!((zeros[0].location - c(0.0, -1.0)).norm() < 1e-10);
        assert!((zeros[1].location - c(0.0, 1.0)).norm() < 1e-10);
    }

    #[test]
    fn newton_rerun_stays_put() {
        let domain = Rectangle::new(-10.0, 10.0, -1.5 * PI, 1.5 * PI);
        let f = fixture();
        let fp = f.derivative(1);
        for e in find_zeros(&f, &domain, 40, 1e-12) {
            let again = newton_root(&f, &fp, e.location, &domain).unwrap();
            assert!((again - e.location).norm() < 1e-12);
        }
    }

    #[test]
    fn center_orientations_alternate_along_the_axis() {
        // Centers sit at 0.5 + i(k+1/2)π with f' = i·(−1)^k.
        let domain = Rectangle::new(-2.0, 3.0, -2.0 * PI, 2.0 * PI);
        let zeros = find_zeros(&fixture(), &domain, 36, 1e-12);
        assert_eq!(zeros.len(), 4);
        for e in &zeros {
            let k = ((e.location.im / PI) - 0.5).round() as i32;
            let expect = if k % 2 == 0 { 1 } else { -1 };
            assert_eq!(
                e.kind,
                EquilibriumKind::Center { orientation: expect },
                "k = {k}"
            );
        }
    }

    #[test]
    fn quarter_turn_swaps_node_and_center_over_sweep() {
        let quarter = TimeDirection::imaginary_time();
        for deg in 0..360 {
            let phi = 2.0 * PI * deg as f64 / 360.0;
            let fp = c(phi.cos(), phi.sin());
            let plain = classify(fp, DEFAULT_TOL_CLASS);
            let rotated = classify_under_rotation(fp, quarter, DEFAULT_TOL_CLASS);
            match plain {
                EquilibriumKind::Node { stable } => assert_eq!(
                    rotated,
                    EquilibriumKind::Center {
                        orientation: if stable { -1 } else { 1 }
                    },
                    "deg={deg}"
                ),
                EquilibriumKind::Center { orientation } => assert_eq!(
                    rotated,
                    EquilibriumKind::Node {
                        stable: orientation > 0
                    },
                    "deg={deg}"
                ),
                EquilibriumKind::Focus { stable, orientation } => assert_eq!(
                    rotated,
                    EquilibriumKind::Focus {
                        stable: orientation > 0,
                        orientation: if stable { -1 } else { 1 }
                    },
                    "deg={deg}"
                ),
                EquilibriumKind::Degenerate => panic!("unit f' cannot be degenerate"),
            }
        }
    }
}
