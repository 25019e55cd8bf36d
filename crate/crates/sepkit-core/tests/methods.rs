//! Cross-method checks on the cosh flow, whose separatrices are known in
//! closed form: the lines Im z = kπ, with period strips between them.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use sepkit_core::{
    bvp_separatrix_point, classify_orbit, curvature_max_scan, find_zeros, index_product_test,
    index_scan, integrate, zdp_curve, BvpProblem, Equilibrium, HolomorphicFunction,
    IntegrationSettings, OrbitVerdict, ProbeOutcome, Rectangle, Termination, TimeDirection,
};

fn fixture() -> HolomorphicFunction {
    HolomorphicFunction::parse("cosh(z-0.5)").unwrap()
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// The two centers flanking the real axis, lower first.
fn axis_centers() -> Vec<Equilibrium> {
    let zs = find_zeros(
        &fixture(),
        &Rectangle::new(-3.0, 4.0, -3.0, 3.0),
        30,
        1e-12,
    );
    assert_eq!(zs.len(), 2);
    zs
}

#[test]
fn scan_candidates_reverify_at_fresh_probe_offsets() {
    let f = fixture();
    let zs = axis_centers();
    let s = IntegrationSettings::default();
    let candidates = index_scan(&f, (c(2.0, -0.8), c(2.0, 0.8)), (&zs[0], &zs[1]), 0.2, &s, 1e-6)
        .unwrap();
    assert!(!candidates.is_empty());
    for cand in candidates.iter().filter(|c| c.converged) {
        for eps in [0.1, 0.2, 0.4] {
            let probe = index_product_test(
                &f,
                cand.location,
                c(0.0, 1.0),
                eps,
                (&zs[1], &zs[0]),
                &s,
            );
            assert_eq!(
                probe.outcome,
                ProbeOutcome::Product(-1),
                "eps {eps} at {}",
                cand.location
            );
        }
    }
}

#[test]
fn interior_probes_never_yield_minus_one() {
    let f = fixture();
    let zs = axis_centers();
    let upper = zs
        .iter()
        .find(|e| e.location.im > 0.0)
        .expect("upper center");
    let s = IntegrationSettings::default();
    let mut rng = StdRng::seed_from_u64(0x1f2e);
    let eps = 0.25;
    for _ in 0..50 {
        // Strictly inside the upper period strip, margin wider than eps.
        let z_star = c(
            rng.random_range(-1.0..2.0),
            rng.random_range(0.3_f64..(PI - 0.3)),
        );
        let probe = index_product_test(&f, z_star, c(0.0, 1.0), eps, (upper, upper), &s);
        assert_ne!(
            probe.outcome,
            ProbeOutcome::Product(-1),
            "interior point {z_star} produced -1"
        );
    }
}

#[test]
fn methods_agree_on_the_real_axis_separatrix() {
    let f = fixture();
    let zs = axis_centers();
    let s = IntegrationSettings::default();

    let scan = index_scan(&f, (c(2.0, -0.8), c(2.0, 0.8)), (&zs[0], &zs[1]), 0.2, &s, 1e-6)
        .unwrap();
    let scan_im = scan[0].location.im;

    let contours = zdp_curve(&f, &Rectangle::new(1.0, 3.0, -1.0, 1.0), 64, 1e-12).unwrap();
    // Vertex nearest Re = 2 on the extracted axis contour.
    let zdp_im = contours
        .iter()
        .flat_map(|pl| pl.points.iter())
        .filter(|pt| pt.location.im.abs() < 0.5)
        .min_by(|a, b| {
            (a.location.re - 2.0)
                .abs()
                .partial_cmp(&(b.location.re - 2.0).abs())
                .unwrap()
        })
        .expect("axis contour vertex")
        .location
        .im;

    let bvp = bvp_separatrix_point(&f, &BvpProblem::new(2.0), &s).unwrap();
    let bvp_im = bvp.location.im;

    let mut scan_settings = s.clone();
    scan_settings.t_max = 40.0;
    let curv = curvature_max_scan(&f, c(2.0, 0.5), &scan_settings).unwrap();
    let curv_im = curv.location.im;

    for (name, im) in [("index", scan_im), ("zdp", zdp_im), ("bvp", bvp_im)] {
        assert!(im.abs() < 1e-4, "{name} candidate off the axis: {im}");
    }
    assert!((scan_im - zdp_im).abs() < 1e-4);
    assert!((scan_im - bvp_im).abs() < 1e-4);
    assert!((zdp_im - bvp_im).abs() < 1e-4);
    assert!(curv_im.abs() < 1e-2, "curvature candidate: {curv_im}");
}

#[test]
fn closed_orbits_return_only_after_a_full_turn() {
    let f = fixture();
    let s = IntegrationSettings::default();
    for z0 in [c(0.5, FRAC_PI_2 + 0.3), c(1.5, 0.7), c(2.0, 0.2)] {
        let traj = integrate(&f, z0, TimeDirection::real_time(), &s);
        let Termination::ClosedOrbit { period } = traj.termination else {
            panic!("expected closed orbit from {z0}, got {:?}", traj.termination);
        };
        assert!(traj.closure_residual.unwrap() < 1e-8 * z0.norm().max(1.0));
        // No mid-orbit revisit of the start neighborhood.
        let min_mid = traj
            .samples
            .iter()
            .filter(|(t, _)| *t > 0.15 * period && *t < 0.85 * period)
            .map(|(_, z)| (z - z0).norm())
            .fold(f64::INFINITY, f64::min);
        assert!(
            min_mid > 1e-3,
            "orbit from {z0} re-enters early: {min_mid}"
        );
    }
}

#[test]
fn orbit_period_matches_the_residue_of_the_center() {
    // Every periodic orbit around a simple center z* has period
    // 2π/|f'(z*)|; for the fixture |f'| = 1 at both centers.
    let f = fixture();
    let s = IntegrationSettings::default();
    for z0 in [c(0.5, FRAC_PI_2 + 0.4), c(2.0, 0.3), c(-1.0, 1.2)] {
        let out = classify_orbit(&f, z0, c(0.5, FRAC_PI_2), &s);
        match out.verdict {
            OrbitVerdict::Periodic { period, index } => {
                assert_eq!(index, 1);
                assert!(
                    (period - 2.0 * PI).abs() < 1e-6,
                    "period from {z0}: {period}"
                );
            }
            other => panic!("{z0}: {other:?}"),
        }
    }
}

#[test]
fn curvature_candidates_track_their_strips() {
    let f = fixture();
    let s = IntegrationSettings {
        t_max: 40.0,
        ..IntegrationSettings::default()
    };
    // Seeds in the lower half of the k=0 strip cross Im = 0; seeds in the
    // upper half cross Im = π.
    for (z0, line) in [
        (c(2.0, 0.5), 0.0),
        (c(1.0, 0.3), 0.0),
        (c(-1.0, 2.6), PI),
        (c(0.0, 2.8), PI),
        (c(1.5, -0.4), 0.0),
    ] {
        let cand = curvature_max_scan(&f, z0, &s).unwrap();
        assert!(
            (cand.location.im - line).abs() < 1e-2,
            "seed {z0}: candidate {} vs line {line}",
            cand.location
        );
    }
}
