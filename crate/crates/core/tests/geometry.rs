use std::f64::consts::PI;

use approx::assert_relative_eq;
use yflow::geometry::{
    audit_assumptions, build_manifold, default_grid, DiscretizedManifold, RadialGrid, WarpedProfile,
};

fn build(profile: WarpedProfile, m: usize) -> DiscretizedManifold {
    let grid = default_grid(&profile, m, None).unwrap();
    build_manifold(profile, grid).unwrap()
}

#[test]
fn round_three_sphere_normalizes_to_constant_curvature() {
    let m = build(WarpedProfile::sphere(3).unwrap(), 256);
    assert_relative_eq!(m.volume(), 1.0, max_relative = 1e-12);
    // Vol(S^3) = 2 pi^2 and S = 6 before the homothety; S scales by Vol^{2/n}.
    assert_relative_eq!(m.raw_volume(), 2.0 * PI * PI, max_relative = 1e-4);
    let expected = 6.0 * (2.0 * PI * PI).powf(2.0 / 3.0);
    for s in m.s0() {
        assert_relative_eq!(*s, expected, max_relative = 1e-10);
    }
}

#[test]
fn flat_cone_has_zero_curvature() {
    let p = WarpedProfile::cone(3, 1.0).unwrap();
    for x in [1e-4, 0.1, 0.5, 1.0] {
        assert!(p.scalar_curvature(x).abs() < 1e-12);
    }
}

#[test]
fn cone_curvature_matches_symbolic_formula() {
    // phi = 0.8 x at n = 3: (n-1)(n-2)(1-a^2)/(a^2 x^2) = 2 * 0.36 / 0.64 / x^2 = 1.125 / x^2.
    let p = WarpedProfile::cone(3, 0.8).unwrap();
    for x in [1e-3, 0.01, 0.3, 0.77, 1.0] {
        assert_relative_eq!(p.scalar_curvature(x), 1.125 / (x * x), max_relative = 1e-12);
    }
}

#[test]
fn volumes_agree_across_resolutions() {
    let p = WarpedProfile::perturbed_sphere(4, 0.2).unwrap();
    for m in [32, 64, 128] {
        let coarse = build(p.clone(), m).raw_volume();
        let fine = build(p.clone(), 2 * m).raw_volume();
        assert!((fine - coarse).abs() <= coarse / (m * m) as f64);
        assert_relative_eq!(fine, coarse, max_relative = 1e-10);
    }
}

#[test]
fn graded_cone_volume_is_exact() {
    // phi = a x on (0, 1]: Vol = |S^3| a^3 / 4 = 2 pi^2 a^3 / 4.
    let exact = 2.0 * PI * PI * 0.6f64.powi(3) / 4.0;
    for m in [64, 256] {
        let man = build(WarpedProfile::cone(4, 0.6).unwrap(), m);
        assert_relative_eq!(man.raw_volume(), exact, max_relative = 1e-12);
    }
}

#[test]
fn audit_verdicts() {
    let sphere = build(WarpedProfile::sphere(3).unwrap(), 128);
    assert!(audit_assumptions(&sphere, 4.5).all_passed());

    let dented = build(WarpedProfile::perturbed_sphere(3, 0.1).unwrap(), 128);
    let report = audit_assumptions(&dented, 4.5);
    assert!(report.all_passed(), "{report}");
    assert!(report.s0_linf.is_some());

    // int x^{-2q} x^2 dx diverges for q = 4.5 at n = 3: exponent n - 2q = -6.
    let cone = build(WarpedProfile::cone(3, 0.8).unwrap(), 128);
    let report = audit_assumptions(&cone, 4.5);
    assert!(!report.passed("s0_lq_finite"));
    assert_eq!(report.divergence_exponent, Some(-6.0));
    assert!(report.s0_linf.is_none());
    assert!(!report.warnings.is_empty());
}

#[test]
fn mismatched_grid_is_rejected() {
    let p = WarpedProfile::sphere(3).unwrap();
    let grid = RadialGrid::uniform(32, 2.0).unwrap();
    assert!(build_manifold(p, grid).is_err());
}
