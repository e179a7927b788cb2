use std::f64::consts::PI;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use yflow::discretization::{integrate, Field};
use yflow::flow::renormalize_volume;
use yflow::geometry::{build_manifold, default_grid, DiscretizedManifold, WarpedProfile};
use yflow::yamabe::{
    average_scalar_forms, estimate_yamabe_constant, scalar_curvature_flow, sobolev_constants,
    yamabe_quotient, FlowState, YamabeOptions,
};

fn build(profile: WarpedProfile, m: usize) -> DiscretizedManifold {
    let grid = default_grid(&profile, m, None).unwrap();
    build_manifold(profile, grid).unwrap()
}

fn round_s3(m: usize) -> DiscretizedManifold {
    build(WarpedProfile::sphere(3).unwrap(), m)
}

#[test]
fn unit_factor_reproduces_background() {
    let m = build(WarpedProfile::perturbed_sphere(3, 0.4).unwrap(), 128);
    let state = FlowState::initial(&m);
    for (s, s0) in state.s.iter().zip(m.s0()) {
        assert!((s - s0).abs() <= 1e-12 * s0.abs().max(1.0));
    }
    assert!((state.rho - integrate(m.s0(), m.mu())).abs() < 1e-10 * state.rho.abs());
}

#[test]
fn round_sphere_average_curvature() {
    let m = round_s3(128);
    let state = FlowState::initial(&m);
    let expected = 6.0 * (2.0 * PI * PI).powf(2.0 / 3.0);
    assert!((state.rho - expected).abs() < 1e-10 * expected);
    let q = yamabe_quotient(&m, &Field::constant(m.len(), 1.0)).unwrap();
    assert!((q - expected).abs() < 1e-10 * expected);
}

#[test]
fn curvature_of_perturbed_factor_matches_closed_form() {
    // u = 1 + 0.1 cos(x/c) on the normalized round S^3 (n = 3, N = 5, c_n = 8):
    // Delta u = -0.3 cos(x/c) / c^2, so S = u^{-5} (S0 u + 2.4 cos(x/c) / c^2).
    let m = round_s3(256);
    let c = m.length_scale();
    let u = Field::from_fn(&m, |x| 1.0 + 0.1 * (x / c).cos());
    let s = scalar_curvature_flow(&m, &u).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10 {
        let i = rng.gen_range(0..m.len());
        let x = m.nodes()[i];
        let exact = (m.s0()[i] * u[i] + 2.4 * (x / c).cos() / (c * c)) * u[i].powi(-5);
        assert!(
            (s[i] - exact).abs() < 1e-4 * exact.abs(),
            "node {i}: {} vs {exact}",
            s[i]
        );
    }
}

#[test]
fn average_curvature_forms_agree() {
    let m = build(WarpedProfile::perturbed_sphere(3, 0.2).unwrap(), 256);
    let u = Field::from_fn(&m, |x| 1.0 + 0.2 * (2.0 * x).cos() * x.sin());
    let state = renormalize_volume(&m, u, 0.0).unwrap();
    let forms = average_scalar_forms(&m, &state.u, 1e-12).unwrap();
    assert!(forms.discrepancy() <= 1e-8 * forms.rho.abs(), "{forms:?}");
}

#[test]
fn estimator_is_bounded_by_constant_curvature() {
    let m = build(WarpedProfile::sphere(4).unwrap(), 128);
    let s0 = m.s0()[0];
    let est = estimate_yamabe_constant(&m, &YamabeOptions::default()).unwrap();
    assert!(est.value <= s0 * (1.0 + 1e-12));
}

#[test]
fn descent_history_is_monotone() {
    let m = build(WarpedProfile::perturbed_sphere(3, 0.5).unwrap(), 128);
    let opts = YamabeOptions::default();
    let est = estimate_yamabe_constant(&m, &opts).unwrap();
    assert!(est.history.len() > 1);
    for w in est.history.windows(2) {
        assert!(w[1] <= w[0] * (1.0 + 1e-14), "{w:?}");
    }
    let q1 = yamabe_quotient(&m, &Field::constant(m.len(), 1.0)).unwrap();
    assert!(est.value < q1);
    let again = estimate_yamabe_constant(&m, &opts).unwrap();
    assert_eq!(est.value.to_bits(), again.value.to_bits());
}

#[test]
fn cone_has_no_curvature_constant() {
    let m = build(WarpedProfile::cone(3, 0.8).unwrap(), 64);
    let c = sobolev_constants(&m, 10.0, 1.0, 1.0).unwrap();
    assert!(c.b0.is_none());
    assert!(c.b_t.is_none());
    assert!((c.a0 - 0.8).abs() < 1e-15);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn quotient_is_scale_invariant(a in 0.05f64..0.9, k in 1.0f64..4.0, scale in 1e-3f64..1e3) {
        let m = build(WarpedProfile::perturbed_sphere(3, 0.3).unwrap(), 48);
        let v = Field::from_fn(&m, |x| 1.0 + a * (k * x).cos());
        let q = yamabe_quotient(&m, &v).unwrap();
        let qs = yamabe_quotient(&m, &v.scale(scale)).unwrap();
        prop_assert!((q - qs).abs() <= 1e-12 * q.abs());
        let qn = yamabe_quotient(&m, &v.scale(-scale)).unwrap();
        prop_assert!((q - qn).abs() <= 1e-12 * q.abs());
    }

    #[test]
    fn constant_factor_scales_curvature(c in 0.1f64..10.0) {
        let m = build(WarpedProfile::perturbed_sphere(4, 0.3).unwrap(), 48);
        let s = scalar_curvature_flow(&m, &Field::constant(m.len(), c)).unwrap();
        let factor = c.powf(-2.0);
        for (a, b) in s.iter().zip(m.s0()) {
            prop_assert!((a - factor * b).abs() <= 1e-10 * (factor * b).abs().max(1e-8));
        }
    }
}
