use proptest::prelude::*;
use yflow::auxfn::{
    find_counterexample, phi, phi_prime, psi, survey, tilde_G, tilde_H, tilde_phi, tilde_phi_prime,
    AuxError, AuxParams, Inequality, SampleRegion, Sampler, DEFAULT_SEED, F, G, H,
};

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
}

const HOLDING: [Inequality; 9] = [
    Inequality::I1,
    Inequality::I3,
    Inequality::I5,
    Inequality::I7,
    Inequality::I9,
    Inequality::I11,
    Inequality::I12,
    Inequality::I13,
    Inequality::Lim,
];

#[test]
fn holding_inequalities_survive_a_seeded_search() {
    for ineq in HOLDING {
        let mut sampler = Sampler::new(DEFAULT_SEED, SampleRegion::Declared);
        let row = survey(ineq, &mut sampler, 5_000);
        assert_eq!(row.violations, 0, "{ineq}: {:?}", row.first_violation);
    }
}

#[test]
fn broken_bounds_are_found() {
    for ineq in [Inequality::I6, Inequality::I8, Inequality::I10] {
        let mut sampler = Sampler::new(DEFAULT_SEED, SampleRegion::Declared);
        let (p, x) =
            find_counterexample(ineq, &mut sampler, 100_000).unwrap_or_else(|| panic!("{ineq}"));
        assert_eq!(ineq.check(&p, x), Ok(false));
    }
}

#[test]
fn sharpness_boundaries_are_real() {
    let p = AuxParams::new(2.5, 1.0, 8).unwrap();
    // beta = 2.5 > n/4 = 2 breaks I2 on the power branch
    assert!(!Inequality::I2
        .evaluate_unchecked(&p, 0.5)
        .iter()
        .all(|c| c.holds()));
    let at = AuxParams::new(2.0, 1.0, 8).unwrap();
    assert_eq!(Inequality::I2.check(&at, 50.0), Ok(true));
    assert!(matches!(
        Inequality::I2.check(&p, 50.0),
        Err(AuxError::OutsideRegion { .. })
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn families_are_continuous_at_l(beta in 1.0f64..6.0, l in 0.1f64..10.0, nu in 0.05f64..1.0) {
        prop_assume!((nu - 0.5).abs() > 1e-3);
        let p = AuxParams::new(beta, l, 4).unwrap();
        let t = p.with_nu(nu).unwrap();
        let above = l * (1.0 + 1e-12);
        for (a, b) in [
            (phi(&p, l).unwrap(), phi(&p, above).unwrap()),
            (G(&p, l).unwrap(), G(&p, above).unwrap()),
            (H(&p, l).unwrap(), H(&p, above).unwrap()),
            (tilde_phi(&t, l).unwrap(), tilde_phi(&t, above).unwrap()),
            (tilde_G(&t, l).unwrap(), tilde_G(&t, above).unwrap()),
            (tilde_H(&t, l).unwrap(), tilde_H(&t, above).unwrap()),
            (phi_prime(&p, l).unwrap(), phi_prime(&p, above).unwrap()),
            (tilde_phi_prime(&t, l).unwrap(), tilde_phi_prime(&t, above).unwrap()),
        ] {
            prop_assert!(close(a, b, 1e-9), "{a} vs {b}");
        }
    }

    #[test]
    fn families_are_homogeneous(beta in 1.0f64..6.0, l in 0.1f64..10.0, x in 0.0f64..30.0, lambda in 0.1f64..10.0) {
        let p = AuxParams::new(beta, l, 5).unwrap();
        let q = AuxParams::new(beta, lambda * l, 5).unwrap();
        let y = lambda * x;
        prop_assert!(close(phi(&q, y).unwrap(), lambda.powf(beta) * phi(&p, x).unwrap(), 1e-10));
        prop_assert!(close(G(&q, y).unwrap(), lambda.powf(2.0 * beta - 1.0) * G(&p, x).unwrap(), 1e-10));
        prop_assert!(close(H(&q, y).unwrap(), lambda.powf(2.0 * beta) * H(&p, x).unwrap(), 1e-9));
    }

    #[test]
    fn big_f_is_a_root(beta in 1.0f64..6.0, l in 0.1f64..10.0, x in 0.01f64..30.0, n in 3usize..10) {
        let p = AuxParams::new(beta, l, n).unwrap();
        let lhs = F(&p, x).unwrap().powf(2.0 * beta + 1.0);
        prop_assert!(close(lhs, x * yflow::auxfn::f(&p, x).unwrap(), 1e-10));
    }

    #[test]
    fn unit_exponent_recovers_plain_family(beta in 1.0f64..6.0, l in 0.1f64..10.0, x in 0.0f64..30.0) {
        let p = AuxParams::new(beta, l, 4).unwrap().with_nu(1.0).unwrap();
        prop_assert!(close(tilde_phi(&p, x).unwrap(), phi(&p, x).unwrap(), 1e-12));
        prop_assert!(close(tilde_G(&p, x).unwrap(), G(&p, x).unwrap(), 1e-12));
        prop_assert!(close(tilde_H(&p, x).unwrap(), H(&p, x).unwrap(), 1e-10));
    }

    #[test]
    fn g_integrates_phi_prime_squared(beta in 1.0f64..4.0, l in 0.5f64..2.0, x in 0.2f64..5.0) {
        prop_assume!((x - l).abs() > 1e-3);
        let p = AuxParams::new(beta, l, 4).unwrap();
        let h = 1e-5 * x;
        let dg = (G(&p, x + h).unwrap() - G(&p, x - h).unwrap()) / (2.0 * h);
        let dh = (H(&p, x + h).unwrap() - H(&p, x - h).unwrap()) / (2.0 * h);
        prop_assert!(close(dg, phi_prime(&p, x).unwrap().powi(2), 1e-6));
        prop_assert!(close(dh, G(&p, x).unwrap(), 1e-6));
    }

    #[test]
    fn declared_region_draws_hold(seed in any::<u64>(), k in 0usize..9) {
        let ineq = HOLDING[k];
        let mut sampler = Sampler::new(seed, SampleRegion::Declared);
        let (p, x) = sampler.draw(ineq);
        prop_assert_eq!(ineq.check(&p, x), Ok(true), "{} at {:?}, x = {}", ineq, p, x);
    }

    #[test]
    fn psi_approximates_positive_part(eps in 1e-3f64..10.0, x in -50.0f64..50.0, y in -50.0f64..50.0) {
        let px = psi(eps, x);
        prop_assert!(px >= 0.0);
        if x >= 0.0 {
            prop_assert!(px <= x && px >= x - eps);
        }
        prop_assert!((psi(eps, y) - px).abs() <= (y - x).abs() * (1.0 + 1e-12));
        prop_assert!(psi(eps, 0.5 * (x + y)) <= 0.5 * (px + psi(eps, y)) + 1e-12 * (px + psi(eps, y)).max(1.0));
    }
}
