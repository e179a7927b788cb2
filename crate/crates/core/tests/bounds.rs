use proptest::prelude::*;
use yflow::bounds::{
    check_parabolic_sobolev, check_s_minus_decay, check_scal_lower, check_u_upper, cutoff,
    cutoff_time, moser_chain, moser_n, SpaceTimeField, TimeProfile, Verdict,
};
use yflow::config::ScenarioConfig;
use yflow::flow::{run, FlowConfig, Trajectory};
use yflow::geometry::{build_manifold, default_grid, DiscretizedManifold, WarpedProfile};
use yflow::scenario::run_scenario;

fn build(profile: WarpedProfile, m: usize) -> DiscretizedManifold {
    let grid = default_grid(&profile, m, None).unwrap();
    build_manifold(profile, grid).unwrap()
}

fn flow(m: &DiscretizedManifold, t: f64, dt: f64) -> Trajectory {
    run(m, &FlowConfig::fixed(t, dt)).unwrap()
}

#[test]
fn positive_background_never_develops_negative_curvature() {
    let m = build(WarpedProfile::perturbed_sphere(3, 0.1).unwrap(), 96);
    assert!(m.s0().iter().all(|&s| s > 0.0));
    let traj = flow(&m, 0.3, 1e-3);
    for p in [2.0, 4.0, f64::INFINITY] {
        let res = check_s_minus_decay(&m, &traj, p);
        assert!(res.passed(), "{res:?}");
        for row in &res.rows {
            assert_eq!(row.lhs, 0.0);
            assert_eq!(row.rhs, 0.0);
        }
    }
}

#[test]
fn lower_bounds_start_at_the_initial_minimum() {
    let m = build(WarpedProfile::perturbed_sphere(3, 0.1).unwrap(), 96);
    let traj = flow(&m, 0.2, 1e-3);
    let s_min0 = m.s0().iter().copied().fold(f64::INFINITY, f64::min);
    let res = check_scal_lower(&m, &traj);
    assert!(res.passed(), "{res:?}");
    let first = res
        .rows
        .iter()
        .find(|r| r.monitor_id == "scal_lower_rational")
        .unwrap();
    assert_eq!(first.t, 0.0);
    assert!((first.lhs - s_min0).abs() <= 1e-12 * s_min0);
    let upper = check_u_upper(&m, &traj);
    assert!(upper.passed(), "{upper:?}");
    let at_zero = upper.rows.iter().find(|r| r.t == 0.0).unwrap();
    assert_eq!(at_zero.rhs, 1.0);
}

#[test]
fn growth_rate_on_round_sphere() {
    let m = build(WarpedProfile::sphere(3).unwrap(), 64);
    let traj = flow(&m, 0.1, 1e-3);
    let res = check_u_upper(&m, &traj);
    // C = (n - 2)/4 rho(0) with rho(0) = 6 (2 pi^2)^{2/3}
    let c = 1.5 * (2.0 * std::f64::consts::PI.powi(2)).powf(2.0 / 3.0);
    assert!((c - 10.9558).abs() < 1e-4);
    for row in res.rows.iter().filter(|r| r.t > 0.0) {
        assert!((row.rhs.ln() / row.t - c).abs() < 1e-9 * c, "{row:?}");
    }
}

#[test]
fn moser_ratios_on_round_sphere() {
    // S is constant in space and time, so each ratio depends only on the cylinder lengths.
    let m = build(WarpedProfile::sphere(3).unwrap(), 64);
    let traj = flow(&m, 1.0, 1e-2);
    let chain = moser_chain(3, &traj, 1.5, 4).unwrap();
    let expected = [1.0, 0.841_47, 0.943_41, 1.020_5];
    for (level, want) in chain.levels.iter().zip(expected) {
        assert!(
            (level.ratio - want).abs() < 1e-4,
            "k = {}: {}",
            level.k,
            level.ratio
        );
    }
    assert!(chain.all_finite());
    assert!(chain.slopes_within_bound());
    assert!((chain.big_n - moser_n(3)).abs() < 1e-15);
}

#[test]
fn sobolev_left_side_of_constant_field() {
    let unit = SpaceTimeField::Separable {
        coeffs: vec![1.0],
        time: TimeProfile::Constant,
    };
    let n: f64 = 3.0;
    for t_final in [0.2, 0.5] {
        let m = build(WarpedProfile::perturbed_sphere(3, 0.2).unwrap(), 64);
        let traj = flow(&m, t_final, 1e-3);
        let y = 0.9 * traj.rho0();
        let res = check_parabolic_sobolev(&m, &traj, y, std::slice::from_ref(&unit));
        assert_eq!(res.rows.len(), 1);
        let lhs = res.rows[0].lhs;
        assert!((lhs - t_final.powf(n / (n + 2.0))).abs() < 1e-10, "{lhs}");
        let doubled = SpaceTimeField::Separable {
            coeffs: vec![2.0],
            time: TimeProfile::Constant,
        };
        let res2 = check_parabolic_sobolev(&m, &traj, y, &[doubled]);
        assert!((res2.rows[0].lhs - 4.0 * lhs).abs() < 1e-10);
        assert!((res2.rows[0].rhs - 4.0 * res.rows[0].rhs).abs() < 1e-9 * res.rows[0].rhs);
    }
}

#[test]
fn round_sphere_passes_every_monitor() {
    let cfg = ScenarioConfig::parse(
        "profile = sphere\nn = 3\ngrid.M = 64\nflow.T = 0.5\nflow.dt = 1e-3\n",
    )
    .unwrap();
    let report = run_scenario(&cfg, None).unwrap();
    assert!(report.passed());
    for m in &report.monitors {
        assert_ne!(m.verdict, Verdict::Fail, "{}", m.id);
    }
    assert!(report.monitors.iter().any(|m| m.verdict == Verdict::Pass));
}

#[test]
fn cone_tip_is_outside_the_monitors() {
    let m = build(WarpedProfile::cone(3, 0.8).unwrap(), 64);
    let traj = flow(&m, 0.01, 1e-5);
    assert_eq!(check_scal_lower(&m, &traj).verdict, Verdict::NotApplicable);
    assert_eq!(check_u_upper(&m, &traj).verdict, Verdict::NotApplicable);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cutoff_is_monotone(k in 1usize..8, t_final in 0.1f64..10.0, a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let (lo, hi) = (a.min(b) * t_final, a.max(b) * t_final);
        prop_assert!(cutoff(k, t_final, lo) <= cutoff(k, t_final, hi));
        prop_assert_eq!(cutoff(k, t_final, cutoff_time(k, t_final)), 1.0);
    }
}
