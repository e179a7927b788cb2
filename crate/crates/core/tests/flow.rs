use yflow::discretization::Field;
use yflow::flow::{
    checkpoint, renormalize_volume, restore, run, run_from, step, Controller, FlowConfig,
    FlowError, FlowEvent,
};
use yflow::geometry::{build_manifold, default_grid, DiscretizedManifold, WarpedProfile};
use yflow::yamabe::FlowState;

fn build(profile: WarpedProfile, m: usize) -> DiscretizedManifold {
    let grid = default_grid(&profile, m, None).unwrap();
    build_manifold(profile, grid).unwrap()
}

fn bumped_sphere_state(m: &DiscretizedManifold) -> FlowState {
    let c = m.length_scale();
    renormalize_volume(m, Field::from_fn(m, |x| 1.0 + 0.2 * (x / c).cos()), 0.0).unwrap()
}

fn start(cfg: &FlowConfig) -> Controller {
    Controller {
        dt: cfg.dt_init,
        step: 0,
    }
}

/// The quotient is flat along conformal transformations of the round sphere, so a `cos`
/// bump flows to a round metric that is not `u = 1`: `rho` tends to `S0` while `u` keeps a
/// fixed non-constant profile.
#[test]
fn conformal_bump_on_round_sphere_flows_to_a_round_metric() {
    let mut gaps = Vec::new();
    let mut spreads = Vec::new();
    for m_cells in [64, 128, 256] {
        let m = build(WarpedProfile::sphere(3).unwrap(), m_cells);
        let cfg = FlowConfig::fixed(3.0, 1e-3);
        let traj = run_from(&m, &cfg, bumped_sphere_state(&m), start(&cfg), &mut |_| {}).unwrap();
        for w in traj.records.windows(2) {
            assert!(w[1].rho <= w[0].rho + 1e-8 * (1.0 + w[0].rho.abs()));
        }
        let s0 = m.s0()[0];
        assert!(traj.rho0() > s0);
        gaps.push((traj.records.last().unwrap().rho - s0).abs() / s0);
        spreads.push(traj.final_state.u.max() / traj.final_state.u.min());
    }
    assert!(gaps[2] < 2e-6, "{gaps:?}");
    for w in gaps.windows(2) {
        let ratio = w[0] / w[1];
        assert!((3.0..=6.0).contains(&ratio), "{gaps:?}");
    }
    assert!(spreads.iter().all(|&s| s > 1.3), "{spreads:?}");
    assert!(
        (spreads[2] - spreads[1]).abs() < (spreads[1] - spreads[0]).abs(),
        "{spreads:?}"
    );
}

#[test]
fn step_size_grows_geometrically_up_to_the_cap() {
    let m = build(WarpedProfile::perturbed_sphere(3, 0.1).unwrap(), 64);
    let cfg = FlowConfig {
        t_final: 0.05,
        dt_init: 1e-5,
        dt_max: 1e-3,
        cfl: 1.0,
        ..FlowConfig::default()
    };
    let traj = run(&m, &cfg).unwrap();
    let dts: Vec<f64> = traj.records[1..traj.records.len() - 1]
        .iter()
        .map(|r| r.dt)
        .collect();
    assert!((dts[0] - 1e-5).abs() < 1e-18);
    for w in dts.windows(2) {
        let expected = (w[0] * 1.2).min(1e-3);
        assert!((w[1] - expected).abs() <= 1e-15, "{w:?}");
    }
    assert_eq!(*dts.last().unwrap(), 1e-3);
    assert!((traj.t_final() - 0.05).abs() < 1e-15);
}

#[test]
fn restoring_then_stepping_equals_stepping() {
    let m = build(WarpedProfile::perturbed_sphere(3, 0.3).unwrap(), 64);
    let cfg = FlowConfig::fixed(0.1, 1e-3);
    let state = step(&m, &FlowState::initial(&m), 1e-3, &cfg).unwrap().state;
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("state.ckpt");
    let ctrl = Controller { dt: 1e-3, step: 1 };
    checkpoint(&m, &cfg, &state, ctrl, &path).unwrap();
    let (restored, restored_ctrl) = restore(&m, &cfg, &path).unwrap();
    assert_eq!(restored_ctrl, ctrl);
    let a = step(&m, &state, 1e-3, &cfg).unwrap();
    let b = step(&m, &restored, 1e-3, &cfg).unwrap();
    assert_eq!(a, b);
}

#[test]
fn checkpoint_from_another_setup_is_refused() {
    let profile = WarpedProfile::perturbed_sphere(3, 0.3).unwrap();
    let m = build(profile.clone(), 64);
    let other_grid = build(profile, 96);
    let cfg = FlowConfig::fixed(0.1, 1e-3);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("state.ckpt");
    let mut written = false;
    let cp_cfg = FlowConfig {
        checkpoint_every: 5,
        ..cfg.clone()
    };
    run_from(
        &m,
        &cp_cfg,
        FlowState::initial(&m),
        start(&cp_cfg),
        &mut |ev| {
            if let FlowEvent::Checkpoint(s, c) = ev {
                if !written {
                    checkpoint(&m, &cp_cfg, s, c, &path).unwrap();
                    written = true;
                }
            }
        },
    )
    .unwrap();
    assert!(written);
    assert!(restore(&other_grid, &cp_cfg, &path).is_err());
    let other_step = FlowConfig {
        dt_init: 5e-4,
        dt_max: 5e-4,
        ..cp_cfg.clone()
    };
    assert!(restore(&m, &other_step, &path).is_err());
    // extending the horizon is allowed
    let longer = FlowConfig {
        t_final: 0.2,
        ..cp_cfg.clone()
    };
    assert!(restore(&m, &longer, &path).is_ok());
}

#[test]
fn persistent_rejection_aborts_with_last_state() {
    let m = build(WarpedProfile::sphere(3).unwrap(), 32);
    let cfg = FlowConfig {
        positivity_floor: 2.0,
        dt_min: 1e-6,
        ..FlowConfig::fixed(0.1, 1e-3)
    };
    match run(&m, &cfg) {
        Err(FlowError::DtUnderflow { t, step, .. }) => {
            assert_eq!(t, 0.0);
            assert_eq!(step, 0);
        }
        other => panic!("expected an underflow, got {other:?}"),
    }
}

#[test]
fn every_accepted_step_has_unit_volume() {
    let m = build(WarpedProfile::capped_cone(4, 0.9, 1.0).unwrap(), 96);
    let traj = run(&m, &FlowConfig::fixed(0.2, 5e-4)).unwrap();
    for r in &traj.records {
        assert!((r.vol - 1.0).abs() <= 1e-12, "{}", r.vol);
        assert!((r.rho - r.rho_integral).abs() <= 1e-8 * r.rho.abs());
    }
}
