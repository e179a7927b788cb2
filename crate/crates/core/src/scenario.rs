//! End-to-end scenario: build the manifold, audit it, run the flow and every configured monitor.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::bounds::{
    check_energy_decay, check_margins_stable, check_parabolic_sobolev, check_refinement,
    check_s_minus_decay, check_s_upper, check_scal_lower, check_u_lower, check_u_upper,
    default_space_time_fields, moser_chain, BoundLedger, BoundsError, ChainReport, Hypotheses,
    MonitorResult, MonitorRow, RefinementQuantity, SpaceTimeField, Verdict,
};
use crate::config::{MonitorKind, ScenarioConfig};
use crate::flow::{checkpoint, run_from, Controller, FlowConfig, FlowError, FlowEvent, Trajectory};
use crate::geometry::{
    audit_assumptions, build_manifold, default_grid, default_q, AuditReport, DiscretizedManifold,
    GeometryError, RadialGrid, WarpedProfile,
};
use crate::output::{line_chart_svg, monitors_csv, timeseries_csv, Table, PLOT_SERIES};
use crate::yamabe::{
    estimate_yamabe_constant, sobolev_constants, FlowState, YamabeError, YamabeEstimate,
};

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error(transparent)]
    Yamabe(#[from] YamabeError),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
    #[error("writing {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

/// Builds the discretized manifold described by `cfg` at `m` cells.
pub fn build_at(cfg: &ScenarioConfig, m: usize) -> Result<DiscretizedManifold, GeometryError> {
    let profile = WarpedProfile::from_name(&cfg.profile, cfg.n)?;
    let grid: RadialGrid = default_grid(&profile, m, cfg.grid_gamma)?;
    build_manifold(profile, grid)
}

pub fn build(cfg: &ScenarioConfig) -> Result<DiscretizedManifold, GeometryError> {
    build_at(cfg, cfg.grid_m)
}

pub fn audit(cfg: &ScenarioConfig, manifold: &DiscretizedManifold) -> AuditReport {
    audit_assumptions(manifold, cfg.audit_q.unwrap_or_else(|| default_q(cfg.n)))
}

/// The flow configuration of the refined companion run: half the step, same snapshot times.
pub fn refined_flow(flow: &FlowConfig) -> FlowConfig {
    FlowConfig {
        dt_init: flow.dt_init / 2.0,
        dt_max: flow.dt_max / 2.0,
        dt_min: flow.dt_min / 2.0,
        snapshot_every: flow.snapshot_every * 2,
        checkpoint_every: 0,
        ..flow.clone()
    }
}

/// Everything a scenario run produces.
#[derive(Debug, Clone)]
pub struct ScenarioReport {
    pub audit: AuditReport,
    pub yamabe: YamabeEstimate,
    pub trajectory: Trajectory,
    pub monitors: Vec<MonitorResult>,
    pub moser: Option<ChainReport>,
    pub ledger: BoundLedger,
}

impl ScenarioReport {
    /// `true` unless some monitor failed. Non-applicable monitors do not count as failures.
    pub fn passed(&self) -> bool {
        self.monitors.iter().all(MonitorResult::passed)
    }
}

/// Runs the monitors selected in `cfg` over one trajectory.
pub fn evaluate_monitors(
    cfg: &ScenarioConfig,
    manifold: &DiscretizedManifold,
    traj: &Trajectory,
    y_est: f64,
) -> Vec<MonitorResult> {
    let mut out = Vec::new();
    for kind in &cfg.monitors {
        match kind {
            MonitorKind::SMinusDecay => {
                out.extend(
                    cfg.p_exponents
                        .iter()
                        .map(|&p| check_s_minus_decay(manifold, traj, p)),
                );
            }
            MonitorKind::ScalLower => out.push(check_scal_lower(manifold, traj)),
            MonitorKind::UUpper => out.push(check_u_upper(manifold, traj)),
            MonitorKind::ULower => out.push(check_u_lower(manifold, traj)),
            MonitorKind::SUpper => out.push(check_s_upper(manifold, traj)),
            MonitorKind::ParabolicSobolev => {
                let mut fields = default_space_time_fields();
                fields.push(SpaceTimeField::ConformalFactor);
                out.push(check_parabolic_sobolev(manifold, traj, y_est, &fields));
            }
            MonitorKind::EnergyDecay => out.push(check_energy_decay(manifold, traj)),
            MonitorKind::Moser => out.push(moser_monitor(cfg, manifold, traj)),
        }
    }
    out
}

/// Diagnostic Moser ledger as a monitor: every level ratio must be finite and every cutoff
/// slope within its bound.
pub fn moser_monitor(
    cfg: &ScenarioConfig,
    manifold: &DiscretizedManifold,
    traj: &Trajectory,
) -> MonitorResult {
    if let Some(reason) = Hypotheses::of(manifold).violated() {
        return MonitorResult::not_applicable("moser", 0.0, reason);
    }
    match moser_chain(manifold.dim(), traj, cfg.moser_beta, cfg.moser_levels) {
        Ok(chain) => {
            let rows = chain
                .levels
                .iter()
                .map(|l| {
                    let mut row =
                        MonitorRow::compare("moser", l.t_k, l.max_slope, l.slope_bound, 0.0, 0.0);
                    row.monitor_id = format!("moser[k={}]", l.k);
                    if !(l.ratio.is_finite() && l.ratio > 0.0) {
                        row.verdict = Verdict::Fail;
                    }
                    row
                })
                .collect();
            let ratios: Vec<String> = chain
                .levels
                .iter()
                .map(|l| format!("{:.4e}", l.ratio))
                .collect();
            MonitorResult::from_rows("moser", rows, format!("level ratios {}", ratios.join(" ")))
        }
        Err(e) => MonitorResult::not_applicable("moser", 0.0, e.to_string()),
    }
}

fn run_flow(
    manifold: &DiscretizedManifold,
    flow: &FlowConfig,
    checkpoint_dir: Option<&Path>,
) -> Result<Trajectory, ScenarioError> {
    let mut io_err: Option<ScenarioError> = None;
    let ctrl = Controller {
        dt: flow.dt_init,
        step: 0,
    };
    let mut observer = |ev: FlowEvent<'_>| {
        if let (FlowEvent::Checkpoint(state, ctrl), Some(dir), None) =
            (ev, checkpoint_dir, io_err.as_ref())
        {
            let path = dir.join(format!("checkpoint_{:06}.txt", ctrl.step));
            if let Err(e) = checkpoint(manifold, flow, state, ctrl, &path) {
                io_err = Some(ScenarioError::Flow(e.into()));
            }
        }
    };
    let traj = run_from(
        manifold,
        flow,
        FlowState::initial(manifold),
        ctrl,
        &mut observer,
    )?;
    match io_err {
        Some(e) => Err(e),
        None => Ok(traj),
    }
}

/// Builds, audits and runs a scenario, then evaluates every configured monitor.
///
/// Checkpoints are written to `checkpoint_dir` when the flow configuration asks for them.
pub fn run_scenario(
    cfg: &ScenarioConfig,
    checkpoint_dir: Option<&Path>,
) -> Result<ScenarioReport, ScenarioError> {
    let manifold = build(cfg)?;
    let audit = audit(cfg, &manifold);
    let yamabe = estimate_yamabe_constant(&manifold, &cfg.yamabe)?;
    let traj = run_flow(&manifold, &cfg.flow, checkpoint_dir)?;
    let mut monitors = evaluate_monitors(cfg, &manifold, &traj, yamabe.value);

    if cfg.refinement {
        let fine_m = build_at(cfg, 2 * cfg.grid_m)?;
        let fine_traj = run_flow(&fine_m, &refined_flow(&cfg.flow), None)?;
        let fine_y = estimate_yamabe_constant(&fine_m, &cfg.yamabe)?;
        let mut quantities = vec![
            RefinementQuantity::InfU,
            RefinementQuantity::LateSupAbsS,
            RefinementQuantity::IntegratedCurvature,
        ];
        if cfg.monitors.contains(&MonitorKind::Moser) {
            quantities.extend(
                (1..=cfg.moser_levels).map(|level| RefinementQuantity::MoserRatio {
                    beta: cfg.moser_beta,
                    level,
                }),
            );
        }
        let refinement: Vec<MonitorResult> = quantities
            .into_iter()
            .map(|q| check_refinement(q, (&manifold, &traj), (&fine_m, &fine_traj)))
            .collect();
        let fine_monitors = evaluate_monitors(cfg, &fine_m, &fine_traj, fine_y.value);
        let stability = check_margins_stable(&monitors, &fine_monitors);
        monitors.extend(refinement);
        monitors.push(stability);
    }

    let moser = if cfg.monitors.contains(&MonitorKind::Moser) {
        moser_chain(manifold.dim(), &traj, cfg.moser_beta, cfg.moser_levels).ok()
    } else {
        None
    };
    let sup_u = traj.records.iter().map(|r| r.max_u).fold(0.0, f64::max);
    let inf_u = traj
        .records
        .iter()
        .map(|r| r.min_u)
        .fold(f64::INFINITY, f64::min);
    let sobolev = sobolev_constants(&manifold, yamabe.value, sup_u, inf_u).ok();
    let mut ledger = BoundLedger::new(&manifold, &traj, sobolev);
    for m in &monitors {
        ledger.record(m);
    }
    Ok(ScenarioReport {
        audit,
        yamabe,
        trajectory: traj,
        monitors,
        moser,
        ledger,
    })
}

fn write(path: PathBuf, contents: &str) -> Result<(), ScenarioError> {
    fs::write(&path, contents).map_err(|source| ScenarioError::Io { path, source })
}

/// Writes `timeseries.csv`, `monitors.csv`, `ledger.txt` and optionally `plots/*.svg`.
pub fn write_outputs(
    report: &ScenarioReport,
    dir: &Path,
    plots: bool,
) -> Result<(), ScenarioError> {
    fs::create_dir_all(dir).map_err(|source| ScenarioError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let series = timeseries_csv(&report.trajectory.records);
    write(dir.join("timeseries.csv"), &series)?;
    write(dir.join("monitors.csv"), &monitors_csv(&report.monitors))?;
    let mut ledger = report.audit.to_string();
    ledger.push_str(&format!(
        "Y_est = {:.17e} ({} iterations)\n\n",
        report.yamabe.value, report.yamabe.iterations
    ));
    ledger.push_str(&report.ledger.render());
    write(dir.join("ledger.txt"), &ledger)?;
    if plots {
        let table = Table::parse(&series).expect("freshly written time series parses");
        write_plots(&table, &dir.join("plots"))?;
    }
    Ok(())
}

/// One SVG per plotted series of a parsed time series.
pub fn write_plots(table: &Table, dir: &Path) -> Result<Vec<PathBuf>, ScenarioError> {
    let t = table.column("t").map_err(|e| ScenarioError::Io {
        path: dir.to_path_buf(),
        source: io::Error::new(io::ErrorKind::InvalidData, e),
    })?;
    let mut columns = Vec::new();
    for name in PLOT_SERIES {
        let ys = table.column(name).map_err(|e| ScenarioError::Io {
            path: dir.to_path_buf(),
            source: io::Error::new(io::ErrorKind::InvalidData, e),
        })?;
        columns.push((name, ys));
    }
    fs::create_dir_all(dir).map_err(|source| ScenarioError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut written = Vec::new();
    for (name, ys) in columns {
        let path = dir.join(format!("{name}.svg"));
        write(path.clone(), &line_chart_svg(name, "t", &t, &ys))?;
        written.push(path);
    }
    Ok(written)
}
