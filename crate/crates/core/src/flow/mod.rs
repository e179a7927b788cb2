//! Time integration of the normalized Yamabe flow
//! `du/dt = (n-1) u^{1-N} Delta_0 u + (n-2)/4 (rho u - S_0 u^{2-N})`.
//!
//! Each step is one tridiagonal solve: diffusion acts on the new iterate with its coefficient
//! frozen, the reaction `S_0 u^{2-N}` is split by sign so the positive part is absorbed into the
//! diagonal, and `rho` is frozen. The result is projected back to unit volume, and `S`, `rho`
//! are refreshed from the projected factor.

mod checkpoint;

pub use checkpoint::{checkpoint, config_hash, restore, Checkpoint, CheckpointError};

use thiserror::Error;

use crate::discretization::{Field, TridiagonalOperator};
use crate::geometry::DiscretizedManifold;
use crate::yamabe::{critical_exponent, volume_exponent, FlowState, YamabeError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FlowError {
    #[error(
        "step of size {dt} rejected: u = {value} at node {node} fell below the positivity floor"
    )]
    StepRejected { dt: f64, node: usize, value: f64 },
    #[error("non-finite conformal factor at node {node} (value {value}) at t = {t}")]
    NonFinite { node: usize, value: f64, t: f64 },
    #[error("time step fell below dt_min = {dt_min} at t = {t}")]
    DtUnderflow {
        t: f64,
        dt_min: f64,
        last: Box<FlowState>,
        step: usize,
    },
    #[error("invalid flow configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Yamabe(#[from] YamabeError),
    #[error(transparent)]
    Checkpoint(#[from] CheckpointError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowConfig {
    pub t_final: f64,
    pub cfl: f64,
    pub dt_init: f64,
    pub dt_min: f64,
    pub dt_max: f64,
    pub vol_tol: f64,
    pub positivity_floor: f64,
    /// Steps between checkpoints handed to the observer; 0 disables.
    pub checkpoint_every: usize,
    /// Steps between stored snapshots; the initial and final states are always stored.
    pub snapshot_every: usize,
}

impl Default for FlowConfig {
    fn default() -> Self {
        FlowConfig {
            t_final: 1.0,
            cfl: 0.5,
            dt_init: 1e-3,
            dt_min: 1e-9,
            dt_max: 1e-3,
            vol_tol: 1e-10,
            positivity_floor: 1e-12,
            checkpoint_every: 0,
            snapshot_every: 10,
        }
    }
}

impl FlowConfig {
    /// Fixed step `dt` up to `t_final`.
    pub fn fixed(t_final: f64, dt: f64) -> Self {
        FlowConfig {
            t_final,
            dt_init: dt,
            dt_max: dt,
            dt_min: (dt * 1e-6).min(1e-9),
            cfl: 1.0,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<(), FlowError> {
        let positive = [
            ("T_final", self.t_final),
            ("dt_init", self.dt_init),
            ("dt_min", self.dt_min),
            ("dt_max", self.dt_max),
            ("vol_tol", self.vol_tol),
            ("positivity_floor", self.positivity_floor),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(FlowError::InvalidConfig(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(FlowError::InvalidConfig(format!(
                "cfl must lie in (0, 1], got {}",
                self.cfl
            )));
        }
        if !(self.dt_min <= self.dt_init && self.dt_init <= self.dt_max) {
            return Err(FlowError::InvalidConfig(format!(
                "need dt_min <= dt_init <= dt_max, got {} <= {} <= {}",
                self.dt_min, self.dt_init, self.dt_max
            )));
        }
        Ok(())
    }
}

/// Scalars recorded after every accepted step (and once at the start).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord {
    pub step: usize,
    pub t: f64,
    pub dt: f64,
    pub rho: f64,
    pub vol: f64,
    pub min_u: f64,
    pub max_u: f64,
    pub min_s: f64,
    pub max_s: f64,
    pub s_minus_l2: f64,
    pub s_minus_linf: f64,
    /// `int (S - rho)^2 dVol_g`.
    pub energy: f64,
    /// `Vol - 1` before the projection.
    pub drift: f64,
    /// `int S dVol_g`, which equals `rho` up to rounding.
    pub rho_integral: f64,
}

impl StepRecord {
    pub fn of(state: &FlowState, step: usize, dt: f64, drift: f64) -> Self {
        StepRecord {
            step,
            t: state.t,
            dt,
            rho: state.rho,
            vol: state.volume(),
            min_u: state.u.min(),
            max_u: state.u.max(),
            min_s: state.s.min(),
            max_s: state.s.max(),
            s_minus_l2: state.s_minus_norm(2.0),
            s_minus_linf: state.s_minus_norm(f64::INFINITY),
            energy: state.curvature_energy(),
            drift,
            rho_integral: state
                .s
                .iter()
                .zip(&state.gvol_weights)
                .map(|(s, w)| s * w)
                .sum(),
        }
    }
}

/// Result of one accepted step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub state: FlowState,
    /// Volume minus one before projection.
    pub drift: f64,
}

/// Step-size controller position, enough to resume a run exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Controller {
    pub dt: f64,
    pub step: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub records: Vec<StepRecord>,
    pub snapshots: Vec<FlowState>,
    pub final_state: FlowState,
    pub controller: Controller,
    pub rejections: usize,
    /// Largest cell width of the grid, in the normalized metric.
    pub h: f64,
}

impl Trajectory {
    pub fn largest_dt(&self) -> f64 {
        self.records.iter().map(|r| r.dt).fold(0.0, f64::max)
    }

    pub fn t_final(&self) -> f64 {
        self.final_state.t
    }

    pub fn rho0(&self) -> f64 {
        self.records[0].rho
    }
}

/// One semi-implicit step of size `dt`, followed by volume projection.
pub fn step(
    manifold: &DiscretizedManifold,
    state: &FlowState,
    dt: f64,
    config: &FlowConfig,
) -> Result<StepOutcome, FlowError> {
    let n = manifold.dim();
    let nf = n as f64;
    let big_n = critical_exponent(n);
    let k = (nf - 2.0) / 4.0;
    let u = &state.u;
    let s0 = manifold.s0();
    let lap = TridiagonalOperator::laplacian(manifold);

    let len = u.len();
    let mut op = TridiagonalOperator {
        lower: vec![0.0; len],
        diag: vec![0.0; len],
        upper: vec![0.0; len],
    };
    let mut rhs = vec![0.0; len];
    for i in 0..len {
        let ui = u[i];
        let damp = ui.powf(1.0 - big_n);
        let a = (nf - 1.0) * damp;
        let s_plus = s0[i].max(0.0);
        let s_minus = (-s0[i]).max(0.0);
        op.lower[i] = -dt * a * lap.lower[i];
        op.upper[i] = -dt * a * lap.upper[i];
        op.diag[i] = 1.0 + dt * k * s_plus * damp - dt * a * lap.diag[i];
        rhs[i] = ui + dt * k * (state.rho * ui + s_minus * ui * damp);
    }
    let new_u = op
        .solve(&rhs)
        .map_err(|e| FlowError::Yamabe(YamabeError::Discretization(e)))?;
    if let Some(node) = new_u.iter().position(|v| !v.is_finite()) {
        return Err(FlowError::NonFinite {
            node,
            value: new_u[node],
            t: state.t + dt,
        });
    }
    if let Some(node) = new_u.iter().position(|&v| v <= config.positivity_floor) {
        return Err(FlowError::StepRejected {
            dt,
            node,
            value: new_u[node],
        });
    }
    let p = volume_exponent(n);
    let vol: f64 = new_u
        .iter()
        .zip(manifold.mu())
        .map(|(v, m)| m * v.powf(p))
        .sum();
    let state = renormalize_volume(manifold, Field::new(new_u), state.t + dt)?;
    Ok(StepOutcome {
        state,
        drift: vol - 1.0,
    })
}

/// Scales `u` by `Vol^{-(n-2)/(2n)}` and rebuilds the state at time `t`.
pub fn renormalize_volume(
    manifold: &DiscretizedManifold,
    u: Field,
    t: f64,
) -> Result<FlowState, FlowError> {
    let p = volume_exponent(manifold.dim());
    let vol: f64 = u
        .iter()
        .zip(manifold.mu())
        .map(|(v, m)| m * v.powf(p))
        .sum();
    let u = if vol == 1.0 {
        u
    } else {
        u.scale(vol.powf(-1.0 / p))
    };
    Ok(FlowState::new(manifold, u, t)?)
}

/// Upper bound on `dt` from the explicit reaction terms.
pub fn reaction_dt_cap(manifold: &DiscretizedManifold, state: &FlowState, cfl: f64) -> f64 {
    let n = manifold.dim();
    let big_n = critical_exponent(n);
    let k = (n as f64 - 2.0) / 4.0;
    let explicit = state
        .u
        .iter()
        .zip(manifold.s0())
        .map(|(u, s)| (-s).max(0.0) * u.powf(1.0 - big_n))
        .fold(0.0, f64::max);
    let rate = k * (state.rho.max(0.0) + explicit);
    if rate > 0.0 {
        cfl / rate
    } else {
        f64::INFINITY
    }
}

/// Event handed to the observer of [`run_from`].
pub enum FlowEvent<'a> {
    Snapshot(&'a FlowState),
    Checkpoint(&'a FlowState, Controller),
}

/// Integrates from `u = 1` at `t = 0` up to `config.t_final`.
pub fn run(manifold: &DiscretizedManifold, config: &FlowConfig) -> Result<Trajectory, FlowError> {
    let state = FlowState::initial(manifold);
    let ctrl = Controller {
        dt: config.dt_init,
        step: 0,
    };
    run_from(manifold, config, state, ctrl, &mut |_| {})
}

/// Integrates from an arbitrary state; the observer sees every snapshot and checkpoint.
pub fn run_from(
    manifold: &DiscretizedManifold,
    config: &FlowConfig,
    mut state: FlowState,
    mut ctrl: Controller,
    observer: &mut dyn FnMut(FlowEvent<'_>),
) -> Result<Trajectory, FlowError> {
    config.validate()?;
    let t_end = config.t_final;
    let mut records = vec![StepRecord::of(&state, ctrl.step, 0.0, state.volume() - 1.0)];
    let mut snapshots = vec![state.clone()];
    observer(FlowEvent::Snapshot(&state));
    let mut rejections = 0;

    while t_end - state.t > 1e-12 * t_end {
        let cap = reaction_dt_cap(manifold, &state, config.cfl);
        let dt = ctrl.dt.min(cap).min(t_end - state.t);
        match step(manifold, &state, dt, config) {
            Ok(out) => {
                state = out.state;
                ctrl.step += 1;
                if (state.volume() - 1.0).abs() > config.vol_tol {
                    return Err(FlowError::Yamabe(YamabeError::VolumeOutOfTolerance {
                        volume: state.volume(),
                        tol: config.vol_tol,
                    }));
                }
                let last = t_end - state.t <= 1e-12 * t_end;
                if last {
                    state.t = t_end;
                }
                records.push(StepRecord::of(&state, ctrl.step, dt, out.drift));
                if last
                    || (config.snapshot_every > 0
                        && ctrl.step.is_multiple_of(config.snapshot_every))
                {
                    snapshots.push(state.clone());
                    observer(FlowEvent::Snapshot(&state));
                }
                ctrl.dt = (ctrl.dt * 1.2).min(config.dt_max);
                if config.checkpoint_every > 0 && ctrl.step.is_multiple_of(config.checkpoint_every)
                {
                    observer(FlowEvent::Checkpoint(&state, ctrl));
                }
            }
            Err(FlowError::StepRejected { .. }) => {
                rejections += 1;
                ctrl.dt = dt * 0.5;
                if ctrl.dt < config.dt_min {
                    return Err(FlowError::DtUnderflow {
                        t: state.t,
                        dt_min: config.dt_min,
                        last: Box::new(state),
                        step: ctrl.step,
                    });
                }
            }
            Err(e) => return Err(e),
        }
    }
    Ok(Trajectory {
        records,
        snapshots,
        final_state: state,
        controller: ctrl,
        rejections,
        h: manifold.h_max(),
    })
}
