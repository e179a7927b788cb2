//! A-posteriori monitors for the bounds that hold along the normalized Yamabe flow.
//!
//! Explicit inequalities are checked with the multiplicative slack `1 + 10 h^2 + 10 dt`.
//! Bounds whose constants are only known to exist are checked structurally, through
//! refinement stability between a run and its `(2M, dt/2)` counterpart.

mod ledger;
mod monitors;
mod moser;
mod refinement;
mod spacetime;

pub use ledger::BoundLedger;
pub use monitors::{
    check_energy_decay, check_parabolic_sobolev, check_s_minus_decay, check_s_upper,
    check_scal_lower, check_u_lower, check_u_upper, default_space_time_fields, SpaceTimeField,
    TimeProfile,
};
pub use moser::{
    cutoff, cutoff_slope, cutoff_time, moser_chain, moser_exponent, moser_n, ChainLevel,
    ChainReport,
};
pub use refinement::{check_margins_stable, check_refinement, RefinementQuantity, REFINEMENT_BAND};
pub use spacetime::{interval_integral, space_time_norm};

use std::fmt;

use thiserror::Error;

use crate::flow::Trajectory;
use crate::geometry::{audit_assumptions, default_q, DiscretizedManifold};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundsError {
    #[error("Moser chain needs beta > 1, got {0}")]
    BetaTooSmall(f64),
    #[error("Moser chain depth must lie in 1..=8, got {0}")]
    ChainDepth(usize),
    #[error("trajectory has no snapshots")]
    EmptyTrajectory,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    NotApplicable,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::NotApplicable => "not_applicable",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One evaluation of an inequality `lhs <= rhs`.
///
/// `margin` is the relative excess `(lhs - rhs) / |rhs|`; negative values mean headroom.
#[derive(Debug, Clone, PartialEq)]
pub struct MonitorRow {
    pub monitor_id: String,
    pub t: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub verdict: Verdict,
}

impl MonitorRow {
    /// Passes when `lhs <= rhs + slack * max(|lhs|, |rhs|) + abs_tol`.
    pub fn compare(id: &str, t: f64, lhs: f64, rhs: f64, slack: f64, abs_tol: f64) -> Self {
        let scale = lhs.abs().max(rhs.abs());
        let ok = lhs.is_finite() && rhs.is_finite() && lhs <= rhs + slack * scale + abs_tol;
        MonitorRow {
            monitor_id: id.to_string(),
            t,
            lhs,
            rhs,
            margin: relative_margin(lhs, rhs),
            verdict: if ok { Verdict::Pass } else { Verdict::Fail },
        }
    }

    pub fn not_applicable(id: &str, t: f64) -> Self {
        MonitorRow {
            monitor_id: id.to_string(),
            t,
            lhs: f64::NAN,
            rhs: f64::NAN,
            margin: f64::NAN,
            verdict: Verdict::NotApplicable,
        }
    }

    pub fn csv_header() -> &'static str {
        "monitor_id,t,lhs,rhs,margin,verdict"
    }

    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.monitor_id,
            crate::output::fmt17(self.t),
            crate::output::fmt17(self.lhs),
            crate::output::fmt17(self.rhs),
            crate::output::fmt17(self.margin),
            self.verdict
        )
    }
}

pub fn relative_margin(lhs: f64, rhs: f64) -> f64 {
    let d = lhs - rhs;
    if d == 0.0 {
        0.0
    } else {
        d / rhs.abs().max(f64::MIN_POSITIVE)
    }
}

/// Outcome of one monitor over a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct MonitorResult {
    pub id: String,
    pub verdict: Verdict,
    pub rows: Vec<MonitorRow>,
    pub note: String,
}

impl MonitorResult {
    pub fn from_rows(id: &str, rows: Vec<MonitorRow>, note: impl Into<String>) -> Self {
        let verdict = if rows.iter().any(|r| r.verdict == Verdict::Fail) {
            Verdict::Fail
        } else if !rows.is_empty() && rows.iter().all(|r| r.verdict == Verdict::NotApplicable) {
            Verdict::NotApplicable
        } else {
            Verdict::Pass
        };
        MonitorResult {
            id: id.to_string(),
            verdict,
            rows,
            note: note.into(),
        }
    }

    pub fn not_applicable(id: &str, t: f64, reason: impl Into<String>) -> Self {
        MonitorResult {
            id: id.to_string(),
            verdict: Verdict::NotApplicable,
            rows: vec![MonitorRow::not_applicable(id, t)],
            note: reason.into(),
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict != Verdict::Fail
    }

    /// Largest relative excess over all rows, ignoring non-applicable ones.
    pub fn worst_margin(&self) -> f64 {
        self.rows
            .iter()
            .filter(|r| r.verdict != Verdict::NotApplicable)
            .map(|r| r.margin)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// `10 h^2 + 10 dt` for the trajectory's grid and largest step.
pub fn slack(traj: &Trajectory) -> f64 {
    10.0 * traj.h * traj.h + 10.0 * traj.largest_dt()
}

/// Which standing hypotheses hold for a manifold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hypotheses {
    pub s0_minus_linf: Option<f64>,
    pub s0_linf: Option<f64>,
    pub s0_lq_finite: bool,
}

impl Hypotheses {
    pub fn of(manifold: &DiscretizedManifold) -> Self {
        let audit = audit_assumptions(manifold, default_q(manifold.dim()));
        Hypotheses {
            s0_minus_linf: audit.s0_minus_linf,
            s0_linf: audit.s0_linf,
            s0_lq_finite: audit.passed("s0_lq_finite"),
        }
    }

    /// Reason the standing assumptions fail, if they do.
    ///
    /// The flow bounds are stated for bounded initial curvature, so a manifold whose `S_0`
    /// blows up at a tip is outside their scope even when `(S_0)_-` is bounded.
    pub fn violated(&self) -> Option<&'static str> {
        if self.s0_minus_linf.is_none() {
            Some("(S0)_- is unbounded near a cone tip")
        } else if self.s0_linf.is_none() {
            Some("S0 is unbounded near a cone tip")
        } else if !self.s0_lq_finite {
            Some("S0 is not in L^{n^2/(2(n-2))}")
        } else {
            None
        }
    }
}
