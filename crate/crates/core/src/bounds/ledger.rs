use std::fmt::Write as _;

use super::{MonitorResult, MonitorRow, Verdict};
use crate::discretization::lp_norm;
use crate::flow::Trajectory;
use crate::geometry::{default_q, DiscretizedManifold};
use crate::yamabe::SobolevConstants;

/// Constants of a run and every monitor violation.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundLedger {
    pub rho0: f64,
    /// `(p, ||(S_0)_-||_{L^p(dmu)})`
    pub s0_minus_lp: Vec<(f64, f64)>,
    pub s0_inf: f64,
    /// `||S_0||_{L^{n^2/(2(n-2))}}` on this grid.
    pub s0_lq: f64,
    pub sup_u: f64,
    pub inf_u: f64,
    pub a_t: Option<f64>,
    pub b_t: Option<f64>,
    pub violations: Vec<MonitorRow>,
    pub verdicts: Vec<(String, Verdict, String)>,
}

impl BoundLedger {
    pub fn new(
        manifold: &DiscretizedManifold,
        traj: &Trajectory,
        sobolev: Option<SobolevConstants>,
    ) -> Self {
        let s0 = manifold.s0();
        let mu = manifold.mu();
        let neg: Vec<f64> = s0.iter().map(|s| (-s).max(0.0)).collect();
        let s0_minus_lp = [2.0, 4.0, 8.0, f64::INFINITY]
            .iter()
            .map(|&p| (p, lp_norm(&neg, p, mu).unwrap_or(f64::NAN)))
            .collect();
        BoundLedger {
            rho0: traj.rho0(),
            s0_minus_lp,
            s0_inf: s0.iter().copied().fold(f64::INFINITY, f64::min),
            s0_lq: lp_norm(s0, default_q(manifold.dim()), mu).unwrap_or(f64::NAN),
            sup_u: traj.records.iter().map(|r| r.max_u).fold(0.0, f64::max),
            inf_u: traj
                .records
                .iter()
                .map(|r| r.min_u)
                .fold(f64::INFINITY, f64::min),
            a_t: sobolev.map(|s| s.a_t),
            b_t: sobolev.and_then(|s| s.b_t),
            violations: Vec::new(),
            verdicts: Vec::new(),
        }
    }

    pub fn record(&mut self, result: &MonitorResult) {
        self.violations.extend(
            result
                .rows
                .iter()
                .filter(|r| r.verdict == Verdict::Fail)
                .cloned(),
        );
        self.verdicts
            .push((result.id.clone(), result.verdict, result.note.clone()));
    }

    pub fn all_passed(&self) -> bool {
        self.verdicts.iter().all(|(_, v, _)| *v != Verdict::Fail)
    }

    pub fn render(&self) -> String {
        let opt = |v: Option<f64>| v.map_or("unavailable".to_string(), |x| format!("{x:.17e}"));
        let mut out = String::new();
        let _ = writeln!(out, "rho0 = {:.17e}", self.rho0);
        for (p, v) in &self.s0_minus_lp {
            let _ = writeln!(
                out,
                "s0_minus_L{} = {v:.17e}",
                if p.is_infinite() {
                    "inf".into()
                } else {
                    p.to_string()
                }
            );
        }
        let _ = writeln!(out, "s0_inf = {:.17e}", self.s0_inf);
        let _ = writeln!(out, "s0_lq = {:.17e}", self.s0_lq);
        let _ = writeln!(out, "sup_u = {:.17e}", self.sup_u);
        let _ = writeln!(out, "inf_u = {:.17e}", self.inf_u);
        let _ = writeln!(out, "A_T = {}", opt(self.a_t));
        let _ = writeln!(out, "B_T = {}", opt(self.b_t));
        let _ = writeln!(out);
        for (id, v, note) in &self.verdicts {
            let _ = writeln!(out, "{id:<28} {v:<15} {note}");
        }
        let _ = writeln!(out);
        let _ = writeln!(out, "violations = {}", self.violations.len());
        for r in &self.violations {
            let _ = writeln!(out, "{}", r.csv_line());
        }
        out
    }
}
