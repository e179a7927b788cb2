use super::monitors::{integrated_curvature, late_sup_abs_s};
use super::moser::moser_chain;
use super::{Hypotheses, MonitorResult, MonitorRow, Verdict};
use crate::flow::Trajectory;
use crate::geometry::DiscretizedManifold;

/// Allowed relative deviation between a run and its refined counterpart.
pub const REFINEMENT_BAND: f64 = 0.1;

/// Quantities whose boundedness is only known qualitatively and is therefore checked by
/// comparing a coarse and a refined run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RefinementQuantity {
    /// `inf u` over the whole run.
    InfU,
    /// `sup_{[T/2, T]} max |S|`.
    LateSupAbsS,
    /// `int_0^T (int |S|^{n^2/(2(n-2))} dVol_g)^{(n-2)/n} dt`.
    IntegratedCurvature,
    /// Ratio at one level of the Moser chain.
    MoserRatio { beta: f64, level: usize },
}

impl RefinementQuantity {
    pub fn id(&self) -> String {
        match self {
            RefinementQuantity::InfU => "u_lower_refinement".into(),
            RefinementQuantity::LateSupAbsS => "s_upper_refinement".into(),
            RefinementQuantity::IntegratedCurvature => "s_integral_refinement".into(),
            RefinementQuantity::MoserRatio { beta, level } => {
                format!("moser_refinement_b{beta}_k{level}")
            }
        }
    }

    pub fn evaluate(&self, manifold: &DiscretizedManifold, traj: &Trajectory) -> f64 {
        match *self {
            RefinementQuantity::InfU => traj
                .records
                .iter()
                .map(|r| r.min_u)
                .fold(f64::INFINITY, f64::min),
            RefinementQuantity::LateSupAbsS => late_sup_abs_s(traj),
            RefinementQuantity::IntegratedCurvature => integrated_curvature(manifold, traj),
            RefinementQuantity::MoserRatio { beta, level } => {
                moser_chain(manifold.dim(), traj, beta, level)
                    .map(|c| c.levels[level - 1].ratio)
                    .unwrap_or(f64::NAN)
            }
        }
    }

    fn applicable(&self, manifold: &DiscretizedManifold) -> Result<(), &'static str> {
        match Hypotheses::of(manifold).violated() {
            Some(reason) => Err(reason),
            None => Ok(()),
        }
    }
}

/// Ratio `fine / coarse` must lie in `[1 - band, 1 + band]`.
pub fn check_refinement(
    quantity: RefinementQuantity,
    coarse: (&DiscretizedManifold, &Trajectory),
    fine: (&DiscretizedManifold, &Trajectory),
) -> MonitorResult {
    let id = quantity.id();
    let t = coarse.1.t_final();
    if let Err(reason) = quantity.applicable(coarse.0) {
        return MonitorResult::not_applicable(&id, t, reason);
    }
    let a = quantity.evaluate(coarse.0, coarse.1);
    let b = quantity.evaluate(fine.0, fine.1);
    let ratio = b / a;
    let mut row = MonitorRow::compare(&id, t, (ratio - 1.0).abs(), REFINEMENT_BAND, 0.0, 0.0);
    if !ratio.is_finite() {
        row.verdict = Verdict::Fail;
    }
    MonitorResult::from_rows(
        &id,
        vec![row],
        format!("coarse {a:.6e}, fine {b:.6e}, ratio {ratio:.6}"),
    )
}

/// Worst margins of the refined run must not exceed the coarse ones by more than 10 % of their
/// magnitude. Margins closer than `1e-6` to each other count as equal.
pub fn check_margins_stable(coarse: &[MonitorResult], fine: &[MonitorResult]) -> MonitorResult {
    let mut rows = Vec::new();
    for c in coarse {
        let Some(f) = fine.iter().find(|f| f.id == c.id) else {
            continue;
        };
        if c.verdict == Verdict::NotApplicable || f.verdict == Verdict::NotApplicable {
            continue;
        }
        let (mc, mf) = (c.worst_margin(), f.worst_margin());
        if !mc.is_finite() || !mf.is_finite() {
            continue;
        }
        let mut row =
            MonitorRow::compare("margin_stability", 0.0, mf, mc, 0.0, 0.1 * mc.abs() + 1e-6);
        row.monitor_id = format!("margin_stability[{}]", c.id);
        rows.push(row);
    }
    MonitorResult::from_rows("margin_stability", rows, "worst margin, refined vs coarse")
}
