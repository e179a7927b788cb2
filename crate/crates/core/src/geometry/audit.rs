use std::fmt;

use super::{DiscretizedManifold, Tip};

/// One verdict of the assumption audit.
#[derive(Debug, Clone, PartialEq)]
pub struct AuditCheck {
    pub id: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Standing assumptions of the flow analysis, evaluated on a discretized manifold.
#[derive(Debug, Clone, PartialEq)]
pub struct AuditReport {
    pub q: f64,
    pub checks: Vec<AuditCheck>,
    pub warnings: Vec<String>,
    /// Discrete `||S_0||_{L^q}`; finite on every grid even when the continuum norm diverges.
    pub s0_lq: f64,
    /// `||(S_0)_-||_{L^inf}` when it is bounded.
    pub s0_minus_linf: Option<f64>,
    /// `||S_0||_{L^inf}` when it is bounded.
    pub s0_linf: Option<f64>,
    /// Exponent `e` of `int_0 d^{e-1} dd` governing the `L^q` integral at a cone tip.
    pub divergence_exponent: Option<f64>,
}

impl AuditReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, id: &str) -> Option<&AuditCheck> {
        self.checks.iter().find(|c| c.id == id)
    }

    pub fn passed(&self, id: &str) -> bool {
        self.check(id).is_some_and(|c| c.passed)
    }
}

impl fmt::Display for AuditReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "assumption audit (q = {})", self.q)?;
        for c in &self.checks {
            let mark = if c.passed { "pass" } else { "FAIL" };
            writeln!(f, "  [{mark}] {:<16} {}", c.id, c.detail)?;
        }
        for w in &self.warnings {
            writeln!(f, "  warning: {w}")?;
        }
        Ok(())
    }
}

/// Integrability exponent `n^2 / (2(n-2))` used for the curvature hypothesis.
pub fn default_q(n: usize) -> f64 {
    let n = n as f64;
    n * n / (2.0 * (n - 2.0))
}

/// Annotates `manifold` with verdicts on finite volume, `S_0 in L^q`, and bounded `(S_0)_-`.
///
/// The `L^q` verdict combines the discrete norm with the tip asymptotics `S_0 ~ c / d^2`
/// against the weight `d^{n-1}`: the integral converges exactly when `2q < n`.
pub fn audit_assumptions(manifold: &DiscretizedManifold, q: f64) -> AuditReport {
    let profile = manifold.profile();
    let n = profile.dim() as f64;
    let mu = manifold.mu();
    let s0 = manifold.s0();
    let mut checks = Vec::new();
    let mut warnings = Vec::new();

    let vol = manifold.raw_volume();
    checks.push(AuditCheck {
        id: "volume_finite",
        passed: vol.is_finite() && vol > 0.0,
        detail: format!("Vol(g0) = {vol:.6e} before normalization"),
    });

    let s0_lq = s0
        .iter()
        .zip(mu)
        .map(|(s, m)| m * s.abs().powf(q))
        .sum::<f64>()
        .powf(1.0 / q);

    let tips = [("left", profile.tip_left()), ("right", profile.tip_right())];
    let singular: Vec<(&str, f64, f64)> = tips
        .iter()
        .filter_map(|&(side, tip)| match tip {
            Tip::Cone { slope } => Some((side, slope, profile.cone_coefficient(tip))),
            _ => None,
        })
        .filter(|&(_, _, c)| c != 0.0)
        .collect();

    let exponent = if singular.is_empty() {
        None
    } else {
        Some(n - 2.0 * q)
    };
    let lq_ok = exponent.map_or(s0_lq.is_finite(), |e| e > 0.0);
    let lq_detail = match exponent {
        Some(e) if e <= 0.0 => format!(
            "diverges at the cone tip: integrand ~ d^({}) with exponent n - 2q = {e} <= 0 (discrete value {s0_lq:.6e} grows under refinement)",
            e - 1.0
        ),
        Some(e) => format!("||S0||_Lq = {s0_lq:.6e}; tip integrand ~ d^({}) is integrable", e - 1.0),
        None => format!("||S0||_Lq = {s0_lq:.6e} (S0 bounded)"),
    };
    checks.push(AuditCheck {
        id: "s0_lq_finite",
        passed: lq_ok,
        detail: lq_detail,
    });

    let neg_unbounded: Vec<&str> = singular
        .iter()
        .filter(|&&(_, _, c)| c < 0.0)
        .map(|&(side, _, _)| side)
        .collect();
    let neg_max = s0.iter().fold(0.0f64, |m, s| m.max((-s).max(0.0)));
    let s0_minus_linf = neg_unbounded.is_empty().then_some(neg_max);
    checks.push(AuditCheck {
        id: "s0_minus_linf",
        passed: s0_minus_linf.is_some(),
        detail: match s0_minus_linf {
            Some(v) => format!("||(S0)_-||_Linf = {v:.6e}"),
            None => format!(
                "(S0)_- ~ c/d^2 with c < 0 at the {} tip",
                neg_unbounded.join(" and ")
            ),
        },
    });

    let s0_linf = singular
        .is_empty()
        .then(|| s0.iter().fold(0.0f64, |m, s| m.max(s.abs())));

    for &(side, slope, _) in &singular {
        if 2.0 * q >= n {
            warnings.push(format!(
                "cone tip ({side}, slope {slope}): 2q = {} >= n = {n}, so the L^q integral of S0 diverges under refinement",
                2.0 * q
            ));
        }
        warnings.push(format!(
            "cone tip ({side}, slope {slope}): S0 is unbounded, so the Sobolev constant B0 is unavailable"
        ));
    }

    AuditReport {
        q,
        checks,
        warnings,
        s0_lq,
        s0_minus_linf,
        s0_linf,
        divergence_exponent: exponent,
    }
}
