use super::{slack, Hypotheses, MonitorResult, MonitorRow};
use crate::discretization::{dirichlet_form, laplacian_unchecked};
use crate::flow::Trajectory;
use crate::geometry::DiscretizedManifold;
use crate::yamabe::{sobolev_constants_with, FlowState};

fn p_label(p: f64) -> String {
    if p.is_infinite() {
        "inf".into()
    } else if p.fract() == 0.0 {
        format!("{}", p as i64)
    } else {
        format!("{p}")
    }
}

fn abs_tol(traj: &Trajectory) -> f64 {
    1e-12 * (1.0 + traj.rho0().abs())
}

/// `||S_-||_{L^p(M,g)}(t) <= exp(t n rho(0) / (2p)) ||(S_0)_-||_{L^p(dmu)}`.
pub fn check_s_minus_decay(
    manifold: &DiscretizedManifold,
    traj: &Trajectory,
    p: f64,
) -> MonitorResult {
    let id = format!("s_minus_decay_p{}", p_label(p));
    if !(p >= 2.0) {
        return MonitorResult::not_applicable(&id, 0.0, format!("exponent p = {p} below 2"));
    }
    if let Some(reason) = Hypotheses::of(manifold).violated() {
        return MonitorResult::not_applicable(&id, 0.0, reason);
    }
    let n = manifold.dim() as f64;
    let rho0 = traj.rho0();
    let neg0: Vec<f64> = manifold.s0().iter().map(|s| (-s).max(0.0)).collect();
    let base = crate::discretization::lp_norm(&neg0, p, manifold.mu()).unwrap_or(f64::NAN);
    let slack = slack(traj);
    let tol = abs_tol(traj);
    let rows = traj
        .snapshots
        .iter()
        .map(|s| {
            let growth = if p.is_infinite() {
                1.0
            } else {
                (s.t * n * rho0 / (2.0 * p)).exp()
            };
            MonitorRow::compare(&id, s.t, s.s_minus_norm(p), growth * base, slack, tol)
        })
        .collect();
    MonitorResult::from_rows(&id, rows, format!("||(S0)_-||_Lp = {base:.6e}"))
}

/// `S >= min{0, inf S_0}`, and the rational lower bound when `inf S_0 > 0`.
pub fn check_scal_lower(manifold: &DiscretizedManifold, traj: &Trajectory) -> MonitorResult {
    if let Some(reason) = Hypotheses::of(manifold).violated() {
        return MonitorResult::not_applicable("scal_lower", 0.0, reason);
    }
    let s_min0 = manifold.s0().iter().copied().fold(f64::INFINITY, f64::min);
    let rho0 = traj.rho0();
    let floor = s_min0.min(0.0);
    let slack = slack(traj);
    let tol = abs_tol(traj);
    let mut rows = Vec::new();
    for s in &traj.snapshots {
        let smin = s.s.min();
        rows.push(MonitorRow::compare(
            "scal_lower",
            s.t,
            floor,
            smin,
            slack,
            tol,
        ));
        if s_min0 > 0.0 {
            let bound = rho0 * s_min0 / ((rho0 * s.t).exp() * (rho0 - s_min0) + s_min0);
            rows.push(MonitorRow::compare(
                "scal_lower_rational",
                s.t,
                bound,
                smin,
                slack,
                tol,
            ));
        }
    }
    MonitorResult::from_rows("scal_lower", rows, format!("inf S0 = {s_min0:.6e}"))
}

/// `max u(t) <= exp(C t)` with `C = (n-2)/4 (||(S_0)_-||_inf + rho(0))`.
pub fn check_u_upper(manifold: &DiscretizedManifold, traj: &Trajectory) -> MonitorResult {
    let hyp = Hypotheses::of(manifold);
    if let Some(reason) = hyp.violated() {
        return MonitorResult::not_applicable("u_upper", 0.0, reason);
    }
    let neg = hyp.s0_minus_linf.unwrap_or(0.0);
    let c = (manifold.dim() as f64 - 2.0) / 4.0 * (neg + traj.rho0());
    let slack = slack(traj);
    let rows = traj
        .snapshots
        .iter()
        .map(|s| MonitorRow::compare("u_upper", s.t, s.u.max(), (c * s.t).exp(), slack, 0.0))
        .collect();
    MonitorResult::from_rows("u_upper", rows, format!("C = {c:.6e}"))
}

/// Positivity of `u` and the supersolution property `(-Delta_0 + P) u >= 0` with
/// `P = (n-2)/(4(n-1)) (S_0 + (sup u)^{4/(n-2)} ||(S_0)_-||_inf)`.
///
/// Refinement stability of `inf u` is checked separately on a run pair.
pub fn check_u_lower(manifold: &DiscretizedManifold, traj: &Trajectory) -> MonitorResult {
    let mut rows: Vec<MonitorRow> = traj
        .snapshots
        .iter()
        .map(|s| MonitorRow::compare("u_lower_positive", s.t, 1e-12, s.u.min(), 0.0, 0.0))
        .collect();
    let n = manifold.dim() as f64;
    let hyp = Hypotheses::of(manifold);
    let mut note = format!(
        "inf u over run = {:.6e}",
        traj.records
            .iter()
            .map(|r| r.min_u)
            .fold(f64::INFINITY, f64::min)
    );
    match hyp.s0_minus_linf.filter(|_| hyp.violated().is_none()) {
        Some(neg) => {
            let sup_u = traj.records.iter().map(|r| r.max_u).fold(0.0, f64::max);
            let shift = sup_u.powf(4.0 / (n - 2.0)) * neg;
            let factor = (n - 2.0) / (4.0 * (n - 1.0));
            let slack = slack(traj);
            for s in &traj.snapshots {
                let lap = laplacian_unchecked(manifold, &s.u);
                let mut worst = f64::INFINITY;
                let mut scale: f64 = 0.0;
                for i in 0..s.u.len() {
                    let pu = factor * (manifold.s0()[i] + shift) * s.u[i];
                    worst = worst.min(-lap[i] + pu);
                    scale = scale.max(lap[i].abs() + pu.abs());
                }
                let tol = (1e-9 + slack) * scale;
                rows.push(MonitorRow::compare(
                    "u_lower_supersolution",
                    s.t,
                    0.0,
                    worst,
                    0.0,
                    tol,
                ));
            }
        }
        None => {
            rows.push(MonitorRow::not_applicable("u_lower_supersolution", 0.0));
            note.push_str("; supersolution check skipped: S0 outside the standing assumptions");
        }
    }
    MonitorResult::from_rows("u_lower", rows, note)
}

/// `||S_+||_{L^{n/2}(M,g)}(t) <= ||(S_0)_+||_{L^{n/2}(dmu)}`.
///
/// The `L^inf` bound on `[T/2, T]` and the integrated `L^{n^2/(2(n-2))}` bound are checked by
/// refinement on a run pair.
pub fn check_s_upper(manifold: &DiscretizedManifold, traj: &Trajectory) -> MonitorResult {
    let hyp = Hypotheses::of(manifold);
    if let Some(reason) = hyp.violated() {
        return MonitorResult::not_applicable("s_upper", 0.0, reason);
    }
    let p = manifold.dim() as f64 / 2.0;
    let pos0: Vec<f64> = manifold.s0().iter().map(|s| s.max(0.0)).collect();
    let base = crate::discretization::lp_norm(&pos0, p, manifold.mu()).unwrap_or(f64::NAN);
    let slack = slack(traj);
    let tol = abs_tol(traj);
    let rows = traj
        .snapshots
        .iter()
        .map(|s| {
            let pos: Vec<f64> = s.s.iter().map(|v| v.max(0.0)).collect();
            let lhs = crate::discretization::lp_norm(&pos, p, &s.gvol_weights).unwrap_or(f64::NAN);
            MonitorRow::compare("s_upper_ln2", s.t, lhs, base, slack, tol)
        })
        .collect();
    MonitorResult::from_rows("s_upper", rows, format!("||(S0)_+||_L(n/2) = {base:.6e}"))
}

/// Time dependence of a sampled space-time field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeProfile {
    Constant,
    Ramp,
    Smoothstep,
    Bump,
}

impl TimeProfile {
    fn eval(self, tau: f64) -> f64 {
        match self {
            TimeProfile::Constant => 1.0,
            TimeProfile::Ramp => tau,
            TimeProfile::Smoothstep => tau * tau * (3.0 - 2.0 * tau),
            TimeProfile::Bump => (std::f64::consts::PI * tau).sin(),
        }
    }
}

/// Field `f(x, t) = P(x / x_end) chi(t / T)` with a polynomial `P` (coefficients in ascending order),
/// or the conformal factor itself.
#[derive(Debug, Clone, PartialEq)]
pub enum SpaceTimeField {
    Separable { coeffs: Vec<f64>, time: TimeProfile },
    ConformalFactor,
}

impl SpaceTimeField {
    fn values(&self, manifold: &DiscretizedManifold, state: &FlowState, t_final: f64) -> Vec<f64> {
        match self {
            SpaceTimeField::ConformalFactor => state.u.to_vec(),
            SpaceTimeField::Separable { coeffs, time } => {
                let x_end = *manifold.faces().last().unwrap();
                let chi = time.eval(state.t / t_final);
                manifold
                    .nodes()
                    .iter()
                    .map(|x| {
                        let s = x / x_end;
                        chi * coeffs.iter().rev().fold(0.0, |acc, c| acc * s + c)
                    })
                    .collect()
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            SpaceTimeField::ConformalFactor => "u".into(),
            SpaceTimeField::Separable { coeffs, time } => format!("{coeffs:?}*{time:?}"),
        }
    }
}

/// Twenty polynomial-times-cutoff fields.
pub fn default_space_time_fields() -> Vec<SpaceTimeField> {
    let polys: [&[f64]; 5] = [
        &[1.0],
        &[0.0, 1.0],
        &[1.0, 0.0, -1.0],
        &[0.0, 4.0, -4.0],
        &[1.0, 1.0, -3.0, 2.0],
    ];
    let times = [
        TimeProfile::Constant,
        TimeProfile::Ramp,
        TimeProfile::Smoothstep,
        TimeProfile::Bump,
    ];
    polys
        .iter()
        .flat_map(|p| {
            times.iter().map(|&time| SpaceTimeField::Separable {
                coeffs: p.to_vec(),
                time,
            })
        })
        .collect()
}

/// `||f^2||_{L^{(n+2)/n}(M_T,g)} <= n/(n+2) (A(T) ||grad f||^2 + B(T) ||f||^2) + 2/(n+2) sup_t ||f(t)||^2`
/// for each field, with `A(T)`, `B(T)` built from `y_est` and the extrema of `u` over the run.
pub fn check_parabolic_sobolev(
    manifold: &DiscretizedManifold,
    traj: &Trajectory,
    y_est: f64,
    fields: &[SpaceTimeField],
) -> MonitorResult {
    let hyp = Hypotheses::of(manifold);
    let sup_u = traj.records.iter().map(|r| r.max_u).fold(0.0, f64::max);
    let inf_u = traj
        .records
        .iter()
        .map(|r| r.min_u)
        .fold(f64::INFINITY, f64::min);
    let consts = match sobolev_constants_with(manifold.dim(), y_est, hyp.s0_linf, sup_u, inf_u) {
        Ok(c) => c,
        Err(e) => return MonitorResult::not_applicable("parabolic_sobolev", 0.0, e.to_string()),
    };
    let Some(b_t) = consts.b_t else {
        return MonitorResult::not_applicable(
            "parabolic_sobolev",
            0.0,
            "B(T) unavailable: S0 unbounded",
        );
    };
    let a_t = consts.a_t;
    let n = manifold.dim() as f64;
    let t_final = traj.t_final();
    let slack = slack(traj);
    let times: Vec<f64> = traj.snapshots.iter().map(|s| s.t).collect();
    let mut rows = Vec::new();
    for field in fields {
        let vals: Vec<Vec<f64>> = traj
            .snapshots
            .iter()
            .map(|s| field.values(manifold, s, t_final))
            .collect();
        let q = 2.0 * (n + 2.0) / n;
        let lhs_series: Vec<f64> = traj
            .snapshots
            .iter()
            .zip(&vals)
            .map(|(s, f)| {
                s.gvol_weights
                    .iter()
                    .zip(f)
                    .map(|(w, v)| w * v.abs().powf(q))
                    .sum()
            })
            .collect();
        let lhs = super::interval_integral(&times, &lhs_series, 0.0).powf(n / (n + 2.0));
        let l2_series: Vec<f64> = traj
            .snapshots
            .iter()
            .zip(&vals)
            .map(|(s, f)| s.gvol_weights.iter().zip(f).map(|(w, v)| w * v * v).sum())
            .collect();
        let grad_series: Vec<f64> = traj
            .snapshots
            .iter()
            .zip(&vals)
            .map(|(s, f)| gradient_energy_g(manifold, &s.u, f))
            .collect();
        let l2 = super::interval_integral(&times, &l2_series, 0.0);
        let grad = super::interval_integral(&times, &grad_series, 0.0);
        let sup = l2_series.iter().copied().fold(0.0, f64::max);
        let rhs = n / (n + 2.0) * (a_t * grad + b_t * l2) + 2.0 / (n + 2.0) * sup;
        let mut row = MonitorRow::compare("parabolic_sobolev", t_final, lhs, rhs, slack, 0.0);
        row.monitor_id = format!("parabolic_sobolev[{}]", field.label());
        rows.push(row);
    }
    MonitorResult::from_rows(
        "parabolic_sobolev",
        rows,
        format!("A(T) = {a_t:.6e}, B(T) = {b_t:.6e}"),
    )
}

/// `int |grad f|_g^2 dVol_g = int u^2 |f'|^2 dmu`, with `u^2` averaged onto faces.
fn gradient_energy_g(manifold: &DiscretizedManifold, u: &[f64], f: &[f64]) -> f64 {
    manifold
        .kappa()
        .iter()
        .enumerate()
        .map(|(i, k)| {
            let u2 = 0.5 * (u[i] * u[i] + u[i + 1] * u[i + 1]);
            k * u2 * (f[i + 1] - f[i]).powi(2)
        })
        .sum()
}

/// Trend of `int (S - rho)^2 dVol_g` (five-snapshot moving average, non-increasing up to `1e-6`
/// of its initial value, or of the round-off level `(1e-8 rho(0))^2` when that is larger) and the gradient bound `int |grad u|^2 dmu <= (n+2)/4 (rho(0) + ||(S_0)_-||_inf)`.
pub fn check_energy_decay(manifold: &DiscretizedManifold, traj: &Trajectory) -> MonitorResult {
    let energies: Vec<f64> = traj
        .snapshots
        .iter()
        .map(|s| s.curvature_energy())
        .collect();
    let times: Vec<f64> = traj.snapshots.iter().map(|s| s.t).collect();
    let window = 5.min(energies.len());
    let smoothed: Vec<f64> = energies
        .windows(window)
        .map(|w| w.iter().sum::<f64>() / window as f64)
        .collect();
    let floor = (1e-8 * traj.rho0()).powi(2);
    let scale = energies
        .first()
        .copied()
        .unwrap_or(0.0)
        .max(floor)
        .max(f64::MIN_POSITIVE);
    let mut rows: Vec<MonitorRow> = smoothed
        .windows(2)
        .enumerate()
        .map(|(k, w)| {
            let mut row = MonitorRow::compare(
                "energy_trend",
                times[k + window],
                w[1],
                w[0],
                0.0,
                1e-6 * scale,
            );
            row.margin = (w[1] - w[0]) / scale;
            row
        })
        .collect();
    let hyp = Hypotheses::of(manifold);
    match hyp.s0_minus_linf.filter(|_| hyp.violated().is_none()) {
        Some(neg) => {
            let n = manifold.dim() as f64;
            let bound = (n + 2.0) / 4.0 * (traj.rho0() + neg);
            let slack = slack(traj);
            for s in &traj.snapshots {
                let grad = dirichlet_form(manifold, &s.u, &s.u);
                rows.push(MonitorRow::compare(
                    "energy_gradient_bound",
                    s.t,
                    grad,
                    bound,
                    slack,
                    0.0,
                ));
            }
        }
        None => rows.push(MonitorRow::not_applicable("energy_gradient_bound", 0.0)),
    }
    let last = energies.last().copied().unwrap_or(0.0);
    MonitorResult::from_rows(
        "energy_decay",
        rows,
        format!(
            "int (S-rho)^2 dVol_g: initial {:.6e}, final {last:.6e}, ratio {:.6e}",
            energies.first().copied().unwrap_or(0.0),
            last / scale
        ),
    )
}

/// `sup_{[T/2, T]} max |S|` over stored snapshots.
pub(crate) fn late_sup_abs_s(traj: &Trajectory) -> f64 {
    let half = 0.5 * traj.t_final();
    traj.snapshots
        .iter()
        .filter(|s| s.t >= half)
        .map(|s| s.s.max_abs())
        .fold(0.0, f64::max)
}

/// `int_0^T (int_M |S|^{n^2/(2(n-2))} dVol_g)^{(n-2)/n} dt`.
pub(crate) fn integrated_curvature(manifold: &DiscretizedManifold, traj: &Trajectory) -> f64 {
    let n = manifold.dim() as f64;
    let q = n * n / (2.0 * (n - 2.0));
    let times: Vec<f64> = traj.snapshots.iter().map(|s| s.t).collect();
    let series: Vec<f64> = traj
        .snapshots
        .iter()
        .map(|s| {
            let inner: f64 =
                s.s.iter()
                    .zip(&s.gvol_weights)
                    .map(|(v, w)| w * v.abs().powf(q))
                    .sum();
            inner.powf((n - 2.0) / n)
        })
        .collect();
    super::interval_integral(&times, &series, 0.0)
}
