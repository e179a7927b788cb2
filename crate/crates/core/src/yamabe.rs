//! Scalar curvature of `g = u^{4/(n-2)} g_0`, the average curvature, the Yamabe quotient and a
//! descent estimator for the Yamabe constant restricted to rotationally symmetric functions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::discretization::{
    conformal_constant, dirichlet_form, laplacian_unchecked, DiscretizationError, Field,
    TridiagonalOperator,
};
use crate::geometry::DiscretizedManifold;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum YamabeError {
    #[error("conformal factor is not positive at node {node} (u = {value})")]
    NonPositive { node: usize, value: f64 },
    #[error("evolving volume is {volume}, outside 1 +- {tol}; renormalize the volume first")]
    VolumeOutOfTolerance { volume: f64, tol: f64 },
    #[error("test function has zero norm")]
    ZeroNorm,
    #[error("positive Yamabe constant assumption violated (Y = {0})")]
    NonPositiveYamabe(f64),
    #[error(transparent)]
    Discretization(#[from] DiscretizationError),
}

/// Default tolerance on `|Vol(g) - 1|`.
pub const VOLUME_TOLERANCE: f64 = 1e-10;

/// `N = (n+2)/(n-2)`.
pub fn critical_exponent(n: usize) -> f64 {
    let n = n as f64;
    (n + 2.0) / (n - 2.0)
}

/// `2n/(n-2)`, the exponent of `u` in the volume form.
pub fn volume_exponent(n: usize) -> f64 {
    let n = n as f64;
    2.0 * n / (n - 2.0)
}

fn check_positive(u: &[f64]) -> Result<(), YamabeError> {
    match u.iter().position(|&v| !(v > 0.0)) {
        Some(node) => Err(YamabeError::NonPositive {
            node,
            value: u[node],
        }),
        None => Ok(()),
    }
}

/// `L_0 u` without alignment or positivity checks.
pub(crate) fn conformal_laplacian_raw(manifold: &DiscretizedManifold, u: &[f64]) -> Vec<f64> {
    let cn = conformal_constant(manifold.dim());
    let lap = laplacian_unchecked(manifold, u);
    u.iter()
        .zip(manifold.s0())
        .zip(lap.iter())
        .map(|((v, s), l)| s * v - cn * l)
        .collect()
}

/// `S = u^{-N} L_0 u`.
pub fn scalar_curvature_flow(
    manifold: &DiscretizedManifold,
    u: &Field,
) -> Result<Field, YamabeError> {
    u.check_aligned(manifold)?;
    check_positive(u)?;
    let big_n = critical_exponent(manifold.dim());
    let l0 = conformal_laplacian_raw(manifold, u);
    Ok(u.iter().zip(&l0).map(|(v, l)| l * v.powf(-big_n)).collect())
}

/// Weights of `dVol_g = u^{2n/(n-2)} dmu`.
pub fn gvol_weights(manifold: &DiscretizedManifold, u: &[f64]) -> Vec<f64> {
    let p = volume_exponent(manifold.dim());
    u.iter()
        .zip(manifold.mu())
        .map(|(v, m)| m * v.powf(p))
        .collect()
}

/// `int (4(n-1)/(n-2)) |grad v|^2 + S_0 v^2 dmu`.
pub fn energy(manifold: &DiscretizedManifold, v: &[f64]) -> f64 {
    let cn = conformal_constant(manifold.dim());
    let potential: f64 = v
        .iter()
        .zip(manifold.s0())
        .zip(manifold.mu())
        .map(|((x, s), m)| m * s * x * x)
        .sum();
    cn * dirichlet_form(manifold, v, v) + potential
}

/// Both expressions of the average scalar curvature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AverageScalar {
    /// Dirichlet-form expression `int c_n |grad u|^2 + S_0 u^2 dmu`.
    pub rho: f64,
    /// `int S dVol_g`.
    pub integral: f64,
    pub volume: f64,
}

impl AverageScalar {
    pub fn discrepancy(&self) -> f64 {
        (self.rho - self.integral).abs()
    }
}

/// Average scalar curvature of `u^{4/(n-2)} g_0`, with both forms recorded.
pub fn average_scalar_forms(
    manifold: &DiscretizedManifold,
    u: &Field,
    vol_tol: f64,
) -> Result<AverageScalar, YamabeError> {
    let s = scalar_curvature_flow(manifold, u)?;
    let w = gvol_weights(manifold, u);
    let volume: f64 = w.iter().sum();
    if (volume - 1.0).abs() > vol_tol {
        return Err(YamabeError::VolumeOutOfTolerance {
            volume,
            tol: vol_tol,
        });
    }
    Ok(AverageScalar {
        rho: energy(manifold, u),
        integral: s.iter().zip(&w).map(|(a, b)| a * b).sum(),
        volume,
    })
}

/// `rho = int c_n |grad u|^2 + S_0 u^2 dmu` for a unit-volume conformal factor.
pub fn average_scalar(manifold: &DiscretizedManifold, u: &Field) -> Result<f64, YamabeError> {
    average_scalar_forms(manifold, u, VOLUME_TOLERANCE).map(|a| a.rho)
}

/// Conformal factor with its cached curvature and evolving measure.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowState {
    pub t: f64,
    pub u: Field,
    pub s: Field,
    pub rho: f64,
    pub gvol_weights: Vec<f64>,
}

impl FlowState {
    /// Builds the state and its caches; `rho` uses the Dirichlet form.
    pub fn new(manifold: &DiscretizedManifold, u: Field, t: f64) -> Result<Self, YamabeError> {
        let s = scalar_curvature_flow(manifold, &u)?;
        let gvol_weights = gvol_weights(manifold, &u);
        let rho = energy(manifold, &u);
        Ok(FlowState {
            t,
            u,
            s,
            rho,
            gvol_weights,
        })
    }

    /// `u = 1` at `t = 0`.
    pub fn initial(manifold: &DiscretizedManifold) -> Self {
        Self::new(manifold, Field::constant(manifold.len(), 1.0), 0.0)
            .expect("unit conformal factor is valid")
    }

    pub fn volume(&self) -> f64 {
        self.gvol_weights.iter().sum()
    }

    /// `int (S - rho)^2 dVol_g`.
    pub fn curvature_energy(&self) -> f64 {
        self.s
            .iter()
            .zip(&self.gvol_weights)
            .map(|(s, w)| w * (s - self.rho).powi(2))
            .sum()
    }

    /// `||S_-||_{L^p(M, g)}`.
    pub fn s_minus_norm(&self, p: f64) -> f64 {
        let neg: Vec<f64> = self.s.iter().map(|s| (-s).max(0.0)).collect();
        crate::discretization::lp_norm(&neg, p, &self.gvol_weights).unwrap_or(f64::NAN)
    }
}

fn lp_power(manifold: &DiscretizedManifold, v: &[f64], p: f64) -> f64 {
    v.iter()
        .zip(manifold.mu())
        .map(|(x, m)| m * x.abs().powf(p))
        .sum()
}

/// `Q(v) = E(v) / ||v||^2_{L^{2n/(n-2)}}`.
pub fn yamabe_quotient(manifold: &DiscretizedManifold, v: &Field) -> Result<f64, YamabeError> {
    v.check_aligned(manifold)?;
    let p = volume_exponent(manifold.dim());
    let norm = lp_power(manifold, v, p).powf(1.0 / p);
    if !(norm > 0.0) {
        return Err(YamabeError::ZeroNorm);
    }
    Ok(energy(manifold, v) / (norm * norm))
}

/// Settings of [`estimate_yamabe_constant`].
#[derive(Debug, Clone, PartialEq)]
pub struct YamabeOptions {
    pub max_iter: usize,
    /// Stop once the relative decrease of `Q` over one step falls below this.
    pub tol: f64,
    pub initial_step: f64,
    pub backtrack: f64,
    pub armijo: f64,
    /// Number of extra seeded starting points besides `v = 1`.
    pub multistart: usize,
    pub seed: u64,
}

impl Default for YamabeOptions {
    fn default() -> Self {
        YamabeOptions {
            max_iter: 500,
            tol: 1e-12,
            initial_step: 1.0,
            backtrack: 0.5,
            armijo: 1e-4,
            multistart: 0,
            seed: 0x594601,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct YamabeEstimate {
    /// Upper bound for the Yamabe constant: the infimum is only taken over radial functions.
    pub value: f64,
    pub minimizer: Field,
    pub iterations: usize,
    pub converged: bool,
    /// Quotient after each accepted step of the run that produced `value`.
    pub history: Vec<f64>,
}

/// Minimizes `Q` by preconditioned descent with Armijo backtracking, starting from `v = 1`.
///
/// The gradient is taken in the `H^1`-type inner product defined by `-c_n Delta + Q`, which costs
/// one tridiagonal solve per iteration and keeps the step size independent of the mesh.
pub fn estimate_yamabe_constant(
    manifold: &DiscretizedManifold,
    opts: &YamabeOptions,
) -> Result<YamabeEstimate, YamabeError> {
    let mut best = descend(manifold, Field::constant(manifold.len(), 1.0), opts)?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let xmax = *manifold.faces().last().unwrap();
    for _ in 0..opts.multistart {
        let amps: Vec<f64> = (0..4).map(|_| rng.gen_range(-0.3..0.3)).collect();
        let start: Field = manifold
            .nodes()
            .iter()
            .map(|&x| {
                let s = x / xmax;
                1.0 + amps
                    .iter()
                    .enumerate()
                    .map(|(k, a)| a * ((k + 1) as f64 * std::f64::consts::PI * s).cos())
                    .sum::<f64>()
            })
            .collect();
        let run = descend(manifold, start, opts)?;
        if run.value < best.value {
            best = run;
        }
    }
    Ok(best)
}

fn descend(
    manifold: &DiscretizedManifold,
    start: Field,
    opts: &YamabeOptions,
) -> Result<YamabeEstimate, YamabeError> {
    let p = volume_exponent(manifold.dim());
    let cn = conformal_constant(manifold.dim());
    let mu = manifold.mu();
    let normalize = |v: &mut Vec<f64>| -> Result<(), YamabeError> {
        let norm = lp_power(manifold, v, p).powf(1.0 / p);
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(YamabeError::ZeroNorm);
        }
        v.iter_mut().for_each(|x| *x /= norm);
        Ok(())
    };
    let mut v = start.into_vec();
    normalize(&mut v)?;
    let mut q = energy(manifold, &v);
    let mut history = vec![q];
    let lap = TridiagonalOperator::laplacian(manifold);
    let mut converged = false;
    let mut iterations = 0;

    while iterations < opts.max_iter {
        iterations += 1;
        // L^2(dmu) gradient of Q at unit norm
        let l0 = conformal_laplacian_raw(manifold, &v);
        let g: Vec<f64> = v
            .iter()
            .zip(&l0)
            .map(|(x, l)| 2.0 * (l - q * x.abs().powf(p - 2.0) * x))
            .collect();
        let shift = q.abs().max(1.0);
        let precond = TridiagonalOperator {
            lower: lap.lower.iter().map(|a| -cn * a).collect(),
            diag: lap.diag.iter().map(|a| shift - cn * a).collect(),
            upper: lap.upper.iter().map(|a| -cn * a).collect(),
        };
        let d = precond.solve(&g)?;
        let slope: f64 = g.iter().zip(&d).zip(mu).map(|((a, b), m)| m * a * b).sum();
        if !(slope > 1e-30 * q.abs().max(1.0)) {
            converged = true;
            break;
        }
        let mut alpha = opts.initial_step;
        let mut accepted = None;
        while alpha > 1e-14 {
            let mut trial: Vec<f64> = v.iter().zip(&d).map(|(x, dx)| x - alpha * dx).collect();
            if normalize(&mut trial).is_ok() {
                let qt = energy(manifold, &trial);
                if qt <= q - opts.armijo * alpha * slope {
                    accepted = Some((trial, qt));
                    break;
                }
            }
            alpha *= opts.backtrack;
        }
        let Some((trial, qt)) = accepted else {
            converged = true;
            break;
        };
        let decrease = q - qt;
        v = trial;
        q = qt;
        history.push(q);
        if decrease <= opts.tol * q.abs().max(1.0) {
            converged = true;
            break;
        }
    }
    Ok(YamabeEstimate {
        value: q,
        minimizer: Field::new(v),
        iterations,
        converged,
        history,
    })
}

/// Constants of the elliptic and time-dependent Sobolev inequalities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SobolevConstants {
    pub a0: f64,
    /// `None` when `S_0` is unbounded.
    pub b0: Option<f64>,
    pub a_t: f64,
    pub b_t: Option<f64>,
}

/// `A_0 = c_n / Y`, `B_0 = ||S_0||_inf / Y`, and their versions for `g(t)` with
/// `sup u / inf u` factors.
pub fn sobolev_constants(
    manifold: &DiscretizedManifold,
    y_est: f64,
    sup_u: f64,
    inf_u: f64,
) -> Result<SobolevConstants, YamabeError> {
    let s0_linf = manifold
        .profile()
        .curvature_bounded()
        .then(|| manifold.s0().iter().fold(0.0f64, |m, s| m.max(s.abs())));
    sobolev_constants_with(manifold.dim(), y_est, s0_linf, sup_u, inf_u)
}

pub fn sobolev_constants_with(
    n: usize,
    y_est: f64,
    s0_linf: Option<f64>,
    sup_u: f64,
    inf_u: f64,
) -> Result<SobolevConstants, YamabeError> {
    if !(y_est > 0.0) {
        return Err(YamabeError::NonPositiveYamabe(y_est));
    }
    if !(inf_u > 0.0) {
        return Err(YamabeError::NonPositive {
            node: 0,
            value: inf_u,
        });
    }
    let a0 = conformal_constant(n) / y_est;
    let b0 = s0_linf.map(|s| s / y_est);
    let ratio = sup_u / inf_u;
    Ok(SobolevConstants {
        a0,
        b0,
        a_t: a0 * ratio * ratio,
        b_t: b0.map(|b| b * sup_u * sup_u / inf_u.powf(volume_exponent(n))),
    })
}
