use super::spacetime::space_time_norm;
use super::BoundsError;
use crate::flow::Trajectory;

/// `N = n^2 / (n^2 - 2n + 4)`, the Hölder dual of `n^2 / (2(n-2))`.
pub fn moser_n(n: usize) -> f64 {
    let n = n as f64;
    n * n / (n * n - 2.0 * n + 4.0)
}

/// Gain of integrability per Moser step, `(n+2)/(n N) = (n^3 + 8)/n^3`.
pub fn moser_exponent(n: usize) -> f64 {
    (n as f64 + 2.0) / (n as f64 * moser_n(n))
}

/// `t_k = (1/2 - 1/2^k) T`.
pub fn cutoff_time(k: usize, t_final: f64) -> f64 {
    (0.5 - 0.5f64.powi(k as i32)) * t_final
}

/// Monotone cubic cutoff: `0` up to `t_{k-1}`, `1` from `t_k` on.
pub fn cutoff(k: usize, t_final: f64, t: f64) -> f64 {
    let a = cutoff_time(k - 1, t_final);
    let b = cutoff_time(k, t_final);
    let s = ((t - a) / (b - a)).clamp(0.0, 1.0);
    s * s * (3.0 - 2.0 * s)
}

pub fn cutoff_slope(k: usize, t_final: f64, t: f64) -> f64 {
    let a = cutoff_time(k - 1, t_final);
    let b = cutoff_time(k, t_final);
    let s = (t - a) / (b - a);
    if (0.0..=1.0).contains(&s) {
        6.0 * s * (1.0 - s) / (b - a)
    } else {
        0.0
    }
}

/// One level of the chain: norms of `S_+^{2 beta}` on nested cylinders `M x [t_k, T]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainLevel {
    pub k: usize,
    pub t_k: f64,
    /// `||S_+^{2 beta}||_{L^{(n+2)/n}(M_k)}`
    pub upper: f64,
    /// `||S_+^{2 beta}||_{L^N(M_{k-1})}`
    pub lower: f64,
    pub ratio: f64,
    /// Largest slope of the cutoff on `[t_{k-1}, t_k]`.
    pub max_slope: f64,
    /// `2^{k+1} / T`.
    pub slope_bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainReport {
    pub beta: f64,
    pub n: usize,
    pub big_n: f64,
    pub moser_exponent: f64,
    pub levels: Vec<ChainLevel>,
}

impl ChainReport {
    pub fn all_finite(&self) -> bool {
        self.levels
            .iter()
            .all(|l| l.ratio.is_finite() && l.ratio > 0.0)
    }

    pub fn slopes_within_bound(&self) -> bool {
        self.levels.iter().all(|l| l.max_slope <= l.slope_bound)
    }
}

/// Diagnostic Moser ledger for `S_+` along a trajectory of an `n`-dimensional flow.
pub fn moser_chain(
    n: usize,
    traj: &Trajectory,
    beta: f64,
    k_max: usize,
) -> Result<ChainReport, BoundsError> {
    if !(beta > 1.0) {
        return Err(BoundsError::BetaTooSmall(beta));
    }
    if !(1..=8).contains(&k_max) {
        return Err(BoundsError::ChainDepth(k_max));
    }
    if traj.snapshots.is_empty() {
        return Err(BoundsError::EmptyTrajectory);
    }
    let t_final = traj.t_final();
    let big_n = moser_n(n);
    let p_upper = (n as f64 + 2.0) / n as f64;
    let power = |s: &crate::yamabe::FlowState, i: usize| s.s[i].max(0.0).powf(2.0 * beta);
    let levels = (1..=k_max)
        .map(|k| {
            let t_k = cutoff_time(k, t_final);
            let t_prev = cutoff_time(k - 1, t_final).max(0.0);
            let upper = space_time_norm(&traj.snapshots, t_k, p_upper, power);
            let lower = space_time_norm(&traj.snapshots, t_prev, big_n, power);
            // the smoothstep peaks at the midpoint of [t_{k-1}, t_k]
            let mid = 0.5 * (cutoff_time(k - 1, t_final) + t_k);
            ChainLevel {
                k,
                t_k,
                upper,
                lower,
                ratio: upper / lower,
                max_slope: cutoff_slope(k, t_final, mid),
                slope_bound: 2f64.powi(k as i32 + 1) / t_final,
            }
        })
        .collect();
    Ok(ChainReport {
        beta,
        n,
        big_n,
        moser_exponent: moser_exponent(n),
        levels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponents_at_three() {
        assert!((moser_n(3) - 9.0 / 7.0).abs() < 1e-15);
        assert!((moser_exponent(3) - 35.0 / 27.0).abs() < 1e-15);
    }

    #[test]
    fn cutoff_contract() {
        let t = 2.0;
        for k in 1..=8 {
            let a = cutoff_time(k - 1, t);
            let b = cutoff_time(k, t);
            assert_eq!(cutoff(k, t, a), 0.0);
            assert_eq!(cutoff(k, t, b), 1.0);
            let bound = 2f64.powi(k as i32 + 1) / t;
            for j in 0..=100 {
                let s = a + (b - a) * j as f64 / 100.0;
                assert!(cutoff_slope(k, t, s) <= bound);
                assert!(cutoff(k, t, s) >= 0.0 && cutoff(k, t, s) <= 1.0);
            }
        }
    }
}
