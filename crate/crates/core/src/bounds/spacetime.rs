use crate::yamabe::FlowState;

/// `int_{t_start}^{t_end} v(t) dt` for the piecewise-linear interpolant of `(times, values)`.
pub fn interval_integral(times: &[f64], values: &[f64], t_start: f64) -> f64 {
    let mut acc = 0.0;
    for i in 1..times.len() {
        let (t0, t1) = (times[i - 1], times[i]);
        if t1 <= t_start || t1 <= t0 {
            continue;
        }
        let (mut a, mut va) = (t0, values[i - 1]);
        if t0 < t_start {
            let w = (t_start - t0) / (t1 - t0);
            a = t_start;
            va = values[i - 1] + w * (values[i] - values[i - 1]);
        }
        acc += 0.5 * (t1 - a) * (va + values[i]);
    }
    acc
}

/// `(int_{t_start}^T int_M |f|^p dVol_g dt)^{1/p}` over the stored snapshots.
///
/// `f(state, i)` gives the integrand at node `i`; for `p = inf` the maximum over snapshots with
/// `t >= t_start` is returned.
pub fn space_time_norm(
    snapshots: &[FlowState],
    t_start: f64,
    p: f64,
    f: impl Fn(&FlowState, usize) -> f64,
) -> f64 {
    if p.is_infinite() {
        return snapshots
            .iter()
            .filter(|s| s.t >= t_start)
            .flat_map(|s| (0..s.u.len()).map(|i| f(s, i).abs()).collect::<Vec<_>>())
            .fold(0.0, f64::max);
    }
    let times: Vec<f64> = snapshots.iter().map(|s| s.t).collect();
    let values: Vec<f64> = snapshots
        .iter()
        .map(|s| {
            s.gvol_weights
                .iter()
                .enumerate()
                .map(|(i, w)| w * f(s, i).abs().powf(p))
                .sum()
        })
        .collect();
    interval_integral(&times, &values, t_start).powf(1.0 / p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_interpolant_integral() {
        let t = [0.0, 1.0, 2.0];
        let v = [0.0, 1.0, 2.0];
        assert!((interval_integral(&t, &v, 0.0) - 2.0).abs() < 1e-15);
        assert!((interval_integral(&t, &v, 0.5) - (2.0 - 0.125)).abs() < 1e-15);
        assert!((interval_integral(&t, &v, -1.0) - 2.0).abs() < 1e-15);
    }
}
