use super::jet::Jet;
use super::GeometryError;

/// Natural cubic spline through `(x_i, y_i)` with analytic first and second derivatives.
#[derive(Debug, Clone)]
pub struct CubicSpline {
    xs: Vec<f64>,
    ys: Vec<f64>,
    // second derivatives at the knots
    m: Vec<f64>,
}

impl CubicSpline {
    pub fn new(xs: &[f64], ys: &[f64]) -> Result<Self, GeometryError> {
        if xs.len() != ys.len() {
            return Err(GeometryError::Tabulated(format!(
                "column lengths differ ({} vs {})",
                xs.len(),
                ys.len()
            )));
        }
        if xs.len() < 4 {
            return Err(GeometryError::Tabulated(format!(
                "need at least 4 samples, got {}",
                xs.len()
            )));
        }
        if let Some(i) = xs.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(GeometryError::Tabulated(format!(
                "abscissae must increase strictly (rows {} and {})",
                i + 1,
                i + 2
            )));
        }
        if xs.iter().chain(ys).any(|v| !v.is_finite()) {
            return Err(GeometryError::Tabulated("non-finite sample".into()));
        }
        let n = xs.len();
        let mut m = vec![0.0; n];
        // Tridiagonal system for the interior second derivatives.
        let k = n - 2;
        let mut diag = vec![0.0; k];
        let mut upper = vec![0.0; k];
        let mut rhs = vec![0.0; k];
        for j in 0..k {
            let i = j + 1;
            let h0 = xs[i] - xs[i - 1];
            let h1 = xs[i + 1] - xs[i];
            diag[j] = 2.0 * (h0 + h1);
            upper[j] = h1;
            rhs[j] = 6.0 * ((ys[i + 1] - ys[i]) / h1 - (ys[i] - ys[i - 1]) / h0);
        }
        for j in 1..k {
            let lower = xs[j + 1] - xs[j];
            let w = lower / diag[j - 1];
            diag[j] -= w * upper[j - 1];
            rhs[j] -= w * rhs[j - 1];
        }
        for j in (0..k).rev() {
            let next = if j + 1 < k { m[j + 2] } else { 0.0 };
            m[j + 1] = (rhs[j] - upper[j] * next) / diag[j];
        }
        Ok(CubicSpline {
            xs: xs.to_vec(),
            ys: ys.to_vec(),
            m,
        })
    }

    pub fn eval(&self, x: f64) -> Jet {
        let n = self.xs.len();
        let i = match self.xs.partition_point(|&k| k <= x) {
            0 => 0,
            p if p >= n => n - 2,
            p => p - 1,
        };
        let (x0, x1) = (self.xs[i], self.xs[i + 1]);
        let (y0, y1) = (self.ys[i], self.ys[i + 1]);
        let (m0, m1) = (self.m[i], self.m[i + 1]);
        let h = x1 - x0;
        let a = (x1 - x) / h;
        let b = (x - x0) / h;
        let v = a * y0 + b * y1 + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / 6.0;
        let d1 =
            (y1 - y0) / h - (3.0 * a * a - 1.0) * h * m0 / 6.0 + (3.0 * b * b - 1.0) * h * m1 / 6.0;
        let d2 = a * m0 + b * m1;
        Jet { v, d1, d2 }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_knots_and_smooth_function() {
        let xs: Vec<f64> = (0..=200)
            .map(|i| i as f64 * std::f64::consts::PI / 200.0)
            .collect();
        let ys: Vec<f64> = xs.iter().map(|x| x.sin()).collect();
        let s = CubicSpline::new(&xs, &ys).unwrap();
        for (x, y) in xs.iter().zip(&ys) {
            assert!((s.eval(*x).v - y).abs() < 1e-14);
        }
        let j = s.eval(1.0);
        assert!((j.v - 1f64.sin()).abs() < 1e-8);
        assert!((j.d1 - 1f64.cos()).abs() < 1e-5);
        assert!((j.d2 + 1f64.sin()).abs() < 1e-3);
    }

    #[test]
    fn rejects_unsorted_input() {
        assert!(CubicSpline::new(&[0.0, 1.0, 1.0, 2.0], &[0.0; 4]).is_err());
        assert!(CubicSpline::new(&[0.0, 1.0], &[0.0; 2]).is_err());
    }
}
