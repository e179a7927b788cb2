//! Finite-volume operators on a [`DiscretizedManifold`]: weighted Laplacian, conformal
//! Laplacian, quadrature and norms.
//!
//! The Laplacian is the conservative stencil
//! `(Delta f)_i = (kappa_{i+1/2}(f_{i+1} - f_i) - kappa_{i-1/2}(f_i - f_{i-1})) / mu_i`
//! with no flux through either end of the interval, so constants are harmonic and
//! `sum_i mu_i (Delta f)_i g_i = -D(f, g)` holds up to rounding, where
//! `D(f, g) = sum kappa (f_{i+1} - f_i)(g_{i+1} - g_i)` is the discrete Dirichlet form.

use std::ops::{Deref, Index};

use thiserror::Error;

use crate::geometry::DiscretizedManifold;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiscretizationError {
    #[error("field has {got} values but the grid has {expected} nodes")]
    Misaligned { expected: usize, got: usize },
    #[error("L^p norm needs p >= 1, got {0}")]
    InvalidExponent(f64),
    #[error("singular tridiagonal system at row {row}")]
    Singular { row: usize },
}

/// Grid function with one value per node.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Field(Vec<f64>);

impl Field {
    pub fn new(values: Vec<f64>) -> Self {
        Field(values)
    }

    pub fn constant(len: usize, c: f64) -> Self {
        Field(vec![c; len])
    }

    pub fn from_fn(manifold: &DiscretizedManifold, f: impl Fn(f64) -> f64) -> Self {
        Field(manifold.nodes().iter().map(|&x| f(x)).collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Field {
        Field(self.0.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_map(&self, other: &Field, f: impl Fn(f64, f64) -> f64) -> Field {
        Field(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        )
    }

    pub fn scale(&self, c: f64) -> Field {
        self.map(|v| c * v)
    }

    pub fn min(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.0.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    pub fn check_aligned(&self, manifold: &DiscretizedManifold) -> Result<(), DiscretizationError> {
        if self.len() == manifold.len() {
            Ok(())
        } else {
            Err(DiscretizationError::Misaligned {
                expected: manifold.len(),
                got: self.len(),
            })
        }
    }
}

impl Deref for Field {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl Index<usize> for Field {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl From<Vec<f64>> for Field {
    fn from(v: Vec<f64>) -> Self {
        Field(v)
    }
}

impl FromIterator<f64> for Field {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        Field(iter.into_iter().collect())
    }
}

/// Tridiagonal matrix stored by bands; `lower[0]` and `upper[len-1]` are unused.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalOperator {
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
}

impl TridiagonalOperator {
    /// The zero-flux Laplacian of `manifold`.
    pub fn laplacian(manifold: &DiscretizedManifold) -> Self {
        let mu = manifold.mu();
        let kappa = manifold.kappa();
        let n = mu.len();
        let mut lower = vec![0.0; n];
        let mut upper = vec![0.0; n];
        let mut diag = vec![0.0; n];
        for i in 0..n {
            if i > 0 {
                lower[i] = kappa[i - 1] / mu[i];
            }
            if i + 1 < n {
                upper[i] = kappa[i] / mu[i];
            }
            diag[i] = -(lower[i] + upper[i]);
        }
        TridiagonalOperator { lower, diag, upper }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn apply(&self, f: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut acc = self.diag[i] * f[i];
                if i > 0 {
                    acc += self.lower[i] * f[i - 1];
                }
                if i + 1 < n {
                    acc += self.upper[i] * f[i + 1];
                }
                acc
            })
            .collect()
    }

    /// Row sums; these vanish for a pure Laplacian.
    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.len())
            .map(|i| self.lower[i] + self.diag[i] + self.upper[i])
            .collect()
    }

    /// Thomas algorithm. Stable for the diagonally dominant systems produced here.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>, DiscretizationError> {
        let n = self.len();
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        let mut denom = self.diag[0];
        if denom == 0.0 || !denom.is_finite() {
            return Err(DiscretizationError::Singular { row: 0 });
        }
        c[0] = self.upper[0] / denom;
        d[0] = rhs[0] / denom;
        for i in 1..n {
            denom = self.diag[i] - self.lower[i] * c[i - 1];
            if denom == 0.0 || !denom.is_finite() {
                return Err(DiscretizationError::Singular { row: i });
            }
            c[i] = self.upper[i] / denom;
            d[i] = (rhs[i] - self.lower[i] * d[i - 1]) / denom;
        }
        for i in (0..n - 1).rev() {
            d[i] -= c[i] * d[i + 1];
        }
        Ok(d)
    }
}

/// `4(n-1)/(n-2)`.
pub fn conformal_constant(n: usize) -> f64 {
    let n = n as f64;
    4.0 * (n - 1.0) / (n - 2.0)
}

pub fn laplacian(manifold: &DiscretizedManifold, f: &Field) -> Result<Field, DiscretizationError> {
    f.check_aligned(manifold)?;
    Ok(laplacian_unchecked(manifold, f))
}

pub(crate) fn laplacian_unchecked(manifold: &DiscretizedManifold, f: &[f64]) -> Field {
    let mu = manifold.mu();
    let kappa = manifold.kappa();
    let n = f.len();
    let mut out = vec![0.0; n];
    for (i, k) in kappa.iter().enumerate() {
        let flux = k * (f[i + 1] - f[i]);
        out[i] += flux;
        out[i + 1] -= flux;
    }
    for (o, m) in out.iter_mut().zip(mu) {
        *o /= m;
    }
    Field(out)
}

/// `L_0 f = S_0 f - (4(n-1)/(n-2)) Delta_0 f`.
pub fn conformal_laplacian(
    manifold: &DiscretizedManifold,
    f: &Field,
) -> Result<Field, DiscretizationError> {
    let lap = laplacian(manifold, f)?;
    let cn = conformal_constant(manifold.dim());
    Ok(f.iter()
        .zip(manifold.s0())
        .zip(lap.iter())
        .map(|((v, s), l)| s * v - cn * l)
        .collect())
}

pub fn integrate(f: &[f64], weights: &[f64]) -> f64 {
    f.iter().zip(weights).map(|(a, w)| a * w).sum()
}

/// Weighted `L^p` norm; `p = inf` is the maximum over nodes.
pub fn lp_norm(f: &[f64], p: f64, weights: &[f64]) -> Result<f64, DiscretizationError> {
    if !(p >= 1.0) {
        return Err(DiscretizationError::InvalidExponent(p));
    }
    if p.is_infinite() {
        return Ok(f.iter().fold(0.0, |m, v| m.max(v.abs())));
    }
    let s: f64 = f
        .iter()
        .zip(weights)
        .map(|(a, w)| w * a.abs().powf(p))
        .sum();
    Ok(s.powf(1.0 / p))
}

/// Edge-based Dirichlet form `D(f, g) = sum kappa (f_{i+1} - f_i)(g_{i+1} - g_i)`.
pub fn dirichlet_form(manifold: &DiscretizedManifold, f: &[f64], g: &[f64]) -> f64 {
    manifold
        .kappa()
        .iter()
        .enumerate()
        .map(|(i, k)| k * (f[i + 1] - f[i]) * (g[i + 1] - g[i]))
        .sum()
}

/// Nodal gradient: centred in the interior, one-sided at the first and last node.
pub fn gradient(manifold: &DiscretizedManifold, f: &[f64]) -> Vec<f64> {
    let x = manifold.nodes();
    let n = f.len();
    (0..n)
        .map(|i| {
            let (a, b) = match i {
                0 => (0, 1),
                _ if i == n - 1 => (n - 2, n - 1),
                _ => (i - 1, i + 1),
            };
            (f[b] - f[a]) / (x[b] - x[a])
        })
        .collect()
}

/// `sqrt(int f^2 dmu + int |f'|^2 dmu)` with the nodal gradient.
pub fn h1_norm(f: &Field, manifold: &DiscretizedManifold) -> Result<f64, DiscretizationError> {
    f.check_aligned(manifold)?;
    let grad = gradient(manifold, f);
    let mu = manifold.mu();
    let l2: f64 = integrate(&f.map(|v| v * v), mu);
    let g2: f64 = grad.iter().zip(mu).map(|(g, m)| m * g * g).sum();
    Ok((l2 + g2).sqrt())
}
