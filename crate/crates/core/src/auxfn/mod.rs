//! Truncated power functions and an oracle for the pointwise inequalities they satisfy.
//!
//! The families `phi`, `G`, `H` (and their tilde variants with exponent `nu` beyond the
//! truncation point `L`) are evaluated branch by branch in closed form. Each inequality of
//! the [`Inequality`] catalogue can be checked at a single point or searched for
//! counterexamples with a seeded sampler.

mod catalogue;
mod families;
mod search;

pub use catalogue::{Comparison, Inequality};
pub use search::{
    comparison_constant, find_counterexample, survey, Constant, SampleRegion, Sampler, SurveyRow,
    DEFAULT_SEED,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AuxError {
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("argument must be non-negative, got {0}")]
    NegativeArgument(f64),
    #[error("unknown inequality {0:?}")]
    UnknownInequality(String),
    #[error("{id} requires {requirement}")]
    OutsideRegion {
        id: &'static str,
        requirement: String,
    },
}

/// Parameters shared by the function families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuxParams {
    pub beta: f64,
    pub l: f64,
    /// Growth exponent of the tilde family beyond `L`. The plain family corresponds to `nu = 1`.
    pub nu: f64,
    pub n: usize,
}

impl AuxParams {
    pub fn new(beta: f64, l: f64, n: usize) -> Result<Self, AuxError> {
        if !(beta >= 1.0 && beta.is_finite()) {
            return Err(AuxError::InvalidParam(format!(
                "beta must be >= 1, got {beta}"
            )));
        }
        if !(l > 0.0 && l.is_finite()) {
            return Err(AuxError::InvalidParam(format!(
                "L must be positive, got {l}"
            )));
        }
        if n < 3 {
            return Err(AuxError::InvalidParam(format!("n must be >= 3, got {n}")));
        }
        Ok(AuxParams {
            beta,
            l,
            nu: 1.0,
            n,
        })
    }

    pub fn with_nu(self, nu: f64) -> Result<Self, AuxError> {
        if !(nu > 0.0 && nu <= 1.0) || nu == 0.5 {
            return Err(AuxError::InvalidParam(format!(
                "nu must lie in (0, 1] minus {{1/2}}, got {nu}"
            )));
        }
        Ok(AuxParams { nu, ..self })
    }

    fn dim(&self) -> f64 {
        self.n as f64
    }

    fn check_tilde(&self) -> Result<(), AuxError> {
        if self.nu > self.dim() / 4.0 {
            return Err(AuxError::InvalidParam(format!(
                "tilde family needs nu <= n/4, got nu = {} with n = {}",
                self.nu, self.n
            )));
        }
        Ok(())
    }
}

fn non_negative(x: f64) -> Result<f64, AuxError> {
    if x >= 0.0 {
        Ok(x)
    } else {
        Err(AuxError::NegativeArgument(x))
    }
}

pub fn phi(p: &AuxParams, x: f64) -> Result<f64, AuxError> {
    Ok(families::phi(p.beta, p.l, non_negative(x)?))
}

#[allow(non_snake_case)]
pub fn G(p: &AuxParams, x: f64) -> Result<f64, AuxError> {
    Ok(families::g(p.beta, p.l, non_negative(x)?))
}

#[allow(non_snake_case)]
pub fn H(p: &AuxParams, x: f64) -> Result<f64, AuxError> {
    Ok(families::h(p.beta, p.l, non_negative(x)?))
}

pub fn f(p: &AuxParams, x: f64) -> Result<f64, AuxError> {
    Ok(families::f(p.beta, p.l, p.dim(), non_negative(x)?))
}

#[allow(non_snake_case)]
pub fn F(p: &AuxParams, x: f64) -> Result<f64, AuxError> {
    Ok(families::big_f(p.beta, p.l, p.dim(), non_negative(x)?))
}

pub fn tilde_phi(p: &AuxParams, x: f64) -> Result<f64, AuxError> {
    p.check_tilde()?;
    Ok(families::tilde_phi(p.beta, p.l, p.nu, non_negative(x)?))
}

#[allow(non_snake_case)]
pub fn tilde_G(p: &AuxParams, x: f64) -> Result<f64, AuxError> {
    p.check_tilde()?;
    Ok(families::tilde_g(p.beta, p.l, p.nu, non_negative(x)?))
}

#[allow(non_snake_case)]
pub fn tilde_H(p: &AuxParams, x: f64) -> Result<f64, AuxError> {
    p.check_tilde()?;
    Ok(families::tilde_h(p.beta, p.l, p.nu, non_negative(x)?))
}

pub fn tilde_f(p: &AuxParams, x: f64) -> Result<f64, AuxError> {
    p.check_tilde()?;
    Ok(families::tilde_f(
        p.beta,
        p.l,
        p.nu,
        p.dim(),
        non_negative(x)?,
    ))
}

#[allow(non_snake_case)]
pub fn tilde_F(p: &AuxParams, x: f64) -> Result<f64, AuxError> {
    p.check_tilde()?;
    Ok(families::tilde_big_f(
        p.beta,
        p.l,
        p.nu,
        p.dim(),
        non_negative(x)?,
    ))
}

/// Derivative of `phi` (one-sided from the left at `x = L`).
pub fn phi_prime(p: &AuxParams, x: f64) -> Result<f64, AuxError> {
    Ok(families::phi_prime(p.beta, p.l, non_negative(x)?))
}

pub fn tilde_phi_prime(p: &AuxParams, x: f64) -> Result<f64, AuxError> {
    p.check_tilde()?;
    Ok(families::tilde_phi_prime(
        p.beta,
        p.l,
        p.nu,
        non_negative(x)?,
    ))
}

/// Constant term `C_{beta,nu}` of the tilde `H` beyond `L`.
pub fn c_beta_nu(beta: f64, nu: f64) -> f64 {
    families::c_beta_nu(beta, nu)
}

/// `C_3^{-1} = max(beta^nu, (nu/beta) (n |C_{beta,nu}| / 2)^nu)`.
pub fn c3_inverse(beta: f64, nu: f64, n: usize) -> f64 {
    let c = c_beta_nu(beta, nu).abs();
    beta.powf(nu).max(nu / beta * (n as f64 / 2.0 * c).powf(nu))
}

/// `psi_eps(x) = sqrt(x^2 + eps^2) - eps`, a smooth approximation of `x_+`.
pub fn psi(eps: f64, x: f64) -> f64 {
    families::psi(eps, x)
}
