//! Piecewise auxiliary functions used to truncate powers of the curvature.
//!
//! The raw evaluators take `(beta, l, x)` directly and perform no validation; the public
//! wrappers in the parent module check their arguments first.

/// `phi_{beta,L}`: `x^beta` up to `L`, then the tangent line.
pub(crate) fn phi(b: f64, l: f64, x: f64) -> f64 {
    if x <= l {
        x.powf(b)
    } else {
        b * l.powf(b - 1.0) * (x - l) + l.powf(b)
    }
}

pub(crate) fn phi_prime(b: f64, l: f64, x: f64) -> f64 {
    if x <= l {
        b * x.powf(b - 1.0)
    } else {
        b * l.powf(b - 1.0)
    }
}

/// `G = int_0^x phi'^2`.
pub(crate) fn g(b: f64, l: f64, x: f64) -> f64 {
    if x <= l {
        b * b / (2.0 * b - 1.0) * x.powf(2.0 * b - 1.0)
    } else {
        b * b * l.powf(2.0 * (b - 1.0)) * x
            - 2.0 * b * b * l.powf(2.0 * b - 1.0) * (b - 1.0) / (2.0 * b - 1.0)
    }
}

/// `H = int_0^x G`.
pub(crate) fn h(b: f64, l: f64, x: f64) -> f64 {
    if x <= l {
        b * x.powf(2.0 * b) / (2.0 * (2.0 * b - 1.0))
    } else {
        b * b * l.powf(2.0 * (b - 1.0)) / 2.0 * (x * x - l * l)
            - 2.0 * b * b * l.powf(2.0 * b - 1.0) * (b - 1.0) / (2.0 * b - 1.0) * (x - l)
            + b * l.powf(2.0 * b) / (2.0 * (2.0 * b - 1.0))
    }
}

/// Majorant of `x G - (n/2) H`, linear beyond `L`.
pub(crate) fn f(b: f64, l: f64, n: f64, x: f64) -> f64 {
    if x <= l {
        b * x.powf(2.0 * b)
    } else {
        n * b * b * l.powf(2.0 * b - 1.0) * x
    }
}

pub(crate) fn big_f(b: f64, l: f64, n: f64, x: f64) -> f64 {
    (x * f(b, l, n, x)).powf(1.0 / (2.0 * b + 1.0))
}

/// Constant term of the tilde `H` beyond `L`.
pub(crate) fn c_beta_nu(b: f64, nu: f64) -> f64 {
    b * (b * (2.0 * b - 1.0) + 4.0 * nu * b * (nu - b) + nu * (1.0 - 2.0 * nu))
        / (2.0 * nu * (2.0 * b - 1.0) * (2.0 * nu - 1.0))
}

pub(crate) fn tilde_phi(b: f64, l: f64, nu: f64, x: f64) -> f64 {
    if x <= l {
        x.powf(b)
    } else {
        b / nu * l.powf(b - nu) * x.powf(nu) + l.powf(b) * (1.0 - b / nu)
    }
}

pub(crate) fn tilde_phi_prime(b: f64, l: f64, nu: f64, x: f64) -> f64 {
    if x <= l {
        b * x.powf(b - 1.0)
    } else {
        b * l.powf(b - nu) * x.powf(nu - 1.0)
    }
}

pub(crate) fn tilde_g(b: f64, l: f64, nu: f64, x: f64) -> f64 {
    if x <= l {
        b * b / (2.0 * b - 1.0) * x.powf(2.0 * b - 1.0)
    } else {
        b * b * l.powf(2.0 * (b - nu)) / (2.0 * nu - 1.0) * x.powf(2.0 * nu - 1.0)
            - 2.0 * b * b * l.powf(2.0 * b - 1.0) * (b - nu) / ((2.0 * nu - 1.0) * (2.0 * b - 1.0))
    }
}

pub(crate) fn tilde_h(b: f64, l: f64, nu: f64, x: f64) -> f64 {
    if x <= l {
        b * x.powf(2.0 * b) / (2.0 * (2.0 * b - 1.0))
    } else {
        b * b * l.powf(2.0 * (b - nu)) / (2.0 * nu * (2.0 * nu - 1.0)) * x.powf(2.0 * nu)
            - 2.0 * b * b * l.powf(2.0 * b - 1.0) * (b - nu) / ((2.0 * nu - 1.0) * (2.0 * b - 1.0))
                * x
            - c_beta_nu(b, nu) * l.powf(2.0 * b)
    }
}

pub(crate) fn tilde_f(b: f64, l: f64, nu: f64, n: f64, x: f64) -> f64 {
    if x <= l {
        b * x.powf(2.0 * b)
    } else {
        n / 2.0 * c_beta_nu(b, nu).abs() * l.powf(2.0 * b)
    }
}

pub(crate) fn tilde_big_f(b: f64, l: f64, nu: f64, n: f64, x: f64) -> f64 {
    (x * tilde_f(b, l, nu, n, x)).powf(1.0 / (2.0 * b + 1.0))
}

/// `psi_eps(x) = sqrt(x^2 + eps^2) - eps`, written without cancellation.
pub(crate) fn psi(eps: f64, x: f64) -> f64 {
    x * x / ((x * x + eps * eps).sqrt() + eps)
}

pub(crate) fn psi_prime(eps: f64, x: f64) -> f64 {
    x / (x * x + eps * eps).sqrt()
}

pub(crate) fn psi_second(eps: f64, x: f64) -> f64 {
    eps * eps / (x * x + eps * eps).powf(1.5)
}
