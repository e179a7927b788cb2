use std::fmt;
use std::str::FromStr;

use super::families as fam;
use super::search::{comparison_constant, Constant};
use super::{AuxError, AuxParams};

/// Relative tolerance applied to the sum of absolute values of all terms in a comparison.
const REL_TOL: f64 = 1e-12;

/// One side-by-side evaluation inside an inequality.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Comparison {
    pub label: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    /// Sum of absolute values of the terms entering both sides.
    pub scale: f64,
    /// `lhs == rhs` instead of `lhs <= rhs`.
    pub equality: bool,
}

impl Comparison {
    fn le(label: &'static str, lhs: f64, rhs: f64, scale: f64) -> Self {
        Comparison {
            label,
            lhs,
            rhs,
            scale,
            equality: false,
        }
    }

    fn eq(label: &'static str, lhs: f64, rhs: f64) -> Self {
        Comparison {
            label,
            lhs,
            rhs,
            scale: lhs.abs() + rhs.abs(),
            equality: true,
        }
    }

    fn tol(&self) -> f64 {
        REL_TOL * self.scale + 1e-300
    }

    pub fn holds(&self) -> bool {
        let d = self.lhs - self.rhs;
        if self.equality {
            d.abs() <= self.tol()
        } else {
            d <= self.tol()
        }
    }

    /// Excess of the left side relative to the term scale; negative when the inequality holds
    /// with room to spare.
    pub fn margin(&self) -> f64 {
        let d = self.lhs - self.rhs;
        let d = if self.equality { d.abs() } else { d };
        d / (self.scale + 1e-300)
    }
}

/// The pointwise inequalities satisfied by the auxiliary families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Inequality {
    /// `H <= beta^2 x^{2 beta}`
    I1,
    /// `x G - (n/2) H <= 0` when `beta = n/4`
    I2,
    /// `phi^2 <= 12 beta H` and `x G <= 4 beta H`
    I3,
    /// `x G - (n/2) H <= f` for `n >= 4`
    I4,
    /// `F^beta <= n beta phi`
    I5,
    /// `F^{2 beta} <= 4 n beta H`
    I6,
    /// `x G <= beta^2 / (2 beta - 1) phi^2`
    I7,
    /// `x G~ - (n/2) H~ <= f~` for `nu <= n/4 <= beta`
    I8,
    /// `phi~^2 <= C1 H~` and `x G~ <= C2 H~` with `L`-independent constants
    I9,
    /// `C3 F~^beta <= phi~` at `nu = beta / (2 beta + 1)`
    I10,
    /// `F~^{2 beta} <= C4 H~` at `nu = beta / (2 beta + 1)`
    I11,
    /// `psi_eps` is a convex, 1-Lipschitz approximation of `x_+` from below
    I12,
    /// `(n/2) H - x G - (n-2)/4 phi^2 <= 0`
    I13,
    /// Once `L >= x` the families coincide with their pure-power limits
    Lim,
}

impl Inequality {
    pub const ALL: [Inequality; 14] = [
        Inequality::I1,
        Inequality::I2,
        Inequality::I3,
        Inequality::I4,
        Inequality::I5,
        Inequality::I6,
        Inequality::I7,
        Inequality::I8,
        Inequality::I9,
        Inequality::I10,
        Inequality::I11,
        Inequality::I12,
        Inequality::I13,
        Inequality::Lim,
    ];

    pub fn id(&self) -> &'static str {
        match self {
            Inequality::I1 => "I1",
            Inequality::I2 => "I2",
            Inequality::I3 => "I3",
            Inequality::I4 => "I4",
            Inequality::I5 => "I5",
            Inequality::I6 => "I6",
            Inequality::I7 => "I7",
            Inequality::I8 => "I8",
            Inequality::I9 => "I9",
            Inequality::I10 => "I10",
            Inequality::I11 => "I11",
            Inequality::I12 => "I12",
            Inequality::I13 => "I13",
            Inequality::Lim => "LIM",
        }
    }

    pub fn statement(&self) -> &'static str {
        match self {
            Inequality::I1 => "H <= beta^2 x^(2beta)",
            Inequality::I2 => "xG - (n/2)H <= 0 at beta = n/4",
            Inequality::I3 => "phi^2 <= 12 beta H, xG <= 4 beta H",
            Inequality::I4 => "xG - (n/2)H <= f",
            Inequality::I5 => "F^beta <= n beta phi",
            Inequality::I6 => "F^(2beta) <= 4 n beta H",
            Inequality::I7 => "xG <= beta^2/(2beta-1) phi^2",
            Inequality::I8 => "xG~ - (n/2)H~ <= f~",
            Inequality::I9 => "phi~^2 <= C1 H~, xG~ <= C2 H~",
            Inequality::I10 => "C3 F~^beta <= phi~",
            Inequality::I11 => "F~^(2beta) <= C4 H~",
            Inequality::I12 => "0 <= psi' <= 1, psi'' >= 0, x - eps <= psi <= x",
            Inequality::I13 => "(n/2)H - xG - (n-2)/4 phi^2 <= 0",
            Inequality::Lim => "phi, G, H equal their power limits once L >= x",
        }
    }

    /// Whether the inequality uses the tilde family and therefore reads `nu`.
    pub fn uses_nu(&self) -> bool {
        matches!(
            self,
            Inequality::I8 | Inequality::I9 | Inequality::I10 | Inequality::I11
        )
    }

    /// Errors unless `p` lies in the region where the inequality is claimed.
    pub fn check_region(&self, p: &AuxParams) -> Result<(), AuxError> {
        let n = p.n as f64;
        let id = self.id();
        let fail = |requirement: String| Err(AuxError::OutsideRegion { id, requirement });
        match self {
            Inequality::I2 => {
                if p.n < 4 {
                    return fail(format!("n >= 4 (got n = {})", p.n));
                }
                if (p.beta - n / 4.0).abs() > 1e-12 * p.beta {
                    return fail(format!("beta = n/4 = {} (got beta = {})", n / 4.0, p.beta));
                }
            }
            Inequality::I4 => {
                if p.n < 4 {
                    return fail(format!("n >= 4 (got n = {})", p.n));
                }
            }
            Inequality::I8 => {
                if p.nu > n / 4.0 {
                    return fail(format!("nu <= n/4 (got nu = {}, n = {})", p.nu, p.n));
                }
                if p.beta < n / 4.0 {
                    return fail(format!("beta >= n/4 (got beta = {}, n = {})", p.beta, p.n));
                }
            }
            Inequality::I9 => {
                if p.nu > n / 4.0 {
                    return fail(format!("nu <= n/4 (got nu = {}, n = {})", p.nu, p.n));
                }
            }
            Inequality::I10 | Inequality::I11 => {
                if p.beta <= n / 4.0 {
                    return fail(format!("beta > n/4 (got beta = {}, n = {})", p.beta, p.n));
                }
                let nu = p.beta / (2.0 * p.beta + 1.0);
                if (p.nu - nu).abs() > 1e-12 {
                    return fail(format!("nu = beta/(2beta+1) = {nu} (got nu = {})", p.nu));
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// Evaluates every comparison of the inequality at `x` without checking the region.
    ///
    /// Every comparison is homogeneous in `(x, L)`, so it is evaluated at
    /// `(x/s, L/s)` with `s` chosen to keep every power near unity.
    pub fn evaluate_unchecked(&self, p: &AuxParams, x: f64) -> Vec<Comparison> {
        let (x, l) = match self {
            // the pure-power limits live on the `x <= L` branch, so scale by `x` alone
            Inequality::Lim if x > 0.0 => (1.0, p.l / x),
            _ => scaled(x, p.l),
        };
        let b = p.beta;
        let n = p.n as f64;
        let nu = p.nu;
        match self {
            Inequality::I1 => {
                let h = fam::h(b, l, x);
                let r = b * b * x.powf(2.0 * b);
                vec![Comparison::le("H <= beta^2 x^2beta", h, r, h.abs() + r)]
            }
            Inequality::I2 => {
                let xg = x * fam::g(b, l, x);
                let hh = n / 2.0 * fam::h(b, l, x);
                vec![Comparison::le(
                    "xG - (n/2)H <= 0",
                    xg - hh,
                    0.0,
                    xg.abs() + hh.abs(),
                )]
            }
            Inequality::I3 => {
                let h = fam::h(b, l, x);
                let ph = fam::phi(b, l, x).powi(2);
                let xg = x * fam::g(b, l, x);
                vec![
                    Comparison::le(
                        "phi^2 <= 12 beta H",
                        ph,
                        12.0 * b * h,
                        ph + 12.0 * b * h.abs(),
                    ),
                    Comparison::le(
                        "xG <= 4 beta H",
                        xg,
                        4.0 * b * h,
                        xg.abs() + 4.0 * b * h.abs(),
                    ),
                ]
            }
            Inequality::I4 => {
                let xg = x * fam::g(b, l, x);
                let hh = n / 2.0 * fam::h(b, l, x);
                let f = fam::f(b, l, n, x);
                vec![Comparison::le(
                    "xG - (n/2)H <= f",
                    xg - hh,
                    f,
                    xg.abs() + hh.abs() + f.abs(),
                )]
            }
            Inequality::I5 => {
                let lhs = fam::big_f(b, l, n, x).powf(b);
                let rhs = n * b * fam::phi(b, l, x);
                vec![Comparison::le("F^beta <= n beta phi", lhs, rhs, lhs + rhs)]
            }
            Inequality::I6 => {
                let lhs = fam::big_f(b, l, n, x).powf(2.0 * b);
                let rhs = 4.0 * n * b * fam::h(b, l, x);
                vec![Comparison::le(
                    "F^2beta <= 4 n beta H",
                    lhs,
                    rhs,
                    lhs + rhs.abs(),
                )]
            }
            Inequality::I7 => {
                let xg = x * fam::g(b, l, x);
                let rhs = b * b / (2.0 * b - 1.0) * fam::phi(b, l, x).powi(2);
                vec![Comparison::le(
                    "xG <= beta^2/(2beta-1) phi^2",
                    xg,
                    rhs,
                    xg.abs() + rhs,
                )]
            }
            Inequality::I8 => {
                let xg = x * fam::tilde_g(b, l, nu, x);
                let hh = n / 2.0 * fam::tilde_h(b, l, nu, x);
                let f = fam::tilde_f(b, l, nu, n, x);
                vec![Comparison::le(
                    "xG~ - (n/2)H~ <= f~",
                    xg - hh,
                    f,
                    xg.abs() + hh.abs() + f.abs(),
                )]
            }
            Inequality::I9 => {
                let c1 = comparison_constant(Constant::C1, b, nu, p.n);
                let c2 = comparison_constant(Constant::C2, b, nu, p.n);
                let h = fam::tilde_h(b, l, nu, x);
                let ph = fam::tilde_phi(b, l, nu, x).powi(2);
                let xg = x * fam::tilde_g(b, l, nu, x);
                vec![
                    Comparison::le("phi~^2 <= C1 H~", ph, c1 * h, ph + (c1 * h).abs()),
                    Comparison::le("xG~ <= C2 H~", xg, c2 * h, xg.abs() + (c2 * h).abs()),
                ]
            }
            Inequality::I10 => {
                let c3 = 1.0 / super::c3_inverse(b, nu, p.n);
                let lhs = c3 * fam::tilde_big_f(b, l, nu, n, x).powf(b);
                let rhs = fam::tilde_phi(b, l, nu, x);
                vec![Comparison::le(
                    "C3 F~^beta <= phi~",
                    lhs,
                    rhs,
                    lhs + rhs.abs(),
                )]
            }
            Inequality::I11 => {
                let c4 = comparison_constant(Constant::C4, b, nu, p.n);
                let lhs = fam::tilde_big_f(b, l, nu, n, x).powf(2.0 * b);
                let rhs = c4 * fam::tilde_h(b, l, nu, x);
                vec![Comparison::le(
                    "F~^2beta <= C4 H~",
                    lhs,
                    rhs,
                    lhs + rhs.abs(),
                )]
            }
            Inequality::I12 => {
                let eps = l;
                let d1 = fam::psi_prime(eps, x);
                let d2 = fam::psi_second(eps, x);
                let v = fam::psi(eps, x);
                vec![
                    Comparison::le("psi' >= 0", -d1, 0.0, d1.abs()),
                    Comparison::le("psi' <= 1", d1, 1.0, d1.abs() + 1.0),
                    Comparison::le("psi'' >= 0", -d2, 0.0, d2.abs()),
                    Comparison::le("psi <= x", v, x, v + x),
                    Comparison::le("x - eps <= psi", x - eps, v, x + eps + v),
                ]
            }
            Inequality::I13 => {
                let hh = n / 2.0 * fam::h(b, l, x);
                let xg = x * fam::g(b, l, x);
                let ph = (n - 2.0) / 4.0 * fam::phi(b, l, x).powi(2);
                vec![Comparison::le(
                    "(n/2)H - xG - (n-2)/4 phi^2 <= 0",
                    hh - xg - ph,
                    0.0,
                    hh.abs() + xg.abs() + ph,
                )]
            }
            Inequality::Lim => {
                let big = l.max(x);
                vec![
                    Comparison::eq("phi = x^beta", fam::phi(b, big, x), x.powf(b)),
                    Comparison::eq(
                        "G = beta^2/(2beta-1) x^(2beta-1)",
                        fam::g(b, big, x),
                        b * b / (2.0 * b - 1.0) * x.powf(2.0 * b - 1.0),
                    ),
                    Comparison::eq(
                        "H = beta/(2(2beta-1)) x^2beta",
                        fam::h(b, big, x),
                        b / (2.0 * (2.0 * b - 1.0)) * x.powf(2.0 * b),
                    ),
                ]
            }
        }
    }

    /// Region-checked evaluation.
    pub fn evaluate(&self, p: &AuxParams, x: f64) -> Result<Vec<Comparison>, AuxError> {
        if !(x >= 0.0) {
            return Err(AuxError::NegativeArgument(x));
        }
        self.check_region(p)?;
        Ok(self.evaluate_unchecked(p, x))
    }

    /// `true` when every comparison holds at `x`.
    pub fn check(&self, p: &AuxParams, x: f64) -> Result<bool, AuxError> {
        Ok(self.evaluate(p, x)?.iter().all(Comparison::holds))
    }
}

/// Rescales `(x, L)` so that the active branch has its characteristic length at 1.
fn scaled(x: f64, l: f64) -> (f64, f64) {
    if x > l {
        (x / l, 1.0)
    } else if x > 0.0 {
        (1.0, l / x)
    } else {
        (0.0, 1.0)
    }
}

impl fmt::Display for Inequality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Inequality {
    type Err = AuxError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Inequality::ALL
            .iter()
            .copied()
            .find(|i| i.id().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| AuxError::UnknownInequality(s.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_round_trip() {
        for i in Inequality::ALL {
            assert_eq!(i.id().parse::<Inequality>().unwrap(), i);
        }
        assert!("I14".parse::<Inequality>().is_err());
    }

    #[test]
    fn i1_reference_point() {
        let p = AuxParams::new(2.0, 1.0, 3).unwrap();
        let c = Inequality::I1.evaluate(&p, 2.0).unwrap();
        assert!((c[0].lhs - 11.0 / 3.0).abs() < 1e-13);
        assert_eq!(c[0].rhs, 64.0);
        assert!(c[0].holds());
    }

    #[test]
    fn i3_at_beta_one_below_l() {
        let p = AuxParams::new(1.0, 10.0, 3).unwrap();
        for x in [0.1, 1.0, 5.0, 10.0] {
            let c = Inequality::I3.evaluate(&p, x).unwrap();
            // H = x^2/2, phi^2 = x^2, so 12 H = 6 x^2
            assert!((c[0].rhs - 6.0 * c[0].lhs).abs() <= 1e-12 * c[0].rhs);
            assert!(c.iter().all(Comparison::holds));
        }
    }

    #[test]
    fn region_errors_name_the_requirement() {
        let p = AuxParams::new(1.5, 1.0, 3).unwrap();
        let err = Inequality::I4.check(&p, 2.0).unwrap_err();
        assert!(err.to_string().contains("n >= 4"));
        let err = Inequality::I2
            .check(&AuxParams::new(1.5, 1.0, 4).unwrap(), 2.0)
            .unwrap_err();
        assert!(err.to_string().contains("beta = n/4"));
    }
}
