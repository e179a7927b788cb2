use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::catalogue::Inequality;
use super::families as fam;
use super::AuxParams;

pub const DEFAULT_SEED: u64 = 0x594601;

const BETA_RANGE: (f64, f64) = (1.0, 50.0);
const L_RANGE: (f64, f64) = (1e-3, 1e3);
const X_RANGE: (f64, f64) = (1e-6, 1e6);
const NU_FLOOR: f64 = 0.01;
const N_MAX: usize = 12;

/// Where the sampler draws parameters from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleRegion {
    /// Inside the region where the inequality is claimed.
    Declared,
    /// Just across the boundary of the declared region: `beta != n/4` for `I2`, `n = 3` for
    /// `I4`. Other inequalities have no such boundary and are sampled as declared.
    Outside,
}

/// Seeded log-uniform sampler over `(beta, L, x, nu, n)`.
#[derive(Debug, Clone)]
pub struct Sampler {
    rng: ChaCha8Rng,
    region: SampleRegion,
}

impl Sampler {
    pub fn new(seed: u64, region: SampleRegion) -> Self {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
            region,
        }
    }

    pub fn region(&self) -> SampleRegion {
        self.region
    }

    fn log_uniform(&mut self, (lo, hi): (f64, f64)) -> f64 {
        (self.rng.gen::<f64>() * (hi / lo).ln()).exp() * lo
    }

    /// Draws one parameter set and evaluation point for `ineq`.
    pub fn draw(&mut self, ineq: Inequality) -> (AuxParams, f64) {
        let outside = self.region == SampleRegion::Outside;
        let n = match (ineq, outside) {
            (Inequality::I4, true) => 3,
            (Inequality::I2, _) | (Inequality::I4, false) => self.rng.gen_range(4..=N_MAX),
            _ => self.rng.gen_range(3..=N_MAX),
        };
        let nf = n as f64;
        let beta = match ineq {
            Inequality::I2 if outside => loop {
                let u = self.log_uniform((1e-4, 1.0));
                let b = if self.rng.gen::<bool>() {
                    nf / 4.0 * (1.0 + u)
                } else {
                    nf / 4.0 / (1.0 + u)
                };
                if b >= 1.0 {
                    break b;
                }
            },
            Inequality::I2 => nf / 4.0,
            Inequality::I8 | Inequality::I10 | Inequality::I11 => {
                self.log_uniform((BETA_RANGE.0.max(nf / 4.0), BETA_RANGE.1))
            }
            _ => self.log_uniform(BETA_RANGE),
        };
        let nu = match ineq {
            Inequality::I8 | Inequality::I9 => loop {
                let v = self.log_uniform((NU_FLOOR, 1f64.min(nf / 4.0)));
                if (v - 0.5).abs() > 1e-6 {
                    break v;
                }
            },
            Inequality::I10 | Inequality::I11 => beta / (2.0 * beta + 1.0),
            _ => 1.0,
        };
        let l = self.log_uniform(L_RANGE);
        let x = self.log_uniform(X_RANGE);
        (AuxParams { beta, l, nu, n }, x)
    }
}

/// Summary of a sampling run over one inequality.
#[derive(Debug, Clone, PartialEq)]
pub struct SurveyRow {
    pub id: &'static str,
    pub samples: usize,
    pub violations: usize,
    /// Largest relative excess seen; negative when every sample held with room to spare.
    pub worst_margin: f64,
    pub first_violation: Option<(AuxParams, f64)>,
}

impl SurveyRow {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// First sampled violation of `ineq`, or `None` after `budget` samples.
pub fn find_counterexample(
    ineq: Inequality,
    sampler: &mut Sampler,
    budget: usize,
) -> Option<(AuxParams, f64)> {
    (0..budget)
        .map(|_| sampler.draw(ineq))
        .find(|(p, x)| !ineq.evaluate_unchecked(p, *x).iter().all(|c| c.holds()))
}

/// Samples `ineq` `budget` times and tallies violations.
pub fn survey(ineq: Inequality, sampler: &mut Sampler, budget: usize) -> SurveyRow {
    let mut row = SurveyRow {
        id: ineq.id(),
        samples: budget,
        violations: 0,
        worst_margin: f64::NEG_INFINITY,
        first_violation: None,
    };
    for _ in 0..budget {
        let (p, x) = sampler.draw(ineq);
        let cmp = ineq.evaluate_unchecked(&p, x);
        for c in &cmp {
            row.worst_margin = row.worst_margin.max(c.margin());
        }
        if !cmp.iter().all(|c| c.holds()) {
            row.violations += 1;
            row.first_violation.get_or_insert((p, x));
        }
    }
    row
}

/// `L`-independent constants in the comparisons of the tilde family with `H~`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Constant {
    /// `sup phi~^2 / H~`
    C1,
    /// `sup x G~ / H~`
    C2,
    /// `sup F~^{2 beta} / H~`
    C4,
}

const SEARCH_DECADES: f64 = 12.0;
const SEARCH_POINTS: usize = 360;

/// Supremum over `x` of the ratio defining `constant`, for the tilde family with `(beta, nu, n)`.
///
/// By homogeneity the ratio depends only on `r = x / L` and is constant for `r <= 1`, so the
/// search runs over `r` in `[1, 10^12]` on a logarithmic grid and refines the best cell with a
/// golden-section search.
pub fn comparison_constant(constant: Constant, beta: f64, nu: f64, n: usize) -> f64 {
    let nf = n as f64;
    let ratio = |r: f64| {
        let h = fam::tilde_h(beta, 1.0, nu, r);
        let num = match constant {
            Constant::C1 => fam::tilde_phi(beta, 1.0, nu, r).powi(2),
            Constant::C2 => r * fam::tilde_g(beta, 1.0, nu, r),
            Constant::C4 => fam::tilde_big_f(beta, 1.0, nu, nf, r).powf(2.0 * beta),
        };
        num / h
    };
    let at = |k: f64| ratio(10f64.powf(SEARCH_DECADES * k / SEARCH_POINTS as f64));
    let (mut best_k, mut best) = (0usize, at(0.0));
    for k in 1..=SEARCH_POINTS {
        let v = at(k as f64);
        if v > best {
            best = v;
            best_k = k;
        }
    }
    let (mut a, mut b) = (
        best_k.saturating_sub(1) as f64,
        (best_k + 1).min(SEARCH_POINTS) as f64,
    );
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut c, mut d) = (b - g * (b - a), a + g * (b - a));
    let (mut fc, mut fd) = (at(c), at(d));
    for _ in 0..80 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = at(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = at(d);
        }
    }
    best.max(fc).max(fd)
}
