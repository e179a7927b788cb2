//! Rotationally symmetric model manifolds `dx^2 + phi(x)^2 g_{S^{n-1}}` and their discretization.

mod audit;
mod grid;
mod jet;
mod profile;
mod tabulated;

pub use audit::{audit_assumptions, default_q, AuditCheck, AuditReport};
pub use grid::{Clustering, RadialGrid};
pub use jet::Jet;
pub use profile::{Tip, WarpedProfile};
pub use tabulated::CubicSpline;

use crate::discretization::Field;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("warping function is not positive at node {node} (x = {x}, phi = {phi})")]
    NonPositivePhi { node: usize, x: f64, phi: f64 },
    #[error("non-finite derivative of the warping function at node {node} (x = {x})")]
    NonFiniteDerivative { node: usize, x: f64 },
    #[error("invalid profile: {0}")]
    InvalidProfile(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("tabulated profile: {0}")]
    Tabulated(String),
}

/// Volume of the unit round sphere `S^k`.
pub fn unit_sphere_volume(k: usize) -> f64 {
    use std::f64::consts::PI;
    match k {
        0 => 2.0,
        1 => 2.0 * PI,
        _ => 2.0 * PI / (k as f64 - 1.0) * unit_sphere_volume(k - 2),
    }
}

const GAUSS5: [(f64, f64); 5] = [
    (0.0, 0.568_888_888_888_888_9),
    (-0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (-0.906_179_845_938_664, 0.236_926_885_056_189_1),
    (0.906_179_845_938_664, 0.236_926_885_056_189_1),
];

/// Grid, measure and background curvature of a profile after rescaling to unit volume.
///
/// All stored lengths, weights and curvatures refer to the rescaled metric `c^2 g`, with
/// `c = Vol^{-1/n}` fixed once at construction.
#[derive(Debug, Clone)]
pub struct DiscretizedManifold {
    profile: WarpedProfile,
    grid: RadialGrid,
    scale: f64,
    raw_volume: f64,
    nodes: Vec<f64>,
    faces: Vec<f64>,
    mu: Vec<f64>,
    kappa: Vec<f64>,
    s0: Vec<f64>,
    phi_nodes: Vec<f64>,
}

impl DiscretizedManifold {
    pub fn profile(&self) -> &WarpedProfile {
        &self.profile
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.profile.dim()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Homothety factor `c` applied to lengths.
    pub fn length_scale(&self) -> f64 {
        self.scale
    }

    /// Volume of the profile before normalization.
    pub fn raw_volume(&self) -> f64 {
        self.raw_volume
    }

    pub fn volume(&self) -> f64 {
        self.mu.iter().sum()
    }

    /// Node positions in the rescaled metric.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Cell boundaries in the rescaled metric.
    pub fn faces(&self) -> &[f64] {
        &self.faces
    }

    /// Quadrature weight of each cell for `dmu`.
    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    /// Flux coefficients `omega * phi^{n-1} / dx` on the faces between consecutive nodes.
    pub fn kappa(&self) -> &[f64] {
        &self.kappa
    }

    pub fn s0(&self) -> &[f64] {
        &self.s0
    }

    /// Warping function at the nodes, rescaled.
    pub fn phi_nodes(&self) -> &[f64] {
        &self.phi_nodes
    }

    /// Largest cell width, rescaled.
    pub fn h_max(&self) -> f64 {
        self.scale * self.grid.max_width()
    }

    pub fn s0_field(&self) -> Field {
        Field::new(self.s0.clone())
    }
}

/// Builds the unit-volume discretization of `profile` on `grid`.
pub fn build_manifold(
    profile: WarpedProfile,
    grid: RadialGrid,
) -> Result<DiscretizedManifold, GeometryError> {
    if (grid.x_max() - profile.x_max()).abs() > 1e-12 * profile.x_max() {
        return Err(GeometryError::InvalidGrid(format!(
            "grid spans (0, {}) but the profile lives on (0, {})",
            grid.x_max(),
            profile.x_max()
        )));
    }
    let n = profile.dim();
    let nf = n as f64;
    let omega = unit_sphere_volume(n - 1);
    let xs = grid.nodes();
    let faces = grid.faces();

    let mut phi_nodes = Vec::with_capacity(xs.len());
    for (i, &x) in xs.iter().enumerate() {
        let phi = profile.phi(x);
        if !(phi > 0.0) {
            return Err(GeometryError::NonPositivePhi { node: i, x, phi });
        }
        phi_nodes.push(phi);
    }

    let mut mu_raw = Vec::with_capacity(xs.len());
    for (i, w) in faces.windows(2).enumerate() {
        let (a, b) = (w[0], w[1]);
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = 0.0;
        for &(t, wt) in &GAUSS5 {
            let x = mid + half * t;
            let phi = profile.phi(x);
            if !(phi > 0.0) {
                return Err(GeometryError::NonPositivePhi { node: i, x, phi });
            }
            acc += wt * phi.powi(n as i32 - 1);
        }
        mu_raw.push(omega * half * acc);
    }
    let raw_volume: f64 = mu_raw.iter().sum();
    let scale = raw_volume.powf(-1.0 / nf);

    let kappa_raw: Vec<f64> = (0..xs.len() - 1)
        .map(|i| omega * profile.phi(faces[i + 1]).powi(n as i32 - 1) / (xs[i + 1] - xs[i]))
        .collect();

    let mut mu: Vec<f64> = mu_raw.iter().map(|m| m / raw_volume).collect();
    let total: f64 = mu.iter().sum();
    mu.iter_mut().for_each(|m| *m /= total);
    let kscale = scale.powi(n as i32 - 2) / total;
    let kappa = kappa_raw.iter().map(|k| k * kscale).collect();

    let mut s0 = Vec::with_capacity(xs.len());
    for (i, &x) in xs.iter().enumerate() {
        let s = profile.scalar_curvature(x);
        if !s.is_finite() {
            return Err(GeometryError::NonFiniteDerivative { node: i, x });
        }
        s0.push(s / (scale * scale));
    }

    Ok(DiscretizedManifold {
        nodes: xs.iter().map(|x| x * scale).collect(),
        faces: faces.iter().map(|x| x * scale).collect(),
        phi_nodes: phi_nodes.iter().map(|p| p * scale).collect(),
        profile,
        grid,
        scale,
        raw_volume,
        mu,
        kappa,
        s0,
    })
}

/// Default grid for a profile: uniform for smooth ends, `gamma = 2` towards cone tips.
pub fn default_grid(
    profile: &WarpedProfile,
    m: usize,
    gamma: Option<f64>,
) -> Result<RadialGrid, GeometryError> {
    let cone = |t: Tip| matches!(t, Tip::Cone { .. });
    let gamma = gamma.unwrap_or(if cone(profile.tip_left()) || cone(profile.tip_right()) {
        2.0
    } else {
        1.0
    });
    let clustering = match (
        profile.tip_left().is_degenerate(),
        profile.tip_right().is_degenerate(),
    ) {
        (true, false) => Clustering::Left,
        (false, true) => Clustering::Right,
        _ => Clustering::Both,
    };
    RadialGrid::new(m, gamma, profile.x_max(), clustering)
}

/// Background scalar curvature at the nodes, recomputed from the profile.
pub fn scalar_curvature_g0(manifold: &DiscretizedManifold) -> Result<Field, GeometryError> {
    let c2 = manifold.length_scale().powi(2);
    manifold
        .grid()
        .nodes()
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let s = manifold.profile().scalar_curvature(x);
            if s.is_finite() {
                Ok(s / c2)
            } else {
                Err(GeometryError::NonFiniteDerivative { node: i, x })
            }
        })
        .collect::<Result<Vec<_>, _>>()
        .map(Field::new)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_volumes() {
        use std::f64::consts::PI;
        assert!((unit_sphere_volume(2) - 4.0 * PI).abs() < 1e-14);
        assert!((unit_sphere_volume(3) - 2.0 * PI * PI).abs() < 1e-13);
        assert!((unit_sphere_volume(4) - 8.0 * PI * PI / 3.0).abs() < 1e-13);
    }

    #[test]
    fn round_sphere_normalizes_to_unit_volume() {
        let p = WarpedProfile::sphere(3).unwrap();
        let g = default_grid(&p, 256, None).unwrap();
        let m = build_manifold(p, g).unwrap();
        assert!((m.volume() - 1.0).abs() < 1e-12);
        let expected = 6.0 * (2.0 * std::f64::consts::PI.powi(2)).powf(2.0 / 3.0);
        assert!(m
            .s0()
            .iter()
            .all(|s| (s - expected).abs() < 1e-9 * expected));
    }

    #[test]
    fn grid_must_match_profile() {
        let p = WarpedProfile::sphere(3).unwrap();
        let g = RadialGrid::uniform(32, 1.0).unwrap();
        assert!(build_manifold(p, g).is_err());
    }
}
