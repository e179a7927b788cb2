use super::GeometryError;

/// Which ends of the interval the nodes cluster towards.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Clustering {
    Left,
    Right,
    Both,
}

/// Cell-centred radial grid on `(0, x_max)`.
///
/// The interval is split into `M + 1` cells whose faces sit at `x_max * g(j / (M + 1))`
/// and whose nodes sit at `x_max * g((i + 1/2) / (M + 1))`, where `g` is the grading map.
/// No node sits on an end point.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    m: usize,
    gamma: f64,
    x_max: f64,
    clustering: Clustering,
    faces: Vec<f64>,
    nodes: Vec<f64>,
}

impl RadialGrid {
    pub const MIN_CELLS: usize = 16;

    pub fn new(
        m: usize,
        gamma: f64,
        x_max: f64,
        clustering: Clustering,
    ) -> Result<Self, GeometryError> {
        if m < Self::MIN_CELLS {
            return Err(GeometryError::InvalidGrid(format!(
                "M must be at least {}, got {m}",
                Self::MIN_CELLS
            )));
        }
        if !(gamma >= 1.0) || !gamma.is_finite() {
            return Err(GeometryError::InvalidGrid(format!(
                "grading exponent must be >= 1, got {gamma}"
            )));
        }
        if !(x_max > 0.0) || !x_max.is_finite() {
            return Err(GeometryError::InvalidGrid(format!(
                "x_max must be positive, got {x_max}"
            )));
        }
        let cells = (m + 1) as f64;
        let map = |s: f64| x_max * grade(s, gamma, clustering);
        let faces: Vec<f64> = (0..=m + 1).map(|j| map(j as f64 / cells)).collect();
        let nodes: Vec<f64> = (0..=m).map(|i| map((i as f64 + 0.5) / cells)).collect();
        let grid = RadialGrid {
            m,
            gamma,
            x_max,
            clustering,
            faces,
            nodes,
        };
        if let Some(i) = grid.nodes.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(GeometryError::InvalidGrid(format!(
                "nodes {i} and {} coincide at this resolution",
                i + 1
            )));
        }
        Ok(grid)
    }

    pub fn uniform(m: usize, x_max: f64) -> Result<Self, GeometryError> {
        Self::new(m, 1.0, x_max, Clustering::Both)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn clustering(&self) -> Clustering {
        self.clustering
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Cell boundaries, `len() + 1` of them, starting at `0` and ending at `x_max`.
    pub fn faces(&self) -> &[f64] {
        &self.faces
    }

    /// Largest cell width.
    pub fn max_width(&self) -> f64 {
        self.faces
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(0.0, f64::max)
    }
}

fn grade(s: f64, gamma: f64, clustering: Clustering) -> f64 {
    match clustering {
        Clustering::Left => s.powf(gamma),
        Clustering::Right => 1.0 - (1.0 - s).powf(gamma),
        Clustering::Both => {
            if s <= 0.5 {
                0.5 * (2.0 * s).powf(gamma)
            } else {
                1.0 - 0.5 * (2.0 * (1.0 - s)).powf(gamma)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_grid_is_evenly_spaced() {
        let g = RadialGrid::uniform(31, 1.0).unwrap();
        assert_eq!(g.len(), 32);
        for (i, x) in g.nodes().iter().enumerate() {
            assert!((x - (i as f64 + 0.5) / 32.0).abs() < 1e-15);
        }
        for c in [Clustering::Left, Clustering::Right] {
            assert_eq!(RadialGrid::new(31, 1.0, 1.0, c).unwrap().nodes().len(), 32);
        }
    }

    #[test]
    fn graded_grid_clusters_at_tip() {
        let g = RadialGrid::new(64, 2.0, 1.0, Clustering::Left).unwrap();
        let first = g.nodes()[1] - g.nodes()[0];
        let last = g.nodes()[64] - g.nodes()[63];
        assert!(first < last / 20.0);
        assert!(g.nodes()[0] > 0.0 && *g.nodes().last().unwrap() < 1.0);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(RadialGrid::new(8, 1.0, 1.0, Clustering::Both).is_err());
        assert!(RadialGrid::new(32, 0.5, 1.0, Clustering::Both).is_err());
        assert!(RadialGrid::new(32, 1.0, -1.0, Clustering::Both).is_err());
    }
}
