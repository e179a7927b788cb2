use std::fmt;
use std::path::Path;

use super::jet::Jet;
use super::tabulated::CubicSpline;
use super::GeometryError;

/// Behaviour of the warping function at an end of the radial interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tip {
    /// `phi ~ d` and `|phi'| -> 1`: the end closes up smoothly.
    SmoothPole,
    /// `phi ~ slope * d`: a cone point over a round sphere of radius `slope`.
    Cone { slope: f64 },
    /// `phi` stays positive: a truncated end, closed with zero flux.
    Open,
}

impl Tip {
    pub fn is_degenerate(self) -> bool {
        !matches!(self, Tip::Open)
    }

    /// Slope of `phi` towards the tip, if the cross-sections collapse.
    pub fn slope(self) -> Option<f64> {
        match self {
            Tip::SmoothPole => Some(1.0),
            Tip::Cone { slope } => Some(slope),
            Tip::Open => None,
        }
    }
}

impl fmt::Display for Tip {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tip::SmoothPole => write!(f, "smooth-pole"),
            Tip::Cone { slope } => write!(f, "cone({slope})"),
            Tip::Open => write!(f, "open"),
        }
    }
}

#[derive(Debug, Clone)]
enum Shape {
    Sphere,
    PerturbedSphere { eps: f64 },
    Cone { a: f64 },
    CappedCone { a: f64, radius: f64 },
    Tabulated(CubicSpline),
}

/// Warping function `phi` of the metric `dx^2 + phi(x)^2 g_{S^{n-1}}` on `(0, x_max)`.
#[derive(Debug, Clone)]
pub struct WarpedProfile {
    name: String,
    n: usize,
    x_max: f64,
    shape: Shape,
    tip_left: Tip,
    tip_right: Tip,
}

impl WarpedProfile {
    fn checked_dim(n: usize) -> Result<usize, GeometryError> {
        if n < 3 {
            return Err(GeometryError::InvalidProfile(format!(
                "dimension must be at least 3, got {n}"
            )));
        }
        Ok(n)
    }

    /// Round unit sphere, `phi = sin x` on `(0, pi)`.
    pub fn sphere(n: usize) -> Result<Self, GeometryError> {
        Ok(WarpedProfile {
            name: "sphere".into(),
            n: Self::checked_dim(n)?,
            x_max: std::f64::consts::PI,
            shape: Shape::Sphere,
            tip_left: Tip::SmoothPole,
            tip_right: Tip::SmoothPole,
        })
    }

    /// `phi = sin x (1 + eps sin^2 x)`, smooth at both poles and symmetric about the equator.
    pub fn perturbed_sphere(n: usize, eps: f64) -> Result<Self, GeometryError> {
        if !(eps > -1.0) || !eps.is_finite() {
            return Err(GeometryError::InvalidProfile(format!(
                "perturbed_sphere needs eps > -1, got {eps}"
            )));
        }
        Ok(WarpedProfile {
            name: format!("perturbed_sphere({eps})"),
            n: Self::checked_dim(n)?,
            x_max: std::f64::consts::PI,
            shape: Shape::PerturbedSphere { eps },
            tip_left: Tip::SmoothPole,
            tip_right: Tip::SmoothPole,
        })
    }

    /// Truncated cone `phi = a x` on `(0, 1]`; the outer end is open.
    pub fn cone(n: usize, a: f64) -> Result<Self, GeometryError> {
        if !(a > 0.0) || !a.is_finite() {
            return Err(GeometryError::InvalidProfile(format!(
                "cone slope must be positive, got {a}"
            )));
        }
        Ok(WarpedProfile {
            name: format!("cone({a})"),
            n: Self::checked_dim(n)?,
            x_max: 1.0,
            shape: Shape::Cone { a },
            tip_left: Self::tip_for_slope(a),
            tip_right: Tip::Open,
        })
    }

    /// Cone of slope `a` at `x = 0`, closed off by a smooth pole at `x = pi * radius`:
    /// `phi = R sin(x/R) (a + (1 - a) sin^2(x / 2R))`.
    pub fn capped_cone(n: usize, a: f64, radius: f64) -> Result<Self, GeometryError> {
        if !(a > 0.0) || !(radius > 0.0) || !a.is_finite() || !radius.is_finite() {
            return Err(GeometryError::InvalidProfile(format!(
                "capped_cone needs a > 0 and cap_radius > 0, got ({a}, {radius})"
            )));
        }
        Ok(WarpedProfile {
            name: format!("capped_cone({a}, {radius})"),
            n: Self::checked_dim(n)?,
            x_max: std::f64::consts::PI * radius,
            shape: Shape::CappedCone { a, radius },
            tip_left: Self::tip_for_slope(a),
            tip_right: Tip::SmoothPole,
        })
    }

    /// Profile sampled at points `(x, phi)`; the abscissae are shifted to start at zero.
    /// An end where `phi` vanishes is classified from the spline slope there.
    pub fn tabulated(n: usize, xs: &[f64], phis: &[f64]) -> Result<Self, GeometryError> {
        let n = Self::checked_dim(n)?;
        let x0 = *xs
            .first()
            .ok_or_else(|| GeometryError::Tabulated("no samples".into()))?;
        let shifted: Vec<f64> = xs.iter().map(|x| x - x0).collect();
        let spline = CubicSpline::new(&shifted, phis)?;
        let x_max = *shifted.last().unwrap();
        let scale = phis
            .iter()
            .fold(0.0f64, |m, p| m.max(p.abs()))
            .max(f64::MIN_POSITIVE);
        let classify = |value: f64, slope: f64| {
            if value.abs() > 1e-12 * scale {
                Tip::Open
            } else {
                Self::tip_for_slope(slope.abs())
            }
        };
        let left = spline.eval(0.0);
        let right = spline.eval(x_max);
        Ok(WarpedProfile {
            name: "tabulated".into(),
            n,
            x_max,
            tip_left: classify(left.v, left.d1),
            tip_right: classify(right.v, right.d1),
            shape: Shape::Tabulated(spline),
        })
    }

    /// Reads a two-column `x phi` text file; `#` starts a comment.
    pub fn tabulated_file(n: usize, path: &Path) -> Result<Self, GeometryError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| GeometryError::Tabulated(format!("{}: {e}", path.display())))?;
        let mut xs = Vec::new();
        let mut phis = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|s| !s.is_empty())
                .collect();
            let parse = |s: &str| {
                s.parse::<f64>().map_err(|_| {
                    GeometryError::Tabulated(format!(
                        "{}:{}: cannot parse {s:?} as a number",
                        path.display(),
                        lineno + 1
                    ))
                })
            };
            if cols.len() != 2 {
                return Err(GeometryError::Tabulated(format!(
                    "{}:{}: expected two columns, found {}",
                    path.display(),
                    lineno + 1,
                    cols.len()
                )));
            }
            xs.push(parse(cols[0])?);
            phis.push(parse(cols[1])?);
        }
        let mut p = Self::tabulated(n, &xs, &phis)?;
        p.name = format!("tabulated({})", path.display());
        Ok(p)
    }

    /// Parses a gallery name such as `perturbed_sphere(0.1)` or `capped_cone(0.8, 1)`.
    pub fn from_name(spec: &str, n: usize) -> Result<Self, GeometryError> {
        let spec = spec.trim();
        let (head, args) = match spec.find('(') {
            Some(open) => {
                let close = spec.rfind(')').ok_or_else(|| {
                    GeometryError::InvalidProfile(format!("unbalanced parentheses in {spec:?}"))
                })?;
                (spec[..open].trim(), Some(spec[open + 1..close].trim()))
            }
            None => (spec, None),
        };
        let numbers = |expected: usize| -> Result<Vec<f64>, GeometryError> {
            let args = args.unwrap_or("");
            let vals: Result<Vec<f64>, _> = args
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(str::parse::<f64>)
                .collect();
            let vals = vals
                .map_err(|_| GeometryError::InvalidProfile(format!("bad arguments in {spec:?}")))?;
            if vals.len() != expected {
                return Err(GeometryError::InvalidProfile(format!(
                    "{head} takes {expected} argument(s), got {}",
                    vals.len()
                )));
            }
            Ok(vals)
        };
        match head {
            "sphere" => {
                numbers(0)?;
                Self::sphere(n)
            }
            "perturbed_sphere" => Self::perturbed_sphere(n, numbers(1)?[0]),
            "cone" => Self::cone(n, numbers(1)?[0]),
            "capped_cone" => {
                let v = numbers(2)?;
                Self::capped_cone(n, v[0], v[1])
            }
            "tabulated" => {
                let path = args.unwrap_or("").trim_matches('"');
                Self::tabulated_file(n, Path::new(path))
            }
            other => Err(GeometryError::InvalidProfile(format!(
                "unknown profile {other:?} (expected sphere, perturbed_sphere, cone, capped_cone, tabulated)"
            ))),
        }
    }

    fn tip_for_slope(a: f64) -> Tip {
        if (a - 1.0).abs() <= 1e-9 {
            Tip::SmoothPole
        } else {
            Tip::Cone { slope: a }
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn tip_left(&self) -> Tip {
        self.tip_left
    }

    pub fn tip_right(&self) -> Tip {
        self.tip_right
    }

    /// `phi` and its first two derivatives at `x`.
    pub fn eval(&self, x: f64) -> Jet {
        let t = Jet::variable(x);
        match &self.shape {
            Shape::Sphere => t.sin(),
            Shape::PerturbedSphere { eps } => {
                let s = t.sin();
                s * (s.powi(2) * *eps + 1.0)
            }
            Shape::Cone { a } => t.scale(*a),
            Shape::CappedCone { a, radius } => {
                let r = *radius;
                let body = (t / r).sin().scale(r);
                let blend = (t / (2.0 * r)).sin().powi(2);
                body * (blend * (1.0 - a) + *a)
            }
            Shape::Tabulated(spline) => spline.eval(x),
        }
    }

    pub fn phi(&self, x: f64) -> f64 {
        self.eval(x).v
    }

    /// Scalar curvature of the warped product at `x`:
    /// `-2(n-1) phi''/phi + (n-1)(n-2)(1 - phi'^2)/phi^2`.
    pub fn scalar_curvature(&self, x: f64) -> f64 {
        let j = self.eval(x);
        let n = self.n as f64;
        -2.0 * (n - 1.0) * j.d2 / j.v + (n - 1.0) * (n - 2.0) * (1.0 - j.d1 * j.d1) / (j.v * j.v)
    }

    /// Leading coefficient `c` in `S_0 ~ c / d^2` at a tip with slope `a`.
    pub fn cone_coefficient(&self, tip: Tip) -> f64 {
        match tip.slope() {
            Some(a) => {
                let n = self.n as f64;
                (n - 1.0) * (n - 2.0) * (1.0 - a * a) / (a * a)
            }
            None => 0.0,
        }
    }

    /// True when `S_0` is bounded near both ends (no cone with slope other than one).
    pub fn curvature_bounded(&self) -> bool {
        [self.tip_left, self.tip_right]
            .iter()
            .all(|t| !matches!(t, Tip::Cone { .. }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gallery_names_parse() {
        assert_eq!(
            WarpedProfile::from_name("sphere", 3).unwrap().tip_left(),
            Tip::SmoothPole
        );
        let c = WarpedProfile::from_name("cone(0.8)", 3).unwrap();
        assert_eq!(c.tip_left(), Tip::Cone { slope: 0.8 });
        assert_eq!(c.tip_right(), Tip::Open);
        let cc = WarpedProfile::from_name("capped_cone(0.5, 2)", 4).unwrap();
        assert!((cc.x_max() - 2.0 * std::f64::consts::PI).abs() < 1e-15);
        assert!(WarpedProfile::from_name("torus", 3).is_err());
        assert!(WarpedProfile::from_name("cone(1,2)", 3).is_err());
        assert!(WarpedProfile::from_name("sphere", 2).is_err());
    }

    #[test]
    fn round_sphere_curvature() {
        let p = WarpedProfile::sphere(3).unwrap();
        for &x in &[0.1, 0.9, 1.5, 2.7] {
            assert!((p.scalar_curvature(x) - 6.0).abs() < 1e-12);
        }
        let p4 = WarpedProfile::sphere(4).unwrap();
        assert!((p4.scalar_curvature(1.1) - 12.0).abs() < 1e-12);
    }

    #[test]
    fn flat_and_cone_curvature() {
        let flat = WarpedProfile::cone(3, 1.0).unwrap();
        assert_eq!(flat.tip_left(), Tip::SmoothPole);
        assert!(flat.scalar_curvature(0.37).abs() < 1e-15);
        // (n-1)(n-2)(1-a^2)/a^2 = 2 * 0.36 / 0.64
        let c = WarpedProfile::cone(3, 0.8).unwrap();
        for &x in &[0.01, 0.3, 0.99] {
            assert!((c.scalar_curvature(x) * x * x - 1.125).abs() < 1e-12);
        }
    }

    #[test]
    fn capped_cone_has_cone_slope_and_smooth_cap() {
        let p = WarpedProfile::capped_cone(3, 0.6, 1.0).unwrap();
        let near = p.eval(1e-6);
        assert!((near.d1 - 0.6).abs() < 1e-9);
        let far = p.eval(p.x_max() - 1e-6);
        assert!((far.d1 + 1.0).abs() < 1e-9);
        // bounded curvature near the smooth cap
        let s = p.scalar_curvature(p.x_max() - 1e-3);
        assert!(s.is_finite() && s.abs() < 100.0);
    }
}
