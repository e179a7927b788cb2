//! Scenario files: flat `key = value` lines with dotted keys and `#` comments.
//!
//! ```text
//! profile = perturbed_sphere(0.1)
//! n = 3
//! grid.M = 256
//! flow.T = 5
//! flow.dt = 1e-3
//! monitors.p = 2, 4, 8, inf
//! ```

use std::collections::HashMap;
use std::fmt;
use std::path::PathBuf;

use thiserror::Error;

use crate::flow::FlowConfig;
use crate::geometry::WarpedProfile;
use crate::yamabe::YamabeOptions;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("line {line}, column {column}: {msg}")]
    Syntax {
        line: usize,
        column: usize,
        msg: String,
    },
    #[error("line {line}, column {column}: unknown key {key:?}")]
    UnknownKey {
        line: usize,
        column: usize,
        key: String,
    },
    #[error("line {line}, column {column}: invalid value for {key}: {msg}")]
    InvalidValue {
        line: usize,
        column: usize,
        key: String,
        msg: String,
    },
    #[error("missing required key {0:?}")]
    Missing(&'static str),
    #[error("invalid {key}: {msg}")]
    Invalid { key: String, msg: String },
}

/// Monitors that a scenario can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MonitorKind {
    SMinusDecay,
    ScalLower,
    UUpper,
    ULower,
    SUpper,
    ParabolicSobolev,
    EnergyDecay,
    Moser,
}

impl MonitorKind {
    pub const ALL: [MonitorKind; 8] = [
        MonitorKind::SMinusDecay,
        MonitorKind::ScalLower,
        MonitorKind::UUpper,
        MonitorKind::ULower,
        MonitorKind::SUpper,
        MonitorKind::ParabolicSobolev,
        MonitorKind::EnergyDecay,
        MonitorKind::Moser,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            MonitorKind::SMinusDecay => "s_minus_decay",
            MonitorKind::ScalLower => "scal_lower",
            MonitorKind::UUpper => "u_upper",
            MonitorKind::ULower => "u_lower",
            MonitorKind::SUpper => "s_upper",
            MonitorKind::ParabolicSobolev => "parabolic_sobolev",
            MonitorKind::EnergyDecay => "energy_decay",
            MonitorKind::Moser => "moser",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        MonitorKind::ALL.iter().copied().find(|m| m.name() == s)
    }
}

impl fmt::Display for MonitorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub name: String,
    /// Gallery name such as `sphere` or `cone(0.8)`.
    pub profile: String,
    pub n: usize,
    pub grid_m: usize,
    /// Grading exponent; chosen from the tip types when absent.
    pub grid_gamma: Option<f64>,
    pub flow: FlowConfig,
    pub monitors: Vec<MonitorKind>,
    pub p_exponents: Vec<f64>,
    /// Also run at `(2M, dt/2)` and compare.
    pub refinement: bool,
    pub moser_beta: f64,
    pub moser_levels: usize,
    pub audit_q: Option<f64>,
    pub yamabe: YamabeOptions,
    pub output_dir: Option<PathBuf>,
    pub plots: bool,
    pub seed: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            name: "scenario".into(),
            profile: "sphere".into(),
            n: 3,
            grid_m: 256,
            grid_gamma: None,
            flow: flow_defaults(1.0, 1e-3),
            monitors: MonitorKind::ALL.to_vec(),
            p_exponents: vec![2.0, 4.0, 8.0, f64::INFINITY],
            refinement: true,
            moser_beta: 2.0,
            moser_levels: 4,
            audit_q: None,
            yamabe: YamabeOptions::default(),
            output_dir: None,
            plots: true,
            seed: YamabeOptions::default().seed,
        }
    }
}

fn flow_defaults(t: f64, dt: f64) -> FlowConfig {
    FlowConfig {
        cfl: 0.5,
        ..FlowConfig::fixed(t, dt)
    }
}

pub const KEYS: [&str; 24] = [
    "name",
    "profile",
    "n",
    "seed",
    "grid.M",
    "grid.gamma",
    "flow.T",
    "flow.dt",
    "flow.dt_min",
    "flow.dt_max",
    "flow.cfl",
    "flow.vol_tol",
    "flow.positivity_floor",
    "flow.snapshot_every",
    "flow.checkpoint_every",
    "monitors.list",
    "monitors.p",
    "monitors.refinement",
    "moser.beta",
    "moser.levels",
    "audit.q",
    "yamabe.max_iter",
    "yamabe.multistart",
    "output.dir",
];

/// `output.plots` is accepted in addition to [`KEYS`].
const EXTRA_KEYS: [&str; 1] = ["output.plots"];

fn parse_f64(s: &str) -> Result<f64, String> {
    match s.trim() {
        "inf" | "infinity" => Ok(f64::INFINITY),
        t => t.parse::<f64>().map_err(|e| format!("{e} ({t:?})")),
    }
}

fn parse_usize(s: &str) -> Result<usize, String> {
    s.trim()
        .parse::<usize>()
        .map_err(|e| format!("{e} ({:?})", s.trim()))
}

fn parse_bool(s: &str) -> Result<bool, String> {
    match s.trim() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        t => Err(format!("expected true or false, got {t:?}")),
    }
}

fn parse_seed(s: &str) -> Result<u64, String> {
    let t = s.trim();
    match t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16).map_err(|e| format!("{e} ({t:?})")),
        None => t.parse::<u64>().map_err(|e| format!("{e} ({t:?})")),
    }
}

fn positive(v: f64) -> Result<f64, String> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("must be a positive number, got {v}"))
    }
}

/// Error raised by [`ScenarioConfig::set`], positioned later by the caller.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SetError {
    #[error("unknown key")]
    UnknownKey,
    #[error("{0}")]
    Invalid(String),
}

impl ScenarioConfig {
    /// Assigns one key. Used by the parser and by parameter sweeps.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), SetError> {
        let inv = SetError::Invalid;
        let v = value.trim();
        match key {
            "name" => self.name = v.to_string(),
            "profile" => self.profile = v.to_string(),
            "n" => self.n = parse_usize(v).map_err(inv)?,
            "seed" => {
                self.seed = parse_seed(v).map_err(inv)?;
                self.yamabe.seed = self.seed;
            }
            "grid.M" => self.grid_m = parse_usize(v).map_err(inv)?,
            "grid.gamma" => self.grid_gamma = Some(parse_f64(v).and_then(positive).map_err(inv)?),
            "flow.T" => self.flow.t_final = parse_f64(v).and_then(positive).map_err(inv)?,
            "flow.dt" => {
                let dt = parse_f64(v).and_then(positive).map_err(inv)?;
                self.flow.dt_init = dt;
                self.flow.dt_max = dt;
                self.flow.dt_min = self.flow.dt_min.min(dt);
            }
            "flow.dt_min" => self.flow.dt_min = parse_f64(v).and_then(positive).map_err(inv)?,
            "flow.dt_max" => self.flow.dt_max = parse_f64(v).and_then(positive).map_err(inv)?,
            "flow.cfl" => self.flow.cfl = parse_f64(v).and_then(positive).map_err(inv)?,
            "flow.vol_tol" => self.flow.vol_tol = parse_f64(v).and_then(positive).map_err(inv)?,
            "flow.positivity_floor" => {
                self.flow.positivity_floor = parse_f64(v).and_then(positive).map_err(inv)?
            }
            "flow.snapshot_every" => self.flow.snapshot_every = parse_usize(v).map_err(inv)?,
            "flow.checkpoint_every" => self.flow.checkpoint_every = parse_usize(v).map_err(inv)?,
            "monitors.list" => {
                let mut list = Vec::new();
                for item in v.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                    if item == "all" {
                        list.extend(MonitorKind::ALL);
                    } else {
                        list.push(
                            MonitorKind::from_name(item)
                                .ok_or_else(|| inv(format!("unknown monitor {item:?}")))?,
                        );
                    }
                }
                self.monitors = list;
            }
            "monitors.p" => {
                let ps: Result<Vec<f64>, String> = v.split(',').map(parse_f64).collect();
                let ps = ps.map_err(inv)?;
                if let Some(p) = ps.iter().find(|p| !(**p >= 2.0)) {
                    return Err(inv(format!("exponents must be >= 2, got {p}")));
                }
                self.p_exponents = ps;
            }
            "monitors.refinement" => self.refinement = parse_bool(v).map_err(inv)?,
            "moser.beta" => self.moser_beta = parse_f64(v).map_err(inv)?,
            "moser.levels" => self.moser_levels = parse_usize(v).map_err(inv)?,
            "audit.q" => self.audit_q = Some(parse_f64(v).and_then(positive).map_err(inv)?),
            "yamabe.max_iter" => self.yamabe.max_iter = parse_usize(v).map_err(inv)?,
            "yamabe.multistart" => self.yamabe.multistart = parse_usize(v).map_err(inv)?,
            "output.dir" => self.output_dir = Some(PathBuf::from(v)),
            "output.plots" => self.plots = parse_bool(v).map_err(inv)?,
            _ => return Err(SetError::UnknownKey),
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = ScenarioConfig::default();
        let mut seen: HashMap<String, (usize, usize)> = HashMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("");
            if content.trim().is_empty() {
                continue;
            }
            let indent = content.len() - content.trim_start().len();
            let Some(eq) = content.find('=') else {
                return Err(ConfigError::Syntax {
                    line,
                    column: indent + 1,
                    msg: "expected `key = value`".into(),
                });
            };
            let key = content[..eq].trim();
            let value_col =
                eq + 2 + (content[eq + 1..].len() - content[eq + 1..].trim_start().len());
            if key.is_empty() {
                return Err(ConfigError::Syntax {
                    line,
                    column: indent + 1,
                    msg: "missing key before `=`".into(),
                });
            }
            if key.contains(char::is_whitespace) {
                return Err(ConfigError::Syntax {
                    line,
                    column: indent + 1,
                    msg: format!("key {key:?} contains whitespace"),
                });
            }
            let value = content[eq + 1..].trim();
            if value.is_empty() {
                return Err(ConfigError::Syntax {
                    line,
                    column: value_col,
                    msg: format!("missing value for {key}"),
                });
            }
            if let Some((l, _)) = seen.get(key) {
                return Err(ConfigError::Syntax {
                    line,
                    column: indent + 1,
                    msg: format!("duplicate key {key} (first set on line {l})"),
                });
            }
            seen.insert(key.to_string(), (line, value_col));
            cfg.set(key, value).map_err(|e| match e {
                SetError::UnknownKey => ConfigError::UnknownKey {
                    line,
                    column: indent + 1,
                    key: key.to_string(),
                },
                SetError::Invalid(msg) => ConfigError::InvalidValue {
                    line,
                    column: value_col,
                    key: key.to_string(),
                    msg,
                },
            })?;
        }
        if !seen.contains_key("profile") {
            return Err(ConfigError::Missing("profile"));
        }
        cfg.validate().map_err(|(key, msg)| match seen.get(key) {
            Some(&(line, column)) => ConfigError::InvalidValue {
                line,
                column,
                key: key.to_string(),
                msg,
            },
            None => ConfigError::Invalid {
                key: key.to_string(),
                msg,
            },
        })?;
        Ok(cfg)
    }

    /// Cross-key checks: the profile exists in dimension `n`, the grid and step sizes are usable.
    pub fn validate(&self) -> Result<(), (&'static str, String)> {
        WarpedProfile::from_name(&self.profile, self.n).map_err(|e| ("profile", e.to_string()))?;
        if self.grid_m < 16 {
            return Err((
                "grid.M",
                format!("need at least 16 cells, got {}", self.grid_m),
            ));
        }
        if let Some(g) = self.grid_gamma {
            if g < 1.0 {
                return Err((
                    "grid.gamma",
                    format!("grading exponent must be >= 1, got {g}"),
                ));
            }
        }
        self.flow
            .validate()
            .map_err(|e| ("flow.dt", e.to_string()))?;
        if !(self.moser_beta > 1.0) {
            return Err((
                "moser.beta",
                format!("must exceed 1, got {}", self.moser_beta),
            ));
        }
        if !(1..=8).contains(&self.moser_levels) {
            return Err((
                "moser.levels",
                format!("must lie in 1..=8, got {}", self.moser_levels),
            ));
        }
        Ok(())
    }

    pub fn is_known_key(key: &str) -> bool {
        KEYS.contains(&key) || EXTRA_KEYS.contains(&key)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_a_scenario() {
        let cfg = ScenarioConfig::parse(
            "# smooth\nprofile = perturbed_sphere(0.1)\nn = 3\ngrid.M = 128\nflow.T = 0.5 # short\nflow.dt = 5e-4\nmonitors.p = 2, inf\nseed = 0x10\n",
        )
        .unwrap();
        assert_eq!(cfg.profile, "perturbed_sphere(0.1)");
        assert_eq!(cfg.grid_m, 128);
        assert_eq!(cfg.flow.t_final, 0.5);
        assert_eq!(cfg.flow.dt_max, 5e-4);
        assert_eq!(cfg.p_exponents, vec![2.0, f64::INFINITY]);
        assert_eq!(cfg.seed, 16);
    }

    #[test]
    fn errors_carry_positions() {
        let e = ScenarioConfig::parse("profile = sphere\ngrid.M 12\n").unwrap_err();
        assert_eq!(
            e,
            ConfigError::Syntax {
                line: 2,
                column: 1,
                msg: "expected `key = value`".into()
            }
        );
        let e = ScenarioConfig::parse("profile = sphere\n  grid.N = 12\n").unwrap_err();
        assert!(matches!(
            e,
            ConfigError::UnknownKey {
                line: 2,
                column: 3,
                ..
            }
        ));
        let e = ScenarioConfig::parse("profile = sphere\nflow.T = abc\n").unwrap_err();
        assert!(
            matches!(
                e,
                ConfigError::InvalidValue {
                    line: 2,
                    column: 10,
                    ..
                }
            ),
            "{e:?}"
        );
        let e = ScenarioConfig::parse("profile = torus\n").unwrap_err();
        assert!(matches!(e, ConfigError::InvalidValue { line: 1, .. }));
        assert_eq!(
            ScenarioConfig::parse("n = 3\n").unwrap_err(),
            ConfigError::Missing("profile")
        );
    }

    #[test]
    fn every_listed_key_is_settable() {
        let samples = [
            ("name", "x"),
            ("profile", "sphere"),
            ("n", "4"),
            ("seed", "7"),
            ("grid.M", "64"),
            ("grid.gamma", "2"),
            ("flow.T", "1"),
            ("flow.dt", "1e-3"),
            ("flow.dt_min", "1e-9"),
            ("flow.dt_max", "1e-3"),
            ("flow.cfl", "0.5"),
            ("flow.vol_tol", "1e-10"),
            ("flow.positivity_floor", "1e-12"),
            ("flow.snapshot_every", "5"),
            ("flow.checkpoint_every", "0"),
            ("monitors.list", "u_upper, moser"),
            ("monitors.p", "2,4"),
            ("monitors.refinement", "false"),
            ("moser.beta", "2"),
            ("moser.levels", "3"),
            ("audit.q", "4.5"),
            ("yamabe.max_iter", "100"),
            ("yamabe.multistart", "2"),
            ("output.dir", "out"),
        ];
        let mut cfg = ScenarioConfig::default();
        for (k, v) in samples {
            assert!(ScenarioConfig::is_known_key(k));
            cfg.set(k, v).unwrap();
        }
        assert_eq!(samples.len(), KEYS.len());
    }
}
