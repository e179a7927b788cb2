use std::fmt::Write as _;
use std::path::Path;

use sha2::{Digest, Sha256};
use thiserror::Error;

use super::{Controller, FlowConfig};
use crate::discretization::Field;
use crate::geometry::DiscretizedManifold;
use crate::yamabe::FlowState;

const HEADER: &str = "YFLOW v1";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CheckpointError {
    #[error("checkpoint i/o: {0}")]
    Io(String),
    #[error("checkpoint parse error at byte {offset}: {msg}")]
    Parse { offset: usize, msg: String },
    #[error("checkpoint was written for a different configuration (file hash {found}, expected {expected})")]
    HashMismatch { expected: String, found: String },
    #[error("checkpoint has {found} nodes but the grid has {expected}")]
    NodeCount { expected: usize, found: usize },
}

/// Identifies the manifold and the dynamics of a run; output settings and `T` are excluded.
pub fn config_hash(manifold: &DiscretizedManifold, config: &FlowConfig) -> String {
    let grid = manifold.grid();
    let canonical = format!(
        "profile={};n={};M={};gamma={:e};clustering={:?};cfl={:e};dt_init={:e};dt_min={:e};dt_max={:e};vol_tol={:e};floor={:e}",
        manifold.profile().name(),
        manifold.dim(),
        grid.m(),
        grid.gamma(),
        grid.clustering(),
        config.cfl,
        config.dt_init,
        config.dt_min,
        config.dt_max,
        config.vol_tol,
        config.positivity_floor,
    );
    let digest = Sha256::digest(canonical.as_bytes());
    digest.iter().take(16).fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// Parsed contents of a checkpoint file.
#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub hash: String,
    pub t: f64,
    pub controller: Controller,
    pub u: Vec<f64>,
}

impl Checkpoint {
    pub fn render(&self) -> String {
        let mut out = String::with_capacity(32 * (self.u.len() + 8));
        let _ = writeln!(out, "{HEADER}");
        let _ = writeln!(out, "hash {}", self.hash);
        let _ = writeln!(out, "t {:.16e}", self.t);
        let _ = writeln!(out, "dt {:.16e}", self.controller.dt);
        let _ = writeln!(out, "step {}", self.controller.step);
        let _ = writeln!(out, "nodes {}", self.u.len());
        for v in &self.u {
            let _ = writeln!(out, "{v:.16e}");
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, CheckpointError> {
        let mut lines = Lines { text, offset: 0 };
        let (off, header) = lines.next_line()?;
        if header != HEADER {
            return Err(CheckpointError::Parse {
                offset: off,
                msg: format!("expected header {HEADER:?}, found {header:?}"),
            });
        }
        let hash = lines.field("hash")?.1.to_string();
        let t = lines.number("t")?;
        let dt = lines.number("dt")?;
        let (off, step) = lines.field("step")?;
        let step = step.parse::<usize>().map_err(|_| CheckpointError::Parse {
            offset: off,
            msg: format!("bad step count {step:?}"),
        })?;
        let (off, count) = lines.field("nodes")?;
        let count = count.parse::<usize>().map_err(|_| CheckpointError::Parse {
            offset: off,
            msg: format!("bad node count {count:?}"),
        })?;
        let mut u = Vec::with_capacity(count);
        for _ in 0..count {
            let (off, line) = lines.next_line()?;
            u.push(parse_float(off, line)?);
        }
        Ok(Checkpoint {
            hash,
            t,
            controller: Controller { dt, step },
            u,
        })
    }
}

struct Lines<'a> {
    text: &'a str,
    offset: usize,
}

impl<'a> Lines<'a> {
    fn next_line(&mut self) -> Result<(usize, &'a str), CheckpointError> {
        let start = self.offset;
        let rest = &self.text[start..];
        match rest.find('\n') {
            Some(end) => {
                self.offset += end + 1;
                Ok((start, rest[..end].trim_end_matches('\r')))
            }
            None => Err(CheckpointError::Parse {
                offset: start,
                msg: if rest.is_empty() {
                    "unexpected end of file".into()
                } else {
                    format!("truncated line {rest:?}")
                },
            }),
        }
    }

    fn field(&mut self, key: &str) -> Result<(usize, &'a str), CheckpointError> {
        let (off, line) = self.next_line()?;
        match line.split_once(' ') {
            Some((k, v)) if k == key => Ok((off + k.len() + 1, v.trim())),
            _ => Err(CheckpointError::Parse {
                offset: off,
                msg: format!("expected `{key} <value>`, found {line:?}"),
            }),
        }
    }

    fn number(&mut self, key: &str) -> Result<f64, CheckpointError> {
        let (off, v) = self.field(key)?;
        parse_float(off, v)
    }
}

fn parse_float(offset: usize, s: &str) -> Result<f64, CheckpointError> {
    s.trim().parse::<f64>().map_err(|_| CheckpointError::Parse {
        offset,
        msg: format!("cannot parse {s:?} as a number"),
    })
}

/// Writes `state` and the controller position to `path`.
pub fn checkpoint(
    manifold: &DiscretizedManifold,
    config: &FlowConfig,
    state: &FlowState,
    controller: Controller,
    path: &Path,
) -> Result<(), CheckpointError> {
    let cp = Checkpoint {
        hash: config_hash(manifold, config),
        t: state.t,
        controller,
        u: state.u.to_vec(),
    };
    std::fs::write(path, cp.render())
        .map_err(|e| CheckpointError::Io(format!("{}: {e}", path.display())))
}

/// Reads a checkpoint and rebuilds the state; refuses files written for another configuration.
pub fn restore(
    manifold: &DiscretizedManifold,
    config: &FlowConfig,
    path: &Path,
) -> Result<(FlowState, Controller), super::FlowError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CheckpointError::Io(format!("{}: {e}", path.display())))?;
    let cp = Checkpoint::parse(&text)?;
    let expected = config_hash(manifold, config);
    if cp.hash != expected {
        return Err(CheckpointError::HashMismatch {
            expected,
            found: cp.hash,
        }
        .into());
    }
    if cp.u.len() != manifold.len() {
        return Err(CheckpointError::NodeCount {
            expected: manifold.len(),
            found: cp.u.len(),
        }
        .into());
    }
    let state = FlowState::new(manifold, Field::new(cp.u), cp.t)?;
    Ok((state, cp.controller))
}
