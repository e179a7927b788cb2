//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Every entry point takes plain strings and numbers and returns a JSON document, so the page
//! needs no glue beyond `JSON.parse`. Errors come back as the rejected promise value.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;
use yflow::auxfn::{survey, AuxParams, Inequality, SampleRegion, Sampler};
use yflow::config::ScenarioConfig;
use yflow::scenario::{build, run_scenario};

/// Longest run the page may request, counted in fixed steps of `flow.dt`.
pub const MAX_STEPS: f64 = 20_000.0;
pub const MAX_CELLS: usize = 1024;
pub const MAX_SAMPLES: usize = 200_000;

fn finite_or_null(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        Value::Null
    }
}

/// Runs the scenario described by `config` (same `key = value` format as the command line
/// tool) and returns the time series, the final profiles and the monitor verdicts.
#[wasm_bindgen]
pub fn simulate(config: &str) -> Result<String, String> {
    let cfg = ScenarioConfig::parse(config).map_err(|e| e.to_string())?;
    if cfg.grid_m > MAX_CELLS {
        return Err(format!("grid.M is limited to {MAX_CELLS} in the browser"));
    }
    if cfg.flow.t_final / cfg.flow.dt_init > MAX_STEPS {
        return Err(format!(
            "flow.T / flow.dt is limited to {MAX_STEPS} in the browser"
        ));
    }
    let report = run_scenario(&cfg, None).map_err(|e| e.to_string())?;
    let manifold = build(&cfg).map_err(|e| e.to_string())?;
    let traj = &report.trajectory;
    let series = |f: fn(&yflow::flow::StepRecord) -> f64| -> Vec<Value> {
        traj.records.iter().map(|r| finite_or_null(f(r))).collect()
    };
    let monitors: Vec<Value> = report
        .monitors
        .iter()
        .map(|m| {
            json!({
                "id": m.id,
                "verdict": m.verdict.as_str(),
                "worst_margin": finite_or_null(m.worst_margin()),
                "note": m.note,
            })
        })
        .collect();
    let out = json!({
        "name": cfg.name,
        "warnings": report.audit.warnings,
        "yamabe": finite_or_null(report.yamabe.value),
        "t": series(|r| r.t),
        "rho": series(|r| r.rho),
        "min_u": series(|r| r.min_u),
        "max_u": series(|r| r.max_u),
        "energy": series(|r| r.energy),
        "x": manifold.nodes(),
        "u": traj.final_state.u.to_vec(),
        "s": traj.final_state.s.to_vec(),
        "rejections": traj.rejections,
        "passed": report.passed(),
        "monitors": monitors,
    });
    Ok(out.to_string())
}

/// Evaluates one inequality of the catalogue at a single point.
#[wasm_bindgen]
pub fn check_inequality(
    id: &str,
    beta: f64,
    l: f64,
    nu: f64,
    n: usize,
    x: f64,
) -> Result<String, String> {
    let ineq: Inequality = id
        .parse()
        .map_err(|e: yflow::auxfn::AuxError| e.to_string())?;
    let mut p = AuxParams::new(beta, l, n).map_err(|e| e.to_string())?;
    if ineq.uses_nu() {
        p = p.with_nu(nu).map_err(|e| e.to_string())?;
    }
    let region = ineq.check_region(&p).err().map(|e| e.to_string());
    let comparisons: Vec<Value> = ineq
        .evaluate_unchecked(&p, x)
        .iter()
        .map(|c| {
            json!({
                "label": c.label,
                "lhs": finite_or_null(c.lhs),
                "rhs": finite_or_null(c.rhs),
                "margin": finite_or_null(c.margin()),
                "holds": c.holds(),
            })
        })
        .collect();
    Ok(json!({
        "id": ineq.id(),
        "statement": ineq.statement(),
        "outside_region": region,
        "comparisons": comparisons,
    })
    .to_string())
}

/// Samples `samples` random points for one inequality and reports the violations found.
#[wasm_bindgen]
pub fn search_counterexamples(
    id: &str,
    samples: usize,
    seed: u64,
    outside: bool,
) -> Result<String, String> {
    let ineq: Inequality = id
        .parse()
        .map_err(|e: yflow::auxfn::AuxError| e.to_string())?;
    if samples > MAX_SAMPLES {
        return Err(format!("at most {MAX_SAMPLES} samples in the browser"));
    }
    let region = if outside {
        SampleRegion::Outside
    } else {
        SampleRegion::Declared
    };
    let row = survey(ineq, &mut Sampler::new(seed, region), samples);
    let first = row
        .first_violation
        .map(|(p, x)| json!({ "beta": p.beta, "L": p.l, "nu": p.nu, "n": p.n, "x": x }));
    Ok(json!({
        "id": row.id,
        "samples": row.samples,
        "violations": row.violations,
        "worst_margin": finite_or_null(row.worst_margin),
        "first_violation": first,
    })
    .to_string())
}
