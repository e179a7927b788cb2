use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use yflow::auxfn::{survey, Inequality, SampleRegion, Sampler, SurveyRow};
use yflow::bounds::{moser_chain, Verdict};
use yflow::config::ScenarioConfig;
use yflow::flow::run;
use yflow::output::Table;
use yflow::scenario::{self, ScenarioError};
use yflow::yamabe::estimate_yamabe_constant;

use crate::{Cli, Command, GlobalArgs};

pub const EXIT_OK: u8 = 0;
pub const EXIT_CHECK_FAILED: u8 = 1;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_SOLVER: u8 = 3;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub msg: String,
}

impl Failure {
    fn input(msg: impl Into<String>) -> Self {
        Failure {
            code: EXIT_INPUT,
            msg: msg.into(),
        }
    }
}

impl From<ScenarioError> for Failure {
    fn from(e: ScenarioError) -> Self {
        let code = match e {
            ScenarioError::Flow(_) | ScenarioError::Yamabe(_) | ScenarioError::Bounds(_) => {
                EXIT_SOLVER
            }
            ScenarioError::Geometry(_) | ScenarioError::Io { .. } => EXIT_INPUT,
        };
        Failure {
            code,
            msg: e.to_string(),
        }
    }
}

type Outcome = Result<u8, Failure>;

pub fn dispatch(cli: &Cli) -> u8 {
    let g = &cli.global;
    let result = match &cli.command {
        Command::Run { sweep } => cmd_run(g, sweep.as_deref()),
        Command::Audit => cmd_audit(g),
        Command::Yamabe => cmd_yamabe(g),
        Command::Auxcheck {
            ineq,
            samples,
            outside,
        } => cmd_auxcheck(g, ineq.as_deref(), *samples, *outside),
        Command::Moser => cmd_moser(g),
        Command::Plot { csv } => cmd_plot(g, csv),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.msg);
            f.code
        }
    }
}

fn load_config(g: &GlobalArgs) -> Result<ScenarioConfig, Failure> {
    let path = g
        .config
        .as_ref()
        .ok_or_else(|| Failure::input("this command needs --config PATH"))?;
    let text =
        fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    let mut cfg = ScenarioConfig::parse(&text)
        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    if let Some(seed) = g.seed {
        cfg.set("seed", &seed.to_string())
            .map_err(|e| Failure::input(format!("--seed: {e}")))?;
    }
    Ok(cfg)
}

fn output_root(g: &GlobalArgs, cfg: Option<&ScenarioConfig>) -> PathBuf {
    g.out
        .clone()
        .or_else(|| cfg.and_then(|c| c.output_dir.clone()))
        .or_else(|| std::env::var_os("YFLOW_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("yflow-out"))
}

fn report_audit(
    cfg: &ScenarioConfig,
    manifold: &yflow::geometry::DiscretizedManifold,
) -> yflow::geometry::AuditReport {
    let audit = scenario::audit(cfg, manifold);
    for w in &audit.warnings {
        eprintln!("warning: {w}");
    }
    for c in audit.checks.iter().filter(|c| !c.passed) {
        eprintln!("warning: assumption {} violated: {}", c.id, c.detail);
    }
    audit
}

/// Runs one scenario into `dir` and returns its exit code together with the summary text.
/// Exit code and summary text of one scenario.
type RunOutcome = Result<(u8, String), Failure>;

fn run_one(cfg: &ScenarioConfig, dir: &Path) -> RunOutcome {
    let manifold = scenario::build(cfg).map_err(ScenarioError::from)?;
    report_audit(cfg, &manifold);
    fs::create_dir_all(dir).map_err(|e| Failure::input(format!("{}: {e}", dir.display())))?;
    let report = scenario::run_scenario(cfg, Some(dir))?;
    scenario::write_outputs(&report, dir, cfg.plots)?;
    let mut text = String::new();
    for m in &report.monitors {
        let verdict = if m.rows.iter().all(|r| r.verdict == Verdict::NotApplicable) {
            "n/a "
        } else if m.passed() {
            "pass"
        } else {
            "FAIL"
        };
        let _ = writeln!(text, "  [{verdict}] {:<26} {}", m.id, m.note);
    }
    let _ = writeln!(
        text,
        "  Y_est = {:.6}, final rho = {:.6}, results in {}",
        report.yamabe.value,
        report.trajectory.final_state.rho,
        dir.display()
    );
    let code = if report.passed() {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    };
    Ok((code, text))
}

fn cmd_run(g: &GlobalArgs, sweep: Option<&str>) -> Outcome {
    let cfg = load_config(g)?;
    let root = output_root(g, Some(&cfg));
    let Some(sweep) = sweep else {
        let (code, text) = run_one(&cfg, &root)?;
        if !g.quiet {
            print!("{}:\n{text}", cfg.name);
        }
        return Ok(code);
    };

    let (param, values) = sweep
        .split_once('=')
        .ok_or_else(|| Failure::input(format!("--sweep expects PARAM=a,b,c, got {sweep:?}")))?;
    let mut jobs = Vec::new();
    for value in values.split(',').map(str::trim).filter(|v| !v.is_empty()) {
        let mut c = cfg.clone();
        c.set(param, value)
            .map_err(|e| Failure::input(format!("--sweep {param}={value}: {e}")))?;
        c.validate().map_err(|(key, msg)| {
            Failure::input(format!("--sweep {param}={value}: invalid {key}: {msg}"))
        })?;
        jobs.push((format!("{param}={value}"), c));
    }
    if jobs.is_empty() {
        return Err(Failure::input("--sweep lists no values"));
    }
    let results: Vec<(String, RunOutcome)> = std::thread::scope(|s| {
        let handles: Vec<_> = jobs
            .iter()
            .map(|(tag, c)| {
                let dir = root.join(tag);
                (tag.clone(), s.spawn(move || run_one(c, &dir)))
            })
            .collect();
        handles
            .into_iter()
            .map(|(tag, h)| (tag, h.join().expect("scenario worker panicked")))
            .collect()
    });
    let mut worst = EXIT_OK;
    for (tag, res) in results {
        match res {
            Ok((code, text)) => {
                if !g.quiet {
                    print!("{tag}:\n{text}");
                }
                worst = worst.max(code);
            }
            Err(f) => {
                eprintln!("error in {tag}: {}", f.msg);
                worst = worst.max(f.code);
            }
        }
    }
    Ok(worst)
}

fn cmd_audit(g: &GlobalArgs) -> Outcome {
    let cfg = load_config(g)?;
    let manifold = scenario::build(&cfg).map_err(ScenarioError::from)?;
    let audit = report_audit(&cfg, &manifold);
    if !g.quiet {
        print!("{audit}");
    }
    Ok(EXIT_OK)
}

fn cmd_yamabe(g: &GlobalArgs) -> Outcome {
    let cfg = load_config(g)?;
    let manifold = scenario::build(&cfg).map_err(ScenarioError::from)?;
    let est = estimate_yamabe_constant(&manifold, &cfg.yamabe).map_err(ScenarioError::from)?;
    if !g.quiet {
        println!(
            "Y_est = {:.10} ({} iterations, {})",
            est.value,
            est.iterations,
            if est.converged {
                "converged"
            } else {
                "iteration limit reached"
            }
        );
    }
    Ok(EXIT_OK)
}

fn cmd_moser(g: &GlobalArgs) -> Outcome {
    let cfg = load_config(g)?;
    let manifold = scenario::build(&cfg).map_err(ScenarioError::from)?;
    report_audit(&cfg, &manifold);
    let traj = run(&manifold, &cfg.flow).map_err(ScenarioError::from)?;
    let chain = moser_chain(manifold.dim(), &traj, cfg.moser_beta, cfg.moser_levels)
        .map_err(ScenarioError::from)?;
    if !g.quiet {
        println!(
            "Moser chain for S_+ (n = {}, beta = {}, N = {:.4}, exponent {:.4})",
            chain.n, chain.beta, chain.big_n, chain.moser_exponent
        );
        println!(
            "{:>3} {:>12} {:>14} {:>14} {:>12} {:>10} {:>10}",
            "k", "t_k", "upper", "lower", "ratio", "slope", "bound"
        );
        for l in &chain.levels {
            println!(
                "{:>3} {:>12.6} {:>14.6e} {:>14.6e} {:>12.6e} {:>10.4} {:>10.4}",
                l.k, l.t_k, l.upper, l.lower, l.ratio, l.max_slope, l.slope_bound
            );
        }
    }
    let ok = chain.all_finite() && chain.slopes_within_bound();
    Ok(if ok { EXIT_OK } else { EXIT_CHECK_FAILED })
}

fn cmd_auxcheck(g: &GlobalArgs, ineq: Option<&str>, samples: usize, outside: bool) -> Outcome {
    let selected: Vec<Inequality> = match ineq {
        Some(id) => vec![id
            .parse()
            .map_err(|e: yflow::auxfn::AuxError| Failure::input(e.to_string()))?],
        None => Inequality::ALL.to_vec(),
    };
    let seed = g.seed.unwrap_or(yflow::auxfn::DEFAULT_SEED);
    let region = if outside {
        SampleRegion::Outside
    } else {
        SampleRegion::Declared
    };
    let rows: Vec<SurveyRow> = std::thread::scope(|s| {
        let handles: Vec<_> = selected
            .iter()
            .map(|&q| s.spawn(move || survey(q, &mut Sampler::new(seed, region), samples)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("survey worker panicked"))
            .collect()
    });
    if !g.quiet {
        println!(
            "{:<5} {:>10} {:>10} {:>14}  first violation",
            "id", "samples", "violations", "worst margin"
        );
        for r in &rows {
            let first = r
                .first_violation
                .map(|(p, x)| format!("beta={} L={} nu={} n={} x={}", p.beta, p.l, p.nu, p.n, x))
                .unwrap_or_default();
            println!(
                "{:<5} {:>10} {:>10} {:>14.6e}  {first}",
                r.id, r.samples, r.violations, r.worst_margin
            );
        }
    }
    Ok(if rows.iter().all(SurveyRow::passed) {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    })
}

fn cmd_plot(g: &GlobalArgs, csv: &Path) -> Outcome {
    let text =
        fs::read_to_string(csv).map_err(|e| Failure::input(format!("{}: {e}", csv.display())))?;
    let table =
        Table::parse(&text).map_err(|e| Failure::input(format!("{}: {e}", csv.display())))?;
    let dir = g.out.clone().unwrap_or_else(|| {
        csv.parent()
            .filter(|p| !p.as_os_str().is_empty())
            .unwrap_or(Path::new("."))
            .join("plots")
    });
    let written = scenario::write_plots(&table, &dir).map_err(|e| Failure::input(e.to_string()))?;
    if !g.quiet {
        for p in written {
            println!("{}", p.display());
        }
    }
    Ok(EXIT_OK)
}
