use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn yflow(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_yflow"))
        .args(args)
        .current_dir(cwd)
        .env_remove("YFLOW_OUT")
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

const SPHERE: &str = "profile = sphere\nn = 3\ngrid.M = 64\nflow.T = 0.2\nflow.dt = 1e-3\n";

#[test]
fn sphere_run_passes_and_keeps_rho_constant() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "sphere.cfg", SPHERE);
    let out = dir.path().join("out");
    let res = yflow(
        &[
            "run",
            "--config",
            &cfg,
            "--out",
            out.to_str().unwrap(),
            "--quiet",
        ],
        dir.path(),
    );
    assert_eq!(
        res.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&res.stderr)
    );

    let csv = fs::read_to_string(out.join("timeseries.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "t,dt,rho,vol,min_u,max_u,min_S,max_S,s_minus_l2,s_minus_linf,energy_S_rho"
    );
    let rhos: Vec<f64> = lines
        .map(|l| l.split(',').nth(2).unwrap().parse().unwrap())
        .collect();
    assert!(rhos.len() > 100);
    for r in &rhos {
        assert!((r - rhos[0]).abs() <= 1e-10 * rhos[0]);
    }
    for f in ["monitors.csv", "ledger.txt", "plots/rho.svg"] {
        assert!(out.join(f).exists(), "{f} missing");
    }
}

#[test]
fn run_output_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "p.cfg", "profile = perturbed_sphere(0.2)\nn = 3\ngrid.M = 32\nflow.T = 0.1\nmonitors.refinement = false\n");
    let mut outputs = Vec::new();
    for tag in ["a", "b"] {
        let out = dir.path().join(tag);
        let res = yflow(
            &[
                "run",
                "--config",
                &cfg,
                "--out",
                out.to_str().unwrap(),
                "-q",
            ],
            dir.path(),
        );
        assert_eq!(res.status.code(), Some(0));
        outputs.push(fs::read(out.join("timeseries.csv")).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn cone_run_warns_but_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "cone.cfg",
        "profile = cone(0.8)\nn = 4\ngrid.M = 64\nflow.T = 0.1\naudit.q = 4\n",
    );
    let res = yflow(&["run", "--config", &cfg, "--out", "out", "-q"], dir.path());
    assert_eq!(res.status.code(), Some(0));
    let stderr = String::from_utf8_lossy(&res.stderr);
    assert!(stderr.contains("warning"), "{stderr}");
    assert!(stderr.contains("s0_lq_finite"), "{stderr}");
}

#[test]
fn malformed_config_exits_2_with_position() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bad.cfg", "profile = sphere\nflow.T = abc\n");
    let res = yflow(&["run", "--config", &cfg], dir.path());
    assert_eq!(res.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&res.stderr);
    assert!(stderr.contains("line 2, column 10"), "{stderr}");

    let cfg = write_config(dir.path(), "unknown.cfg", "profile = sphere\ngrid.N = 3\n");
    let res = yflow(&["audit", "--config", &cfg], dir.path());
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("unknown key"));
}

#[test]
fn yamabe_on_sphere_prints_estimate() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "sphere.cfg", SPHERE);
    let res = yflow(&["yamabe", "--config", &cfg], dir.path());
    assert_eq!(res.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&res.stdout);
    let value: f64 = stdout
        .strip_prefix("Y_est = ")
        .and_then(|s| s.split_whitespace().next())
        .unwrap()
        .parse()
        .unwrap();
    assert!((value - 43.82).abs() < 0.1, "{stdout}");
    assert!(stdout.contains("iterations"));
}

#[test]
fn auxcheck_i3_finds_no_violation() {
    let dir = tempfile::tempdir().unwrap();
    let res = yflow(
        &["auxcheck", "--ineq", "I3", "--samples", "100000"],
        dir.path(),
    );
    assert_eq!(res.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&res.stdout);
    let row = stdout.lines().find(|l| l.starts_with("I3")).unwrap();
    let cols: Vec<&str> = row.split_whitespace().collect();
    assert_eq!(cols[1], "100000");
    assert_eq!(cols[2], "0");
}

#[test]
fn auxcheck_outside_region_reports_violations() {
    let dir = tempfile::tempdir().unwrap();
    let res = yflow(
        &["auxcheck", "--ineq", "i4", "--samples", "2000", "--outside"],
        dir.path(),
    );
    assert_eq!(res.status.code(), Some(1));
    let res = yflow(&["auxcheck", "--ineq", "I99"], dir.path());
    assert_eq!(res.status.code(), Some(2));
}

#[test]
fn plot_rejects_empty_csv_and_renders_valid_one() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.csv");
    fs::write(&empty, "").unwrap();
    let res = yflow(&["plot", empty.to_str().unwrap()], dir.path());
    assert_eq!(res.status.code(), Some(2));

    let partial = dir.path().join("partial.csv");
    fs::write(&partial, "t,rho\n0,1\n").unwrap();
    let res = yflow(&["plot", partial.to_str().unwrap()], dir.path());
    assert_eq!(res.status.code(), Some(2));

    let cfg = write_config(dir.path(), "sphere.cfg", SPHERE);
    let res = yflow(&["run", "--config", &cfg, "--out", "run", "-q"], dir.path());
    assert_eq!(res.status.code(), Some(0));
    let csv = dir.path().join("run/timeseries.csv");
    let res = yflow(
        &["plot", csv.to_str().unwrap(), "--out", "again", "-q"],
        dir.path(),
    );
    assert_eq!(res.status.code(), Some(0));
    for name in [
        "rho",
        "vol",
        "min_u",
        "max_u",
        "min_S",
        "max_S",
        "energy_S_rho",
    ] {
        let a = fs::read(dir.path().join(format!("run/plots/{name}.svg"))).unwrap();
        let b = fs::read(dir.path().join(format!("again/{name}.svg"))).unwrap();
        assert_eq!(a, b, "{name}");
    }
}

#[test]
fn sweep_writes_one_directory_per_value() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "sphere.cfg", SPHERE);
    let res = Command::new(env!("CARGO_BIN_EXE_yflow"))
        .args(["run", "--config", &cfg, "--sweep", "grid.M=32,48", "-q"])
        .current_dir(dir.path())
        .env("YFLOW_OUT", dir.path().join("root"))
        .output()
        .unwrap();
    assert_eq!(
        res.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&res.stderr)
    );
    for tag in ["grid.M=32", "grid.M=48"] {
        assert!(dir
            .path()
            .join("root")
            .join(tag)
            .join("timeseries.csv")
            .exists());
    }
    let res = yflow(
        &["run", "--config", &cfg, "--sweep", "grid.M=8"],
        dir.path(),
    );
    assert_eq!(res.status.code(), Some(2));
}

#[test]
fn checkpoints_are_written_on_request() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "cp.cfg",
        "profile = sphere\nn = 3\ngrid.M = 32\nflow.T = 0.05\nflow.dt = 1e-3\nflow.checkpoint_every = 10\nmonitors.refinement = false\n",
    );
    let res = yflow(&["run", "--config", &cfg, "--out", "cp", "-q"], dir.path());
    assert_eq!(res.status.code(), Some(0));
    let count = fs::read_dir(dir.path().join("cp"))
        .unwrap()
        .filter(|e| {
            e.as_ref()
                .unwrap()
                .file_name()
                .to_string_lossy()
                .starts_with("checkpoint_")
        })
        .count();
    assert_eq!(count, 5);
}
