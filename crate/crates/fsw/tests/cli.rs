use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use fsw::output::{
    parse_report, read_convergence, read_ledger, read_streamlines, read_table, read_traces,
    read_vtk,
};

const EXAMPLE: &str = include_str!("../examples/weld.cfg");
const TARGETS: &str = include_str!("../examples/targets.csv");

fn fsw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fsw"))
        .args(args)
        .output()
        .unwrap()
}

/// Writes a config (and the targets file) into a fresh directory.
fn workspace(config: &str) -> (tempfile::TempDir, PathBuf) {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("weld.cfg");
    fs::write(&path, config).unwrap();
    fs::write(dir.path().join("targets.csv"), TARGETS).unwrap();
    (dir, path)
}

fn run(command: &str, config: &Path, out: &Path, extra: &[&str]) -> Output {
    let mut args = vec![
        command,
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    fsw(&args)
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn missing_config_flag_is_a_usage_error() {
    let o = fsw(&["simulate"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("Usage"), "{}", stderr(&o));
    assert!(o.stdout.is_empty());
}

#[test]
fn unknown_subcommand_and_bare_call_are_usage_errors() {
    assert_eq!(fsw(&[]).status.code(), Some(1));
    assert_eq!(fsw(&["melt", "--config", "x"]).status.code(), Some(1));
    assert_eq!(
        fsw(&["simulate", "--config", "x", "--seed", "minus one"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(fsw(&["--help"]).status.code(), Some(0));
}

#[test]
fn config_errors_exit_with_two() {
    let (dir, path) = workspace(&EXAMPLE.replace("nz = 2", "nz = 2\nnw = 1"));
    let o = run("simulate", &path, dir.path(), &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line "), "{}", stderr(&o));
    assert!(stderr(&o).contains("nw"));

    let o = fsw(&["heatgen", "--config", "/nonexistent/weld.cfg"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn runtime_errors_exit_with_three() {
    let (dir, path) = workspace(&EXAMPLE.replace("dt = auto", "dt = 1 s"));
    let o = run("simulate", &path, &dir.path().join("out"), &[]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stderr(&o).contains("stability limit"));
}

#[test]
fn simulate_writes_readable_outputs() {
    let (dir, path) = workspace(EXAMPLE);
    let out = dir.path().join("out");
    let o = run("simulate", &path, &out, &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));

    let traces = read_traces(fs::File::open(out.join("traces.csv")).unwrap()).unwrap();
    assert_eq!(traces.probes, ["advancing", "retreating", "bottom"]);
    assert!(traces.times.windows(2).all(|w| w[1] > w[0]));
    assert!((traces.times.last().unwrap() - 9.0).abs() < 1e-9);
    assert!(traces
        .samples
        .iter()
        .flatten()
        .all(|t| t.is_finite() && *t >= 293.0));

    let ledger = read_ledger(fs::File::open(out.join("energy_ledger.csv")).unwrap()).unwrap();
    let total = ledger.last().unwrap();
    assert_eq!(total.phase, "total");
    assert_eq!(ledger.len(), 4);
    assert!(total.ledger.relative_error() < 1e-3);

    let read = |name: &str| {
        read_vtk(std::io::BufReader::new(
            fs::File::open(out.join(name)).unwrap(),
        ))
        .unwrap()
    };
    let peak = read("peak_temperature.vtk");
    assert_eq!(peak.dims, [24, 16, 5]);
    assert!(peak.temperature.iter().cloned().fold(0.0, f64::max) > 500.0);
    assert!(peak.domain.iter().all(|d| *d == 1 || *d == 2));
    let snapshot = read("snapshot_000200.vtk");
    assert_eq!(snapshot.dims, peak.dims);
    assert!(out.join("snapshot_000400.vtk").exists());
}

#[test]
fn identical_inputs_give_identical_bytes() {
    let (dir, path) = workspace(EXAMPLE);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        assert_eq!(run("simulate", &path, out, &[]).status.code(), Some(0));
        assert_eq!(run("flow", &path, out, &[]).status.code(), Some(0));
    }
    let mut names: Vec<_> = fs::read_dir(&a)
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    assert!(names.len() >= 6);
    for name in names {
        assert_eq!(
            fs::read(a.join(&name)).unwrap(),
            fs::read(b.join(&name)).unwrap(),
            "{name:?}"
        );
    }
}

#[test]
fn heatgen_reports_the_contact_fractions() {
    let (dir, path) = workspace(EXAMPLE);
    let o = run("heatgen", &path, dir.path(), &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert!(stdout.contains("fraction_shoulder"));
    let table = read_table(fs::File::open(dir.path().join("heat_breakdown.csv")).unwrap()).unwrap();
    let get = |q: &str| table.iter().find(|r| r.0 == q).unwrap().1;
    for (q, expected) in [
        ("fraction_shoulder", 0.86),
        ("fraction_probe_side", 0.11),
        ("fraction_probe_tip", 0.03),
    ] {
        assert!((get(q) - expected).abs() <= 0.005, "{q} = {}", get(q));
    }
    let parts = get("q1_shoulder") + get("q2_probe_side") + get("q3_probe_tip");
    assert!((parts - get("q_total")).abs() <= 1e-9 * parts);
    assert!(get("traverse_share") < 0.02);
}

#[test]
fn flow_writes_one_polyline_per_seed() {
    let (dir, path) = workspace(EXAMPLE);
    let o = run("flow", &path, dir.path(), &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let points =
        read_streamlines(fs::File::open(dir.path().join("streamlines.csv")).unwrap()).unwrap();
    for id in 0..4 {
        let steps: Vec<usize> = points
            .iter()
            .filter(|p| p.tracer == id)
            .map(|p| p.step)
            .collect();
        assert_eq!(steps, (0..=500).collect::<Vec<_>>());
    }
    let first = points.iter().find(|p| p.tracer == 0).unwrap();
    assert_eq!(first.position, [4e-3, 0.0, 1e-3]);
}

#[test]
fn flow_without_section_is_a_config_error() {
    let start = EXAMPLE.find("[flow]").unwrap();
    let end = EXAMPLE.find("[calibration]").unwrap();
    let (dir, path) = workspace(&format!("{}{}", &EXAMPLE[..start], &EXAMPLE[end..]));
    assert_eq!(run("flow", &path, dir.path(), &[]).status.code(), Some(2));
}

#[test]
fn seeded_calibration_is_reproducible() {
    let (dir, path) = workspace(&EXAMPLE.replace("max_evaluations = 100", "max_evaluations = 8"));
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let o = run("calibrate", &path, out, &["--seed", "11"]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    for name in ["calibration_report.txt", "calibration_convergence.csv"] {
        assert_eq!(
            fs::read(a.join(name)).unwrap(),
            fs::read(b.join(name)).unwrap()
        );
    }
    let report =
        parse_report(&fs::read_to_string(a.join("calibration_report.txt")).unwrap()).unwrap();
    assert_eq!(report["parameters"], "delta, h_gap");
    assert_eq!(report["seed"], "11");
    let delta: f64 = report["delta"].parse().unwrap();
    assert!((0.2..=0.9).contains(&delta));
    let (header, rows) =
        read_convergence(fs::File::open(a.join("calibration_convergence.csv")).unwrap()).unwrap();
    assert_eq!(header[4..], ["delta", "h_gap"]);
    assert!(rows.windows(2).all(|w| w[1][2] <= w[0][2]));
}

#[test]
fn calibration_rejects_unknown_target_columns() {
    let (dir, path) = workspace(EXAMPLE);
    fs::write(
        dir.path().join("targets.csv"),
        "time_s,nowhere_K\n0,293\n1,300\n",
    )
    .unwrap();
    let o = run("calibrate", &path, &dir.path().join("out"), &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("nowhere"));
}
