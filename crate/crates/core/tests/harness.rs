use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use etnn_core::config::{load_config, parse_config, render_config};
use etnn_core::experiment::{
    run_experiment, ExperimentError, DIVERGENCE_FILE, METRICS_FILE, RESOLVED_CONFIG_FILE, TELEMETRY_FILE,
};
use etnn_core::metrics::{metrics_from_csv, MetricsReport};
use etnn_core::telemetry::csv_header;

fn etnn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_etnn")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

fn short(kind: &str, controller: &str, t_end: f64) -> String {
    format!("[trajectory]\nkind = {kind}\n[sim]\nt_end = {t_end}\n[run]\ncontroller = {controller}\nwindow_start = 1\n")
}

#[test]
fn one_second_run_matches_golden_telemetry() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("run");
    let o = etnn(&["run", golden_dir().join("ellipse_1s.conf").to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let got = fs::read_to_string(out.join(TELEMETRY_FILE)).unwrap();
    let want = fs::read_to_string(golden_dir().join("ellipse_1s.csv")).unwrap();
    assert_eq!(got.lines().next(), Some(csv_header().as_str()));
    assert_eq!(got.lines().count(), 101);
    assert!(got == want, "telemetry drifted from the golden fixture");
    for f in [METRICS_FILE, RESOLVED_CONFIG_FILE] {
        assert!(out.join(f).is_file());
    }
    assert!(stdout(&o).contains("[tracking]"));
}

#[test]
fn metrics_recomputed_from_csv_match_the_report() {
    let tmp = tempfile::tempdir().unwrap();
    for controller in ["et_nn", "baseline_pid"] {
        let cfg = parse_config(&short("figure_eight", controller, 8.0)).unwrap();
        let dir = tmp.path().join(controller);
        let outcome = run_experiment(&cfg, &dir).unwrap();
        let text = fs::read_to_string(dir.join(TELEMETRY_FILE)).unwrap();
        let again = metrics_from_csv(&text, 1.0, 0.01, controller, "figure_eight", 8.0).unwrap();
        let written = MetricsReport::load(&dir.join(METRICS_FILE)).unwrap();
        for r in [&outcome.report, &written] {
            let r = MetricsReport { runtime_s: 0.0, final_v_s: 0.0, ..r.clone() };
            assert_eq!(r, again);
        }
    }
}

#[test]
fn resolved_config_reloads_to_the_same_config() {
    let tmp = tempfile::tempdir().unwrap();
    let src = write(
        tmp.path(),
        "c.conf",
        "[gains]\nk = 2, 2, 3\n[nn]\nn1 = 6\n[sim]\nt_end = 0.5\nseed = 42\n[run]\nwindow_start = 0\n",
    );
    let cfg = load_config(&src).unwrap();
    run_experiment(&cfg, &tmp.path().join("o")).unwrap();
    let back = load_config(&tmp.path().join("o").join(RESOLVED_CONFIG_FILE)).unwrap();
    assert_eq!(back.closed_loop, cfg.closed_loop);
    assert_eq!(render_config(&back), render_config(&cfg));
}

#[test]
fn config_errors_exit_with_code_2_and_a_line_number() {
    let tmp = tempfile::tempdir().unwrap();
    let cases = [
        ("[sim]\n\nbogus = 1\n", "line 3"),
        ("[gains]\np_exp = 1.2\n", "0.5 < p < 1"),
        ("[plant]\nm_t = -1\n", "m_t"),
        ("[sim]\ndt_plant = 0.003\n", "control_period"),
        ("[nn]\ngamma0 = 1, 2\n", "gamma0"),
        ("[run]\ncontroller = lqr\n", "lqr"),
    ];
    for (i, (text, needle)) in cases.iter().enumerate() {
        let p = write(tmp.path(), &format!("bad{i}.conf"), text);
        let o = etnn(&["run", p.to_str().unwrap(), "--out", tmp.path().join("x").to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(2), "{text}");
        assert!(stderr(&o).contains(needle), "{text}: {}", stderr(&o));
    }
    let o = etnn(&["run", tmp.path().join("missing.conf").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn divergence_exits_with_code_3_and_keeps_partial_output() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/demo/published_filter_ellipse.conf");
    let out = tmp.path().join("div");
    let o = etnn(&["run", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    let report = fs::read_to_string(out.join(DIVERGENCE_FILE)).unwrap();
    assert!(report.contains("exceeds safety limit"));
    assert!(report.contains(&csv_header()));
    assert!(fs::read_to_string(out.join(TELEMETRY_FILE)).unwrap().lines().count() > 1000);
    assert!(!out.join(METRICS_FILE).exists());

    let err = run_experiment(&load_config(&cfg).unwrap(), &tmp.path().join("lib")).unwrap_err();
    assert!(matches!(err, ExperimentError::Diverged { .. }));
    assert_eq!(err.exit_code(), 3);
}

#[test]
fn compare_reports_signed_reductions() {
    let tmp = tempfile::tempdir().unwrap();
    let mut metrics = Vec::new();
    for controller in ["baseline_pid", "et_nn"] {
        let p = write(tmp.path(), &format!("{controller}.conf"), &short("ellipse", controller, 10.0));
        let out = tmp.path().join(controller);
        let o = etnn(&["run", p.to_str().unwrap(), "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        metrics.push(out.join(METRICS_FILE).to_str().unwrap().to_owned());
    }
    let o = etnn(&["compare", &metrics[0], &metrics[1]]);
    assert_eq!(o.status.code(), Some(0));
    let table = stdout(&o);
    assert!(table.contains('+') && table.contains('%'), "{table}");

    let o = etnn(&["compare", &metrics[0], &metrics[1], "--machine"]);
    let text = stdout(&o);
    let x: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("mean_err_x_reduction_pct = "))
        .expect("machine output has the x reduction")
        .parse()
        .unwrap();
    assert!(x > 0.0 && x < 100.0);

    let p = write(tmp.path(), "fig.conf", &short("figure_eight", "et_nn", 10.0));
    let fig = tmp.path().join("fig");
    assert_eq!(etnn(&["run", p.to_str().unwrap(), "--out", fig.to_str().unwrap()]).status.code(), Some(0));
    let o = etnn(&["compare", &metrics[0], fig.join(METRICS_FILE).to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("trajector"), "{}", stderr(&o));
}

#[test]
fn sweep_runs_every_match_and_rejects_shared_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let cfgs = tmp.path().join("cfgs");
    fs::create_dir(&cfgs).unwrap();
    write(&cfgs, "a.conf", &short("ellipse", "et_nn", 2.0));
    write(&cfgs, "b.conf", &short("figure_eight", "baseline_pid", 2.0));
    let base = tmp.path().join("runs");
    let pattern = format!("{}/*.conf", cfgs.display());
    let o = etnn(&["sweep", &pattern, "--base", base.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("ok")).count(), 2);
    for stem in ["a", "b"] {
        assert!(base.join(stem).join(METRICS_FILE).is_file());
    }

    let shared = format!("[run]\noutput_dir = {}\n", tmp.path().join("same").display());
    write(&cfgs, "c.conf", &shared);
    write(&cfgs, "d.conf", &shared);
    let o = etnn(&["sweep", &pattern, "--base", base.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("shared"));

    let o = etnn(&["sweep", &format!("{}/*.none", cfgs.display())]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bound_calculator() {
    let o = etnn(&["bound", "--l", "1", "--m", "1", "--omega", "0.5", "--p", "0.75"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "T ≤ 10\n");

    let o = etnn(&["bound", "--l", "1", "--m", "1", "--n", "0.5", "--omega", "0.5", "--p", "0.75"]);
    assert_eq!(stdout(&o), "T ≤ 10\nV ≤ 1\n");

    let o = etnn(&["bound", "--l", "1", "--m", "1", "--omega", "1.5", "--p", "0.75"]);
    assert_eq!(o.status.code(), Some(2));
}
