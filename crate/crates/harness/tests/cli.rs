use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rsm_core::{AttackerKind, SelectorKind};
use rsm_harness::config::{EstimationObjective, RunConfig, ScenarioKind};
use rsm_harness::results::{emit_results, load_results, read_csv, write_csv};
use rsm_harness::{run_monte_carlo, HarnessError, CSV_HEADER};

fn rsm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rsm"))
        .args(args)
        .env("RSM_WORKERS", "2")
        .output()
        .unwrap()
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
}

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

#[test]
fn config_defaults() {
    let c =
        RunConfig::from_toml("[run]\nkind = \"wsn_tracking\"\nhorizon = 5\nalpha = 10\nbeta = 5\n")
            .unwrap();
    assert_eq!(c.run.kind, ScenarioKind::WsnTracking);
    assert_eq!(c.run.trials, 1);
    assert_eq!(c.run.seed, 0);
    assert_eq!(c.run.selectors.len(), 3);
    assert_eq!(c.run.attackers, vec![AttackerKind::Worst]);
    assert!(!c.run.bounds);
    let w = c.wsn();
    assert_eq!(
        (w.sensors, w.side, w.sigma0, w.gamma),
        (100, 100.0, 0.5, 0.01)
    );
    assert_eq!(w.objective, EstimationObjective::Trace);
    assert_eq!(c.step_size(), 100);
}

#[test]
fn config_rejections() {
    let base = "[run]\nkind = \"uav_navigation\"\nhorizon = 5\nalpha = 8\nbeta = 6\n";
    for (extra, what) in [
        ("colour = 1\n", "unknown run key"),
        (
            "[uav_navigation]\nground_sensor = 3\n",
            "unknown scenario key",
        ),
        ("[wsn_tracking]\nsensors = 10\n", "table of another kind"),
    ] {
        let text = format!("{base}{extra}");
        assert!(RunConfig::from_toml(&text).is_err(), "{what} accepted");
    }
    for bad in [
        "[run]\nkind = \"uav_navigation\"\nhorizon = 5\nalpha = 13\nbeta = 6\n",
        "[run]\nkind = \"uav_navigation\"\nhorizon = 5\nalpha = 4\nbeta = 6\n",
        "[run]\nkind = \"uav_navigation\"\nhorizon = 0\nalpha = 4\nbeta = 1\n",
        "[run]\nkind = \"uav_navigation\"\nhorizon = 2\nalpha = 4\nbeta = 1\ntrials = 0\n",
        "[run]\nkind = \"uav_navigation\"\nhorizon = 2\nalpha = 4\nbeta = 1\nselectors = [\"best\"]\n",
        "[run]\nkind = \"submarine\"\nhorizon = 2\nalpha = 4\nbeta = 1\n",
    ] {
        assert!(
            matches!(RunConfig::from_toml(bad), Err(HarnessError::Config(_) | HarnessError::Toml(_))),
            "accepted:\n{bad}"
        );
    }
}

#[test]
fn shipped_configs_parse() {
    let mut n = 0;
    for entry in std::fs::read_dir(configs_dir()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            RunConfig::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            n += 1;
        }
    }
    assert!(n >= 3);
}

#[test]
fn csv_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let c = RunConfig::from_toml(
        "[run]\nkind = \"synthetic\"\nhorizon = 2\nalpha = 2\nbeta = 1\ntrials = 3\nbounds = true\n\
         attackers = [\"worst\", \"random\"]\n",
    )
    .unwrap();
    let rows = run_monte_carlo(&c).unwrap().rows;
    let path = dir.path().join("out.csv");
    emit_results(&rows, &path).unwrap();
    assert_eq!(load_results(&path).unwrap(), rows);

    let empty = dir.path().join("empty.csv");
    emit_results(&[], &empty).unwrap();
    assert_eq!(
        std::fs::read_to_string(&empty).unwrap(),
        format!("{CSV_HEADER}\n")
    );
    assert!(load_results(&empty).unwrap().is_empty());

    assert!(read_csv("trial,step\n0,1\n".as_bytes()).is_err());
    assert!(load_results(&dir.path().join("missing.csv")).is_err());
}

#[test]
fn golden_random_run() {
    let c = RunConfig::load(&data("golden.toml")).unwrap();
    assert_eq!(c.run.selectors, vec![SelectorKind::Random]);
    let rows = run_monte_carlo(&c).unwrap().rows;
    let mut buf = Vec::new();
    write_csv(&rows, &mut buf).unwrap();
    let golden = std::fs::read_to_string(data("golden.csv")).unwrap();
    assert_eq!(String::from_utf8(buf).unwrap(), golden);
}

#[test]
fn binary_run_writes_csv_and_plot_data() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.csv");
    let plots = dir.path().join("plots");
    let o = rsm(&[
        "run",
        "--config",
        data("golden.toml").to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--trials",
        "4",
        "--selectors",
        "ram,greedy",
        "--attackers",
        "worst",
        "--bounds",
        "--plot-dir",
        plots.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = load_results(&out).unwrap();
    assert_eq!(rows.len(), 4 * 2 * 2);
    assert!(rows
        .iter()
        .all(|r| r.bound_apriori.is_some() == (r.selector == SelectorKind::Ram)));
    let ram = std::fs::read_to_string(plots.join("ram_worst.dat")).unwrap();
    assert_eq!(ram.lines().count(), 3);
    assert!(plots.join("greedy_worst.dat").exists());
}

#[test]
fn binary_run_to_stdout() {
    let o = rsm(&["run", "--config", data("golden.toml").to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(
        String::from_utf8(o.stdout).unwrap(),
        std::fs::read_to_string(data("golden.csv")).unwrap()
    );
}

#[test]
fn binary_rejects_bad_config() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(
        &path,
        "[run]\nkind = \"synthetic\"\nhorizon = 2\nalpha = 2\nbeta = 1\nfoo = 2\n",
    )
    .unwrap();
    let o = rsm(&["run", "--config", path.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("foo"));
}

#[test]
fn binary_analysis_commands() {
    let synthetic = configs_dir().join("synthetic.toml");
    let cfg = synthetic.to_str().unwrap();

    let o = rsm(&["optimal", "--config", cfg]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("f* = "));

    let o = rsm(&["curvature", "--config", cfg, "--mode", "exact"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8_lossy(&o.stdout).into_owned();
    assert!(
        text.contains("kappa = ") && text.contains("(exact)"),
        "{text}"
    );

    let o = rsm(&["bounds", "--config", cfg]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(String::from_utf8_lossy(&o.stdout).lines().count(), 2 + 2);

    let o = rsm(&["bounds", "--config", cfg, "--selector", "greedy"]);
    assert!(!o.status.success());
}

#[test]
fn binary_verify_small_grid() {
    let o = rsm(&[
        "verify",
        "--replicates",
        "1",
        "--lemma-trials",
        "200",
        "--seed",
        "3",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    let text = String::from_utf8_lossy(&o.stdout).into_owned();
    assert!(text.starts_with("12 objectives"), "{text}");
    assert!(!text.contains("VIOLATION"));
}
