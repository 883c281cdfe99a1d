use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn chanalloc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chanalloc"))
        .args(args)
        .output()
        .expect("spawn chanalloc")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

const EXAMPLE_BIDS: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/data/example_bids.csv");

#[test]
fn solve_wdp_prints_the_winning_bid() {
    let o = chanalloc(&["solve-wdp", "--bids", EXAMPLE_BIDS]);
    assert!(o.status.success());
    assert_eq!(
        stdout(&o),
        "objective: 42\naccepted bids: 4\n  bid 4: bidder 1 gets channels 1,2,4 (value 42)\nunassigned channels: 3\n"
    );
}

#[test]
fn solve_wdp_with_minimum_values_relaxes() {
    // bidder 2 asks for at least 20, which rules out bid 4 alone
    let o = chanalloc(&[
        "solve-wdp",
        "--bids",
        EXAMPLE_BIDS,
        "--min-values",
        "0,0,20",
        "--json",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["objective"], 31.0);
}

#[test]
fn malformed_bids_fail() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.csv");
    fs::write(&path, "1,2,0,5,1\n").unwrap();
    let o = chanalloc(&["solve-wdp", "--bids", path.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("channel flag"));
}

#[test]
fn dump_scenario_emits_json() {
    let o = chanalloc(&["dump-scenario", "--seed", "12", "--case", "III"]);
    assert!(o.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc["seed"], 12);
    assert_eq!(doc["case"], "III");
    assert_eq!(doc["tenants"].as_array().unwrap().len(), 6);
}

fn run_into(dir: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["run", "--out", dir.to_str().unwrap(), "--no-timing"];
    args.extend_from_slice(extra);
    chanalloc(&args)
}

#[test]
fn run_is_reproducible_and_counts_records() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let flags = [
        "--scenarios",
        "3",
        "--seed",
        "8",
        "--cases",
        "I,II",
        "--algorithms",
        "R,GS,MRGS",
        "--reps",
        "2",
    ];
    let o = run_into(a.path(), &flags);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).starts_with("36 records written"));
    let manifest = a.path().join("manifest.json");
    let o = chanalloc(&[
        "run",
        "--config",
        manifest.to_str().unwrap(),
        "--out",
        b.path().to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let records = |d: &Path| fs::read(d.join("records.csv")).unwrap();
    assert_eq!(records(a.path()), records(b.path()));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(
        &cfg,
        "n_scenarios = 5\ncontexts = [\"utility\"]\nalgorithms = [\"WS\"]\ncases = [\"I\"]\n",
    )
    .unwrap();
    let out = dir.path().join("out");
    let o = run_into(
        &out,
        &["--config", cfg.to_str().unwrap(), "--scenarios", "2"],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(out.join("records.csv")).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert!(text.lines().skip(1).all(|l| l.contains(",I,utility,WS,")));
}

#[test]
fn aggregate_rebuilds_plot_data() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_into(
        dir.path(),
        &[
            "--scenarios",
            "2",
            "--algorithms",
            "GS",
            "--contexts",
            "capacity",
        ],
    );
    assert!(o.status.success());
    fs::remove_dir_all(dir.path().join("plots")).unwrap();
    let o = chanalloc(&["aggregate", "--in", dir.path().to_str().unwrap()]);
    assert!(o.status.success());
    // 9 metrics x 3 cases, plus the scatter file
    assert_eq!(fs::read_dir(dir.path().join("plots")).unwrap().count(), 28);
}

#[test]
fn bad_arguments_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    assert!(!run_into(dir.path(), &["--algorithms", "XYZ"])
        .status
        .success());
    assert!(!run_into(dir.path(), &["--scenarios", "0"]).status.success());
    assert!(!chanalloc(&[
        "aggregate",
        "--in",
        dir.path().join("missing").to_str().unwrap()
    ])
    .status
    .success());
}
