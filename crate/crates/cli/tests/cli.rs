use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use rabi_a2_core::sweeps::FIGURE_OMEGA;
use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rabi-a2"))
}

fn run(args: &[&str], dir: &Path) -> Output {
    bin().args(args).current_dir(dir).output().expect("binary runs")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn energies(doc: &Value) -> Vec<f64> {
    doc["levels"]
        .as_array()
        .unwrap()
        .iter()
        .map(|l| l["energy"].as_f64().unwrap())
        .collect()
}

struct Row {
    axis: String,
    axis_value: f64,
    level_index: usize,
    energy: f64,
    parity: i32,
    converged: bool,
}

fn read_rows(path: &Path) -> (Vec<String>, Vec<Row>) {
    let mut reader = csv::Reader::from_path(path).unwrap();
    let header = reader.headers().unwrap().iter().map(String::from).collect();
    let rows = reader
        .records()
        .map(|r| {
            let r = r.unwrap();
            Row {
                axis: r[0].to_string(),
                axis_value: r[1].parse().unwrap(),
                level_index: r[2].parse().unwrap(),
                energy: r[3].parse().unwrap(),
                parity: r[4].parse().unwrap(),
                converged: r[6].parse().unwrap(),
            }
        })
        .collect();
    (header, rows)
}

#[test]
fn spectrum_decoupled() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &[
            "spectrum",
            "--omega-a",
            "1",
            "--omega-c",
            "1",
            "--g",
            "0",
            "--C",
            "0",
            "-k",
            "4",
            "-o",
            "s.json",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&dir.path().join("s.json"));
    assert_eq!(energies(&doc), vec![0.0, 1.0, 1.0, 2.0]);
    assert_eq!(doc["susy"]["classification"], "unbroken");
    assert_eq!(doc["converged"], true);
    assert_eq!(doc["params"]["g"], 0.0);
}

#[test]
fn spectrum_strong_coupling_is_broken() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &[
            "spectrum",
            "--omega-a",
            "6.2832",
            "--omega-c",
            "6.2832",
            "--g",
            "25.1328",
            "--C",
            "0",
            "--shift",
            "paper",
            "-k",
            "4",
            "-o",
            "s.json",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&dir.path().join("s.json"));
    assert_eq!(doc["susy"]["classification"], "spontaneously_broken");
    let e = energies(&doc);
    let w = FIGURE_OMEGA;
    assert!((e[0] - w / 2.0).abs() < 0.01 * w, "{e:?}");
    assert!(doc["susy"]["splitting"].as_f64().unwrap() < 1e-4 * w);
    let parities: Vec<i64> = doc["levels"]
        .as_array()
        .unwrap()
        .iter()
        .map(|l| l["parity"].as_i64().unwrap())
        .collect();
    assert_ne!(parities[0], parities[1]);
}

#[test]
fn malformed_flag_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &[
            "spectrum",
            "--omega-a",
            "abc",
            "--omega-c",
            "1",
            "--g",
            "0",
            "-o",
            "s.json",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(!dir.path().join("s.json").exists());

    let out = run(
        &[
            "spectrum",
            "--omega-a",
            "1",
            "--omega-c",
            "-1",
            "--g",
            "0",
            "-o",
            "s.json",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(!dir.path().join("s.json").exists());

    let out = run(&["spectrum", "--omega-c", "1", "--g", "0"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(run(&["frobnicate"], dir.path()).status.code(), Some(2));
}

#[test]
fn unconverged_spectrum_still_written() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &[
            "spectrum",
            "--omega-a",
            "1",
            "--omega-c",
            "1",
            "--g",
            "1",
            "--max-doublings",
            "0",
            "-o",
            "s.json",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(3));
    let doc = json(&dir.path().join("s.json"));
    assert_eq!(doc["converged"], false);
    assert!(doc["susy"].is_null());
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("run.cfg"),
        "# decoupled point\nomega_a = 2\nomega-c = 1\ng = 0\nlevels = 3\n",
    )
    .unwrap();
    let out = run(&["spectrum", "--config", "run.cfg", "-o", "a.json"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(energies(&json(&dir.path().join("a.json"))), vec![-0.5, 0.5, 1.5]);

    let out = run(
        &["spectrum", "--config", "run.cfg", "--omega-a", "1", "-o", "b.json"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(energies(&json(&dir.path().join("b.json"))), vec![0.0, 1.0, 1.0]);

    fs::write(dir.path().join("bad.cfg"), "omega-a = 1\ncolour = blue\n").unwrap();
    let out = run(
        &["spectrum", "--config", "bad.cfg", "--omega-c", "1", "--g", "0"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["spectrum", "--config", "missing.cfg"], dir.path());
    assert_ne!(out.status.code(), Some(0));
}

#[test]
fn explicit_grid_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &[
            "sweep", "--axis", "g", "--grid", "0:0.5:2", "--omega", "1", "-k", "4", "--shift", "paper", "-o", "t.csv",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let (header, rows) = read_rows(&dir.path().join("t.csv"));
    assert_eq!(
        header,
        [
            "axis_name",
            "axis_value",
            "level_index",
            "energy",
            "parity",
            "n_max_used",
            "converged"
        ]
    );
    assert_eq!(rows.len(), 5 * 4);
    let mut axis: Vec<f64> = rows.iter().map(|r| r.axis_value).collect();
    axis.dedup();
    assert_eq!(axis, vec![0.0, 0.5, 1.0, 1.5, 2.0]);
    assert!(rows.iter().all(|r| r.axis == "g" && r.converged));
    assert!(rows
        .windows(2)
        .all(|w| (w[0].axis_value, w[0].energy) <= (w[1].axis_value, w[1].energy)));

    let text = fs::read_to_string(dir.path().join("t.csv")).unwrap();
    let first_energy = text.lines().nth(2).unwrap().split(',').nth(3).unwrap();
    assert_eq!(first_energy, "1.00000000000");

    let meta = json(&dir.path().join("t.json"));
    assert_eq!(meta["schema"], "rabi-a2-sweep/1");
    assert_eq!(meta["spec"]["grid"].as_array().unwrap().len(), 5);
    assert_eq!(meta["asymptotes"].as_array().unwrap().len(), 4);
    assert_eq!(meta["significant_digits"], 12);
}

#[test]
fn sweep_output_independent_of_jobs() {
    let dir = tempfile::tempdir().unwrap();
    for (jobs, name) in [("1", "one.csv"), ("4", "four.csv")] {
        let out = run(&["sweep", "--preset", "fig2a", "--jobs", jobs, "-o", name], dir.path());
        assert_eq!(out.status.code(), Some(0));
    }
    let read = |n: &str| fs::read(dir.path().join(n)).unwrap();
    assert_eq!(read("one.csv"), read("four.csv"));
    assert_eq!(read("one.json"), read("four.json"));
}

#[test]
fn sweep_json_format() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &[
            "sweep", "--axis", "r", "--grid", "0,0.5,1", "--omega", "1", "--C", "0.2", "--format", "json", "-o",
            "r.json",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&dir.path().join("r.json"));
    assert_eq!(doc["rows"].as_array().unwrap().len(), 3 * 8);
    assert_eq!(doc["metadata"]["axis"], "r");
}

#[test]
fn sweep_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [&[&str]; 6] = [
        &["sweep", "--preset", "fig9"],
        &["sweep", "--preset", "fig1a", "--omega", "2"],
        &["sweep", "--axis", "r", "--grid", "0:0.5:2", "--omega", "1"],
        &["sweep", "--axis", "g", "--grid", "1,0", "--omega", "1"],
        &["sweep", "--axis", "g", "--omega", "1"],
        &["sweep", "--preset", "fig2a", "--jobs", "0"],
    ];
    for args in cases {
        assert_eq!(run(args, dir.path()).status.code(), Some(2), "{args:?}");
    }
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn all_unconverged_sweep_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &[
            "sweep",
            "--axis",
            "g",
            "--grid",
            "1,2",
            "--omega",
            "1",
            "--max-doublings",
            "0",
            "-o",
            "u.csv",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(3));
    let (_, rows) = read_rows(&dir.path().join("u.csv"));
    assert!(rows.iter().all(|r| !r.converged));
}

/// Energies must agree to 1e-8 relative; parity labels are compared only
/// where the level is not part of a near-degenerate pair.
fn assert_matches_golden(preset: &str) {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["sweep", "--preset", preset, "-o", "t.csv"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join(format!("tests/golden/{preset}.csv"));
    let (_, want) = read_rows(&golden);
    let (_, got) = read_rows(&dir.path().join("t.csv"));
    assert_eq!(want.len(), got.len());
    for (i, (a, b)) in want.iter().zip(&got).enumerate() {
        assert_eq!(a.axis_value, b.axis_value);
        assert_eq!(a.level_index, b.level_index);
        assert!((a.energy - b.energy).abs() <= 1e-8 * a.energy.abs().max(1.0), "row {i}");
        let isolated = |rows: &[Row]| {
            [i.wrapping_sub(1), i + 1].iter().all(|&j| {
                rows.get(j)
                    .is_none_or(|r| r.axis_value != rows[i].axis_value || (r.energy - rows[i].energy).abs() > 1e-6)
            })
        };
        if isolated(&want) {
            assert_eq!(a.parity, b.parity, "row {i}");
        }
    }
}

#[test]
fn fig1a_matches_golden() {
    assert_matches_golden("fig1a");
}

#[test]
fn fig2b_matches_golden() {
    assert_matches_golden("fig2b");
    let (_, rows) = read_rows(&Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/fig2b.csv"));
    let end: Vec<f64> = rows.iter().filter(|r| r.axis_value == 1.0).map(|r| r.energy).collect();
    assert!((end[2] - end[0] - 20.335).abs() < 1e-3);
}

#[test]
fn verify_suites_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["verify", "--suite", "eq2", "--C", "0", "-o", "eq2.json"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&dir.path().join("eq2.json"));
    assert_eq!(doc["passed"], true);
    assert_eq!(doc["oracles"][0]["report"]["max_relative_discrepancy"], 0.0);

    let out = run(
        &[
            "verify", "--suite", "limits", "--kind", "eq6", "--C", "0.3770", "-o", "eq6.json",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        json(&dir.path().join("eq6.json"))["oracles"][0]["report"]["eventually_decreasing"],
        true
    );

    let out = run(
        &["verify", "--suite", "limits", "--kind", "eq5", "-o", "eq5.json"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));

    // the free strong-coupling ground pair still sits 4e-3 w below w/2 at g = 4w
    let out = run(
        &["verify", "--suite", "limits", "--kind", "eq4", "-o", "eq4.json"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(4));
    let doc = json(&dir.path().join("eq4.json"));
    let failed: Vec<&str> = doc["oracles"][0]["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["passed"] == false)
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert_eq!(failed, ["ground_distance_at_top"]);

    let out = run(
        &[
            "verify",
            "--suite",
            "limits",
            "--kind",
            "eq4",
            "--axis-values",
            "31.416,43.9824,50.2656",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));

    for args in [
        &["verify", "--suite", "eq7"][..],
        &["verify", "--suite", "eq2", "--kind", "eq4"],
        &["verify", "--suite", "eq3", "--C", "0.2"],
        &["verify", "--suite", "limits", "--kind", "eq5", "--C", "0"],
    ] {
        assert_eq!(run(args, dir.path()).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn verify_polaron_identity() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["verify", "--suite", "eq3", "--g", "1", "-o", "eq3.json"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&dir.path().join("eq3.json"));
    let reports = doc["oracles"][0]["report"].as_array().unwrap();
    assert_eq!(reports[0]["n_max"], 200);
    assert!(reports[0]["residual"].as_f64().unwrap() < 1e-8);
}

#[test]
fn presets_listing() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["presets"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["fig1a", "fig1b", "fig2a", "fig2b"] {
        assert!(text.contains(name));
    }
    let out = run(&["presets", "--json"], dir.path());
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc.as_array().unwrap().len(), 4);
    assert_eq!(doc[1]["spec"]["base"]["c"], 0.377);
}
