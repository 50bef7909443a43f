use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn randpoly(args: &[&str], out_dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_randpoly"))
        .args(args)
        .arg("--out-dir")
        .arg(out_dir)
        .output()
        .expect("binary runs")
}

fn files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                fs::read(&p).unwrap(),
            )
        })
        .collect();
    out.sort();
    out
}

const SWEEP: &[&str] = &[
    "sweep",
    "--alpha",
    "0,3",
    "--mu",
    "1",
    "--n",
    "6,12,70",
    "--samples",
    "60",
    "--mc-max-n",
    "12",
    "--fit-min-n",
    "6",
    "--bootstrap",
    "100",
];

#[test]
fn identical_runs_write_identical_bytes() {
    let tmp = tempfile::tempdir().unwrap();
    for format in ["csv", "json"] {
        let (a, b) = (
            tmp.path().join(format!("a_{format}")),
            tmp.path().join(format!("b_{format}")),
        );
        for dir in [&a, &b] {
            let mut args = SWEEP.to_vec();
            args.extend(["--format", format]);
            assert!(randpoly(&args, dir).status.success());
            let out = randpoly(
                &[
                    "count",
                    "--alpha",
                    "1.5",
                    "--n",
                    "9",
                    "--samples",
                    "30",
                    "--format",
                    format,
                ],
                dir,
            );
            assert!(out.status.success());
            let out = randpoly(
                &[
                    "localize",
                    "--alpha",
                    "3",
                    "--n",
                    "10",
                    "--samples",
                    "30",
                    "--format",
                    format,
                ],
                dir,
            );
            assert!(out.status.success());
        }
        let (fa, fb) = (files(&a), files(&b));
        let names: Vec<&str> = fa.iter().map(|f| f.0.as_str()).collect();
        assert!(names.contains(&"timings.json"), "{names:?}");
        assert!(names.len() >= 8, "{names:?}");
        for (x, y) in fa.iter().zip(&fb) {
            assert_eq!(x.0, y.0);
            if x.0 != "timings.json" {
                assert!(x.1 == y.1, "{} differs between runs", x.0);
            }
        }
    }
}

#[test]
fn ndjson_records_follow_the_schema() {
    let tmp = tempfile::tempdir().unwrap();
    let mut args = SWEEP.to_vec();
    args.extend(["--format", "json"]);
    let out = randpoly(&args, tmp.path());
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    let text = fs::read_to_string(tmp.path().join("sweep.ndjson")).unwrap();
    let lines: Vec<Value> = text
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    let meta = &lines[0];
    assert_eq!(meta["record"], "meta");
    assert_eq!(meta["command"], "sweep");
    assert!(meta["version"]
        .as_str()
        .unwrap()
        .starts_with(env!("CARGO_PKG_VERSION")));
    assert_eq!(meta["specs"].as_array().unwrap().len(), 9);
    assert_eq!(meta["config"]["samples"], 60);
    let cells = &lines[1..];
    assert_eq!(cells.len(), 9);
    for c in cells {
        assert_eq!(c["record"], "sweep");
        for key in [
            "profile",
            "param",
            "n",
            "quadrature",
            "quadrature_error",
            "mc_mean",
            "mc_stderr",
            "seeds_used",
            "skip_reason",
            "errors",
        ] {
            assert!(c.get(key).is_some(), "missing {key} in {c}");
        }
        assert!(c["quadrature"].is_f64());
        let n = c["n"].as_u64().unwrap();
        if n <= 12 {
            assert_eq!(c["seeds_used"], 60);
            assert!(c["mc_stderr"].as_f64().unwrap() > 0.0);
            assert!(c["skip_reason"].is_null());
        } else {
            assert!(c["mc_mean"].is_null());
            assert!(c["skip_reason"].as_str().unwrap().contains("mc_max_n"));
        }
    }

    let fits = fs::read_to_string(tmp.path().join("fits.ndjson")).unwrap();
    let fits: Vec<Value> = fits
        .lines()
        .skip(1)
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    let laws: Vec<&str> = fits.iter().map(|f| f["law"].as_str().unwrap()).collect();
    assert_eq!(laws, ["logarithmic", "linear", "linear"]);
    assert!(fits[1]["last_fraction"].as_f64().unwrap() > 0.9);
}

#[test]
fn csv_outputs_embed_version_and_spec() {
    let tmp = tempfile::tempdir().unwrap();
    let out = randpoly(
        &["density", "--mu", "0.5", "--n", "20", "--points", "5"],
        tmp.path(),
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = fs::read_to_string(tmp.path().join("density_mu0.5_n20.csv")).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# randpoly "));
    assert_eq!(lines.next().unwrap(), "# command: density");
    assert!(lines.next().unwrap().starts_with("# config: {"));
    let spec: Value =
        serde_json::from_str(lines.next().unwrap().strip_prefix("# spec: ").unwrap()).unwrap();
    assert_eq!(spec["profile"]["mu"], 0.5);
    assert_eq!(spec["degree"], 20);
    assert_eq!(lines.next().unwrap(), "coordinate,coord,value,method");
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 5);
    assert!(rows
        .iter()
        .all(|r| r.starts_with("Y,") && r.ends_with(",EXACT_MOMENTS")));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let tmp = tempfile::tempdir().unwrap();
    let config = tmp.path().join("run.toml");
    fs::write(
        &config,
        "seed_base = 40\nsamples = 7\nalpha = [3.0]\nn = [5]\nformat = \"json\"\n[scan]\ngrid_points_per_unit_y = 8\nmax_refine_depth = 6\noracle_limit = 64\ntallies = false\n",
    )
    .unwrap();
    let out = randpoly(
        &[
            "count",
            "--config",
            config.to_str().unwrap(),
            "--samples",
            "3",
        ],
        tmp.path(),
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = fs::read_to_string(tmp.path().join("count_alpha3_n5.ndjson")).unwrap();
    let rows: Vec<Value> = text
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(rows[0]["config"]["scan"]["grid_points_per_unit_y"], 8);
    let seeds: Vec<u64> = rows[1..]
        .iter()
        .map(|r| r["seed"].as_u64().unwrap())
        .collect();
    assert_eq!(seeds, [40, 41, 42]);
}

#[test]
fn exit_codes_report_failures() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = randpoly(
        &["sweep", "--alpha", "1.5", "--n", "8", "--rel-tol", "0.5"],
        tmp.path(),
    );
    assert_eq!(bad.status.code(), Some(2));
    let canary = randpoly(
        &[
            "verify",
            "--c2-scale",
            "1.01",
            "--oracle-draws",
            "3",
            "--samples",
            "50",
            "--n",
            "8",
        ],
        tmp.path(),
    );
    assert_eq!(canary.status.code(), Some(1));
    let stdout = String::from_utf8_lossy(&canary.stdout);
    assert!(
        stdout.lines().any(|l| l.starts_with("FAIL compact_form")),
        "{stdout}"
    );
    let text = fs::read_to_string(tmp.path().join("verify.csv")).unwrap();
    assert!(text.lines().any(|l| l.starts_with("compact_form,false,")));
    assert!(text.lines().any(|l| l.starts_with("oracle_gate,true,")));
}
