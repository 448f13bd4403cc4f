//! End-to-end runs of the `fastcur` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const REPORT_HEADER: &str = "algorithm,input,m,n,k,l,r,b,seed,rel_err_sampled,rel_err_exact,flops,stage1_flops,wall_ms,rank_deficient,adaptive_level,retries,converged";
const GENP_HEADER: &str =
    "mode,input,n,block,multiplier,b,seed,ok,failed_at,growth,residual,flops,wall_ms,retries";

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_fastcur"));
    c.env_remove("FASTCUR_OUT_DIR");
    c
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
}

fn run(args: &[&str], dir: &Path) -> Output {
    bin().args(args).arg("--out-dir").arg(dir).output().unwrap()
}

fn read(dir: &Path, file: &str) -> String {
    std::fs::read_to_string(dir.join(file)).unwrap()
}

/// Blanks the `wall_ms` column (CSV) or value (JSON).
fn mask_wall(s: &str) -> String {
    if s.trim_start().starts_with('[') {
        s.lines()
            .map(|l| {
                if l.trim_start().starts_with("\"wall_ms\"") {
                    "\"wall_ms\": _,"
                } else {
                    l
                }
            })
            .collect::<Vec<_>>()
            .join("\n")
    } else {
        let mut rd = csv::Reader::from_reader(s.as_bytes());
        let header = rd.headers().unwrap().clone();
        let col = header.iter().position(|h| h == "wall_ms").unwrap();
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&header).unwrap();
        for rec in rd.records() {
            let rec = rec.unwrap();
            w.write_record(
                rec.iter()
                    .enumerate()
                    .map(|(i, f)| if i == col { "_" } else { f }),
            )
            .unwrap();
        }
        String::from_utf8(w.into_inner().unwrap()).unwrap()
    }
}

#[test]
fn approx_writes_one_row_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &[
            "approx",
            "--gen",
            "average:200x200:r5:noise1e-10",
            "--alg",
            "twostage",
            "--k",
            "20",
            "--l",
            "20",
            "--r",
            "5",
            "--seeds",
            "1..10",
            "--out",
            "csv",
        ],
        dir.path(),
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = read(dir.path(), "approx.csv");
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], REPORT_HEADER);
    assert_eq!(lines.len(), 11);
    assert!(!dir.path().join("approx.json").exists());
}

#[test]
fn json_key_order_is_fixed() {
    let dir = tempfile::tempdir().unwrap();
    let hilbert = data("hilbert100.mtx");
    let out = run(
        &[
            "approx",
            "--in",
            hilbert.to_str().unwrap(),
            "--alg",
            "cross",
            "--l",
            "10",
            "--out",
            "json",
        ],
        dir.path(),
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let json = read(dir.path(), "approx.json");
    let keys: Vec<&str> = json
        .lines()
        .filter_map(|l| {
            l.trim()
                .strip_prefix('"')
                .and_then(|l| l.split_once('"'))
                .map(|(k, _)| k)
        })
        .collect();
    assert_eq!(keys.join(","), REPORT_HEADER);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 1);
    assert!(v[0]["rel_err_exact"].as_f64().unwrap() >= 0.0);
    assert!(v[0]["rel_err_sampled"].as_f64().unwrap() >= 0.0);
}

#[test]
fn identical_runs_give_identical_bytes_except_wall_time() {
    for args in [
        vec![
            "approx",
            "--gen",
            "needle:100x100:r2",
            "--alg",
            "preprocessed",
            "--k",
            "12",
            "--l",
            "12",
            "--r",
            "2",
            "--left",
            "bidiag8p",
            "--right",
            "gaussian",
            "--seeds",
            "1..6",
        ],
        vec![
            "approx",
            "--gen",
            "average:80x90:r4:noise1e-8",
            "--alg",
            "adaptive",
            "--r",
            "4",
            "--seeds",
            "3,1,2",
        ],
        vec![
            "genp",
            "--gen",
            "singular:40:d3",
            "--mode",
            "preprocessed",
            "--seeds",
            "1..4",
        ],
    ] {
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        assert!(run(&args, a.path()).status.success());
        assert!(run(&args, b.path()).status.success());
        let name = args[0];
        for ext in ["csv", "json"] {
            let f = format!("{name}.{ext}");
            assert_eq!(
                mask_wall(&read(a.path(), &f)),
                mask_wall(&read(b.path(), &f)),
                "{args:?} {ext}"
            );
        }
    }
}

#[test]
fn seeds_are_emitted_in_the_order_given() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &[
            "approx",
            "--gen",
            "average:50x50:r2",
            "--alg",
            "twostage",
            "--k",
            "6",
            "--l",
            "6",
            "--r",
            "2",
            "--seeds",
            "9,3,5",
            "--out",
            "csv",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let csv = read(dir.path(), "approx.csv");
    let seeds: Vec<String> = csv::Reader::from_reader(csv.as_bytes())
        .records()
        .map(|r| r.unwrap()[8].to_string())
        .collect();
    assert_eq!(seeds, ["9", "3", "5"]);
}

#[test]
fn genp_header_and_failures_as_data() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &[
            "genp",
            "--gen",
            "singular:30:d3",
            "--seeds",
            "1..3",
            "--out",
            "csv",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let csv = read(dir.path(), "genp.csv");
    assert_eq!(csv.lines().next().unwrap(), GENP_HEADER);
    for l in csv.lines().skip(1) {
        assert!(l.contains(",false,2,"), "{l}");
    }
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(
        &cfg,
        r#"{"gen": "average:60x60:r3", "alg": "twostage", "k": 9, "l": 9, "r": 3, "seeds": [1, 2], "out": "csv", "name": "cfg"}"#,
    )
    .unwrap();
    let out = run(
        &["approx", "--config", cfg.to_str().unwrap(), "--k", "12"],
        dir.path(),
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = read(dir.path(), "cfg.csv");
    assert_eq!(csv.lines().count(), 3);
    assert!(csv
        .lines()
        .skip(1)
        .all(|l| l.split(',').nth(4) == Some("12")));
}

#[test]
fn out_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args([
            "approx",
            "--gen",
            "average:30x30:r2",
            "--alg",
            "twostage",
            "--k",
            "5",
            "--l",
            "5",
            "--r",
            "2",
            "--seeds",
            "1",
            "--out",
            "csv",
        ])
        .env("FASTCUR_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(dir.path().join("approx.csv").exists());
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let missing_cfg = dir.path().join("none.json");
    let bad_cfg = dir.path().join("bad.json");
    std::fs::write(&bad_cfg, "{not json").unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec!["approx", "--k"],
        vec![
            "approx",
            "--gen",
            "average:20x20:r2",
            "--alg",
            "twostage",
            "--k",
            "5",
            "--l",
            "5",
            "--r",
            "2",
        ],
        vec![
            "approx",
            "--gen",
            "average:20x20:r2",
            "--alg",
            "twostage",
            "--k",
            "50",
            "--l",
            "5",
            "--r",
            "2",
            "--seeds",
            "1",
        ],
        vec![
            "approx",
            "--gen",
            "average:20x20:r2",
            "--alg",
            "twostage",
            "--l",
            "5",
            "--r",
            "2",
            "--seeds",
            "1",
        ],
        vec![
            "approx",
            "--gen",
            "nonsense:3",
            "--alg",
            "cross",
            "--l",
            "2",
            "--seeds",
            "1",
        ],
        vec![
            "approx",
            "--in",
            "/no/such/file.mtx",
            "--alg",
            "cross",
            "--l",
            "2",
        ],
        vec!["approx", "--config", missing_cfg.to_str().unwrap()],
        vec!["approx", "--config", bad_cfg.to_str().unwrap()],
        vec![
            "approx",
            "--gen",
            "average:20x20:r2",
            "--alg",
            "twostage",
            "--k",
            "5",
            "--l",
            "5",
            "--r",
            "2",
            "--seeds",
            "5..1",
        ],
        vec![
            "genp",
            "--gen",
            "singular:10:d3",
            "--mode",
            "block",
            "--block",
            "11",
            "--seeds",
            "1",
        ],
        vec![
            "genp",
            "--gen",
            "singular:10:d3",
            "--mode",
            "block",
            "--seeds",
            "1",
        ],
        vec!["genp", "--gen", "average:10x12:r2", "--seeds", "1"],
        vec![
            "genp",
            "--gen",
            "singular:10:d3",
            "--mode",
            "preprocessed",
            "--left",
            "hadamard",
            "--seeds",
            "1",
        ],
    ];
    for args in cases {
        let out = run(&args, dir.path());
        assert_eq!(
            out.status.code(),
            Some(2),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn numerical_failure_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("huge.mtx");
    std::fs::write(
        &p,
        "%%MatrixMarket matrix array real general\n2 2\n1e308\n1e308\n1e308\n-1e308\n",
    )
    .unwrap();
    let out = run(
        &[
            "approx",
            "--in",
            p.to_str().unwrap(),
            "--alg",
            "twostage",
            "--k",
            "2",
            "--l",
            "2",
            "--r",
            "2",
        ],
        dir.path(),
    );
    assert_eq!(
        out.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn help_exits_0() {
    let out = bin().arg("--help").output().unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("approx"));
}

mod plots {
    use super::*;

    fn reports(dir: &Path) -> PathBuf {
        let out = run(
            &[
                "approx",
                "--gen",
                "average:60x60:r3",
                "--alg",
                "twostage",
                "--k",
                "8",
                "--l",
                "8",
                "--r",
                "3",
                "--seeds",
                "1..3",
                "--name",
                "three",
            ],
            dir,
        );
        assert!(out.status.success());
        dir.join("three.json")
    }

    fn plot(input: &Path, kind: &str, out: &Path) -> Output {
        bin()
            .args([
                "plot",
                input.to_str().unwrap(),
                "--kind",
                kind,
                "--out",
                out.to_str().unwrap(),
            ])
            .output()
            .unwrap()
    }

    #[test]
    fn three_reports_three_points_and_stable_bytes() {
        let dir = tempfile::tempdir().unwrap();
        let input = reports(dir.path());
        let (a, b) = (dir.path().join("a.svg"), dir.path().join("b.svg"));
        assert!(plot(&input, "error_vs_k", &a).status.success());
        assert!(plot(&input, "error_vs_k", &b).status.success());
        let svg = std::fs::read_to_string(&a).unwrap();
        assert_eq!(svg, std::fs::read_to_string(&b).unwrap());
        assert_eq!(svg.matches("<circle").count(), 3);
        assert!(svg.starts_with("<?xml") && svg.contains(r#"version="1.1""#));
    }

    #[test]
    fn csv_input_and_all_kinds() {
        let dir = tempfile::tempdir().unwrap();
        reports(dir.path());
        let csv = dir.path().join("three.csv");
        for kind in ["error_vs_k", "flops_vs_n", "success_vs_b"] {
            let out = plot(&csv, kind, &dir.path().join(format!("{kind}.svg")));
            assert!(
                out.status.success(),
                "{kind}: {}",
                String::from_utf8_lossy(&out.stderr)
            );
        }
    }

    #[test]
    fn empty_reports_exit_2() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("empty.json");
        std::fs::write(&p, "[]").unwrap();
        assert_eq!(
            plot(&p, "error_vs_k", &dir.path().join("x.svg"))
                .status
                .code(),
            Some(2)
        );
    }
}
