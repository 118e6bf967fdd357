use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn inacc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_inacc")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

struct Table {
    headers: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn parse(text: &str) -> Table {
        let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
        let headers = reader.headers().unwrap().iter().map(String::from).collect();
        let rows = reader.records().map(|r| r.unwrap().iter().map(String::from).collect()).collect();
        Table { headers, rows }
    }

    fn column(&self, name: &str) -> Vec<f64> {
        let i = self.headers.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"));
        self.rows.iter().map(|r| r[i].parse().unwrap()).collect()
    }
}

fn read(dir: &Path, file: &str) -> String {
    std::fs::read_to_string(dir.join(file)).unwrap_or_else(|e| panic!("{file}: {e}"))
}

#[test]
fn group_info_reports_centre_and_bounds() {
    let out = inacc(&["group-info", "--factors", "4,2", "--cocycle", "0,1;0,0", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let info: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let text = info.to_string();
    assert!(text.contains("\"d_omega\":2"), "{text}");
    let out = inacc(&["group-info", "--preset", "mnc-z2z2"]);
    assert_eq!(code(&out), 0);
    assert!(!stdout(&out).is_empty());
}

#[test]
fn validation_errors_exit_with_two() {
    assert_eq!(code(&inacc(&["analyze", "--preset", "no-such-phase"])), 2);
    assert_eq!(code(&inacc(&["analyze", "--preset", "mnc-z2z2", "--lambda", "1.5"])), 2);
    assert_eq!(code(&inacc(&["analyze", "--preset", "mnc-z2z2", "--samples", "0"])), 2);
    assert_eq!(code(&inacc(&["oracle", "--source", "cluster", "--sites", "6", "--block", "6"])), 2);
    assert_eq!(code(&inacc(&["figure", "fig9"])), 2);
    assert_eq!(code(&inacc(&["analyze", "--bogus-flag"])), 2);
}

#[test]
fn mnc_ensemble_is_constant_and_exits_cleanly() {
    let out = inacc(&["analyze", "--preset", "mnc-z2z2", "--samples", "200", "--seed", "7"]);
    assert_eq!(code(&out), 0);
    let table = Table::parse(&stdout(&out));
    let e_inacc = table.column("E_inacc");
    assert_eq!(e_inacc.len(), 200);
    assert!(e_inacc.iter().all(|e| (e - 2.0).abs() < 1e-8));
    for label in ["p_0_0", "p_0_1", "p_1_0", "p_1_1"] {
        assert!(table.column(label).iter().all(|p| (p - 0.25).abs() < 1e-8));
    }
}

#[test]
fn cluster_under_subgroup_and_oracle() {
    let out = inacc(&["analyze", "--source", "cluster", "--samples", "1", "--subgroup", "1,0"]);
    assert_eq!(code(&out), 0);
    let e_inacc = Table::parse(&stdout(&out)).column("E_inacc");
    assert!((e_inacc[0] - 1.0).abs() < 1e-10);

    let out = inacc(&["oracle", "--source", "cluster", "--samples", "1", "--sites", "8", "--block", "4"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn oracle_beyond_tolerance_exits_with_three() {
    let out = inacc(&["oracle", "--preset", "triv-z2z2", "--samples", "2", "--sites", "6", "--block", "3", "--c", "0"]);
    assert_eq!(code(&out), 3, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn config_file_and_json_output() {
    let dir = TempDir::new().unwrap();
    let config = dir.path().join("run.json");
    std::fs::write(
        &config,
        r#"{"preset": "nonmnc-z4z2", "samples": 6, "seed": 3, "lambda": [1.0, 0.1], "keep": [[0, 0], [2, 0]]}"#,
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let cfg = config.to_str().unwrap();
    let out = inacc(&["analyze", "--config", cfg, "--format", "json", "--out", out_dir.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let data: Value = serde_json::from_str(&read(&out_dir, "analyze.json")).unwrap();
    assert!(data.to_string().contains("E_inacc"));
    let manifest: Value = serde_json::from_str(&read(&out_dir, "manifest.json")).unwrap();
    assert_eq!(manifest["rows"], 12);
    assert_eq!(manifest["bound_violations"], 0);

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"preset": "mnc-z2z2", "unknown_field": 1}"#).unwrap();
    assert_eq!(code(&inacc(&["analyze", "--config", bad.to_str().unwrap()])), 2);
}

#[test]
fn output_is_identical_across_worker_counts() {
    let run = |w: &str| stdout(&inacc(&["interpolate", "--preset", "triv-z4z2", "--samples", "6", "--seed", "2", "--workers", w]));
    assert_eq!(run("1"), run("3"));
}

#[test]
fn toy_trace_connects_two_to_zero() {
    let out = inacc(&["interpolate", "--source", "toy", "--samples", "1"]);
    assert_eq!(code(&out), 0);
    let table = Table::parse(&stdout(&out));
    let (lambda, e, e_inacc) = (table.column("lambda"), table.column("E"), table.column("E_inacc"));
    assert_eq!(lambda.len(), 20);
    assert_eq!(lambda[0], 1.0);
    assert!((e[0] - 4.0).abs() < 1e-8);
    assert!((e_inacc[0] - 2.0).abs() < 1e-8);
    assert!(*e_inacc.last().unwrap() < 0.05);
    assert!(e_inacc.windows(2).all(|w| w[1] <= w[0] + 1e-9));
}

#[test]
fn figures_write_data_svg_and_manifests() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().to_str().unwrap();
    for fig in ["fig2", "fig3", "fig4", "fig5", "fig6"] {
        let res = inacc(&["figure", fig, "--samples", "4", "--out", out, "--format", "svg"]);
        assert_eq!(code(&res), 0, "{fig}: {}", String::from_utf8_lossy(&res.stderr));
        let manifest: Value = serde_json::from_str(&read(dir.path(), &format!("{fig}_manifest.json"))).unwrap();
        assert!(manifest.as_array().is_some_and(|m| !m.is_empty()));
    }
    for file in ["fig2.svg", "fig4.svg", "fig5.svg", "fig6.svg", "fig3_mnc-z2z2.svg"] {
        assert!(read(dir.path(), file).ends_with("</svg>\n"), "{file}");
    }

    let toy = Table::parse(&read(dir.path(), "fig2_toy.csv"));
    assert!((toy.column("E_inacc")[0] - 2.0).abs() < 1e-8);

    let mnc = Table::parse(&read(dir.path(), "fig3_mnc-z2z2.csv"));
    assert!(mnc.column("p_1_1").iter().all(|p| (p - 0.25).abs() < 1e-8));

    let hist = read(dir.path(), "fig4_hist.csv");
    let counted: usize = hist
        .lines()
        .filter(|l| !l.starts_with('#') && l.starts_with(|c: char| c.is_ascii_digit()))
        .map(|l| l.rsplit(',').next().unwrap().parse::<usize>().unwrap())
        .sum();
    assert_eq!(counted, 3 * 4);
}
