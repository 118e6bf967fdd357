//! CSV, JSON and manifest rendering.

use inacc_core::group::IrrepLabel;
use serde::Serialize;

use crate::config::{ExperimentConfig, Source};
use crate::ensemble::{Ensemble, OracleRun};
use crate::error::CliResult;

/// Probabilities below this are written as exactly zero.
pub const P_FLOOR: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

/// Shortest round-trip decimal form, so identical bits give identical text.
pub fn num(x: f64) -> String {
    format!("{x}")
}

fn prob(x: f64) -> String {
    if x.abs() < P_FLOOR {
        "0".into()
    } else {
        num(x)
    }
}

pub fn label_column(label: &IrrepLabel) -> String {
    let parts: Vec<String> = label.0.iter().map(|x| x.to_string()).collect();
    format!("p_{}", parts.join("_"))
}

/// `# key: value` metadata lines.
pub fn metadata(command: &str, cfg: &ExperimentConfig) -> CliResult<Vec<(String, String)>> {
    let labels = cfg.report_labels()?;
    let lambdas: Vec<String> = cfg.lambda_grid.iter().map(|&l| num(l)).collect();
    let mut meta = vec![
        ("command".to_string(), command.to_string()),
        ("version".to_string(), env!("CARGO_PKG_VERSION").to_string()),
        ("source".to_string(), cfg.source.name()),
        ("group".to_string(), format!("{:?}", cfg.group()?.factors())),
        ("samples".to_string(), cfg.samples.to_string()),
        ("seed".to_string(), cfg.seed.to_string()),
        ("lambda_grid".to_string(), lambdas.join(" ")),
        ("keep".to_string(), serde_json::to_string(&cfg.keep)?),
        ("labels".to_string(), labels.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(" ")),
    ];
    if let Source::Preset(p) = &cfg.source {
        meta.push(("cocycle".to_string(), serde_json::to_string(&p.cocycle.t)?));
        meta.push(("m".to_string(), serde_json::to_string(&p.m)?));
        meta.push(("n".to_string(), serde_json::to_string(&p.n)?));
    }
    if let Some(gens) = &cfg.subgroup {
        meta.push(("subgroup".to_string(), gens.iter().map(|g| g.to_string()).collect::<Vec<_>>().join(" ")));
    }
    Ok(meta)
}

fn write_meta(out: &mut String, meta: &[(String, String)]) {
    for (k, v) in meta {
        out.push_str(&format!("# {k}: {v}\n"));
    }
}

fn csv_text(header: Vec<String>, records: Vec<Vec<String>>) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&header)?;
    for r in records {
        w.write_record(&r)?;
    }
    let bytes = w.into_inner().map_err(|e| crate::error::CliError::Runtime(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// One row per successful report; failed samples follow as `# error` lines.
pub fn ensemble_csv(meta: &[(String, String)], labels: &[IrrepLabel], ensemble: &Ensemble) -> CliResult<String> {
    let mut header: Vec<String> =
        ["sample_id", "lambda", "E", "E_acc", "E_inacc", "lower", "upper"].iter().map(|s| s.to_string()).collect();
    header.extend(labels.iter().map(label_column));
    header.extend(["seed", "method"].iter().map(|s| s.to_string()));
    let mut records = Vec::new();
    for row in &ensemble.rows {
        if let Ok(r) = &row.outcome {
            let mut rec = vec![
                row.sample_id.to_string(),
                num(row.lambda),
                num(r.e),
                num(r.e_acc),
                num(r.e_inacc),
                num(r.lower_bound),
                num(r.upper_bound),
            ];
            rec.extend(r.p.iter().map(|&p| prob(p)));
            rec.push(row.seed.to_string());
            rec.push(r.method.to_string());
            records.push(rec);
        }
    }
    let mut out = String::new();
    write_meta(&mut out, meta);
    out.push_str(&csv_text(header, records)?);
    for (row, err) in ensemble.errors() {
        out.push_str(&format!("# error: sample {} lambda {}: {err}\n", row.sample_id, num(row.lambda)));
    }
    Ok(out)
}

pub fn ensemble_json(meta: &[(String, String)], ensemble: &Ensemble) -> CliResult<String> {
    #[derive(Serialize)]
    struct Doc<'a> {
        metadata: serde_json::Map<String, serde_json::Value>,
        rows: &'a [crate::ensemble::Row],
    }
    let metadata = meta.iter().map(|(k, v)| (k.clone(), serde_json::Value::String(v.clone()))).collect();
    Ok(serde_json::to_string_pretty(&Doc { metadata, rows: &ensemble.rows })? + "\n")
}

/// Side-by-side fixed-point and oracle values with per-row deviations.
pub fn oracle_csv(meta: &[(String, String)], labels: &[IrrepLabel], run: &OracleRun) -> CliResult<String> {
    let mut header: Vec<String> = ["sample_id", "lambda", "seed", "gap_ratio", "tolerance", "max_deviation"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    for which in ["fp", "oracle"] {
        header.extend(["E", "E_acc", "E_inacc"].iter().map(|q| format!("{q}_{which}")));
        header.extend(labels.iter().map(|l| format!("{}_{which}", label_column(l))));
    }
    let mut records = Vec::new();
    let mut errors = Vec::new();
    for row in &run.rows {
        match row {
            Ok(r) => {
                let mut rec = vec![
                    r.sample_id.to_string(),
                    num(r.lambda),
                    r.seed.to_string(),
                    num(r.gap_ratio),
                    num(r.tolerance),
                    num(r.deviation.max()),
                ];
                for rep in [&r.fixed_point, &r.oracle] {
                    rec.extend([num(rep.e), num(rep.e_acc), num(rep.e_inacc)]);
                    rec.extend(rep.p.iter().map(|&p| prob(p)));
                }
                records.push(rec);
            }
            Err((i, e)) => errors.push(format!("# error: sample {i}: {e}\n")),
        }
    }
    let mut out = String::new();
    write_meta(&mut out, meta);
    out.push_str(&csv_text(header, records)?);
    errors.iter().for_each(|e| out.push_str(e));
    Ok(out)
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Summary {
    pub min: f64,
    pub mean: f64,
    pub max: f64,
}

impl Summary {
    pub fn of(values: impl IntoIterator<Item = f64>) -> Option<Summary> {
        let v: Vec<f64> = values.into_iter().collect();
        if v.is_empty() {
            return None;
        }
        Some(Summary {
            min: v.iter().cloned().fold(f64::INFINITY, f64::min),
            mean: v.iter().sum::<f64>() / v.len() as f64,
            max: v.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Manifest {
    pub command: String,
    pub version: String,
    pub config: ExperimentConfig,
    pub workers: usize,
    pub worker_ranges: Vec<(u64, u64)>,
    pub wall_seconds: f64,
    pub rows: usize,
    pub errors: usize,
    #[serde(rename = "E")]
    pub e: Option<Summary>,
    #[serde(rename = "E_inacc")]
    pub e_inacc: Option<Summary>,
    pub bound_violations: usize,
    pub oracle_failures: Option<usize>,
    pub note: String,
}

pub const SCALE_NOTE: &str = "desk-scale ensemble: default 1000 samples per family";

impl Manifest {
    pub fn for_ensemble(command: &str, cfg: &ExperimentConfig, ensemble: &Ensemble) -> Manifest {
        Manifest {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config: cfg.clone(),
            workers: cfg.workers,
            worker_ranges: ensemble.ranges.clone(),
            wall_seconds: ensemble.wall_seconds,
            rows: ensemble.rows.len(),
            errors: ensemble.errors().count(),
            e: Summary::of(ensemble.reports().map(|r| r.e)),
            e_inacc: Summary::of(ensemble.reports().map(|r| r.e_inacc)),
            bound_violations: ensemble.bound_violations(),
            oracle_failures: None,
            note: SCALE_NOTE.to_string(),
        }
    }

    pub fn for_oracle(cfg: &ExperimentConfig, run: &OracleRun) -> Manifest {
        let ok: Vec<_> = run.rows.iter().filter_map(|r| r.as_ref().ok()).collect();
        Manifest {
            command: "oracle".to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config: cfg.clone(),
            workers: cfg.workers,
            worker_ranges: run.ranges.clone(),
            wall_seconds: run.wall_seconds,
            rows: run.rows.len(),
            errors: run.rows.len() - ok.len(),
            e: Summary::of(ok.iter().map(|r| r.fixed_point.e)),
            e_inacc: Summary::of(ok.iter().map(|r| r.fixed_point.e_inacc)),
            bound_violations: ok.iter().filter(|r| !r.fixed_point.bound_satisfied).count(),
            oracle_failures: Some(run.failures().len()),
            note: SCALE_NOTE.to_string(),
        }
    }
}
