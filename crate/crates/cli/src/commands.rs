//! Subcommand bodies. Each returns named artifacts plus a status; the
//! binary decides where artifacts go and maps the status to an exit code.

use inacc_core::factory::{default_lambda_grid, REFERENCE_SEED};
use inacc_core::group::{Group, IrrepLabel};
use inacc_core::observables::{bound_report, degeneracy_classes};
use inacc_core::projrep::{projective_centre, Cocycle, PhaseRep};
use serde::Serialize;

use crate::config::{ConfigFile, ExperimentConfig, OracleSize};
use crate::ensemble::{run_analysis, run_oracle, Ensemble};
use crate::error::{CliError, CliResult};
use crate::output::{self, Format, Manifest};
use crate::svg::{self, Series};

#[derive(Clone, Debug, PartialEq)]
pub struct Artifact {
    pub file: String,
    pub contents: String,
    /// Printed to stdout when no output directory is given.
    pub primary: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    /// Samples that could not be built or analysed.
    Failed(String),
    /// Bound violation or oracle deviation beyond tolerance.
    Violation(String),
}

#[derive(Clone, Debug)]
pub struct CommandOutput {
    pub artifacts: Vec<Artifact>,
    pub status: Status,
}

impl CommandOutput {
    pub fn artifact(&self, file: &str) -> Option<&Artifact> {
        self.artifacts.iter().find(|a| a.file == file)
    }
}

fn artifact(file: impl Into<String>, contents: String, primary: bool) -> Artifact {
    Artifact { file: file.into(), contents, primary }
}

fn combine(statuses: impl IntoIterator<Item = Status>) -> Status {
    let mut worst = Status::Ok;
    for s in statuses {
        worst = match (&worst, s) {
            (Status::Violation(_), _) => worst,
            (_, v @ Status::Violation(_)) => v,
            (Status::Failed(_), _) => worst,
            (_, f @ Status::Failed(_)) => f,
            _ => worst,
        };
    }
    worst
}

fn ensemble_status(what: &str, ensemble: &Ensemble) -> Status {
    let violations = ensemble.bound_violations();
    let errors = ensemble.errors().count();
    if violations > 0 {
        Status::Violation(format!("{what}: {violations} bound violation(s)"))
    } else if errors > 0 {
        Status::Failed(format!("{what}: {errors} sample(s) failed"))
    } else {
        Status::Ok
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GroupInfo {
    pub factors: Vec<usize>,
    pub cocycle: Vec<Vec<usize>>,
    pub order: usize,
    pub centre: Vec<String>,
    pub centre_order: usize,
    pub d_omega: usize,
    pub irrep_classes: usize,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub degeneracy_classes: Vec<Vec<String>>,
}

pub fn group_info(factors: &[usize], t: Option<Vec<Vec<usize>>>) -> CliResult<GroupInfo> {
    let invalid = |e: inacc_core::Error| CliError::Validation(e.to_string());
    let group = Group::new(factors).map_err(invalid)?;
    let k = group.rank();
    let t = t.unwrap_or_else(|| vec![vec![0; k]; k]);
    let cocycle = Cocycle::new(&group, t.clone()).map_err(invalid)?;
    let classes = projective_centre(&cocycle).order();
    let phase = PhaseRep::build(&cocycle, &vec![1; classes], REFERENCE_SEED).map_err(invalid)?;
    let bounds = bound_report(&cocycle, 0.0);
    Ok(GroupInfo {
        factors: factors.to_vec(),
        cocycle: t,
        order: group.order(),
        centre: phase.centre.members().iter().map(|g| g.to_string()).collect(),
        centre_order: phase.centre.order(),
        d_omega: phase.d_omega,
        irrep_classes: phase.classes.len(),
        lower_bound: bounds.lower,
        upper_bound: bounds.upper,
        degeneracy_classes: degeneracy_classes(&group, &phase.centre)
            .into_iter()
            .map(|c| c.iter().map(|l| l.to_string()).collect())
            .collect(),
    })
}

pub fn group_info_text(info: &GroupInfo) -> String {
    let classes: Vec<String> = info.degeneracy_classes.iter().map(|c| format!("{{{}}}", c.join(" "))).collect();
    format!(
        "group        Z{}\ncocycle      {:?}\n|G|          {}\nk            {{{}}}\n|k|          {}\nD_omega      {}\nirrep classes {}\nbounds       [{}, {}]\ndegeneracy   {}\n",
        info.factors.iter().map(|f| f.to_string()).collect::<Vec<_>>().join("xZ"),
        info.cocycle,
        info.order,
        info.centre.join(" "),
        info.centre_order,
        info.d_omega,
        info.irrep_classes,
        info.lower_bound,
        info.upper_bound,
        classes.join(" ")
    )
}

fn scatter_series(name: &str, ensemble: &Ensemble, lambda: Option<f64>, line: bool) -> Series {
    Series {
        name: name.to_string(),
        points: ensemble
            .rows
            .iter()
            .filter(|r| lambda.is_none_or(|l| r.lambda == l))
            .filter_map(|r| r.report().map(|rep| (rep.e, rep.e_inacc)))
            .collect(),
        line,
    }
}

/// `analyze` and `interpolate`: one ensemble, data file plus manifest.
pub fn analyze(command: &str, cfg: &ExperimentConfig, format: Format) -> CliResult<CommandOutput> {
    let ensemble = run_analysis(cfg)?;
    let meta = output::metadata(command, cfg)?;
    let labels = cfg.report_labels()?;
    let mut artifacts = Vec::new();
    match format {
        Format::Json => artifacts.push(artifact(format!("{command}.json"), output::ensemble_json(&meta, &ensemble)?, true)),
        Format::Csv | Format::Svg => {
            artifacts.push(artifact(format!("{command}.csv"), output::ensemble_csv(&meta, &labels, &ensemble)?, true))
        }
    }
    if format == Format::Svg {
        let series: Vec<Series> = cfg
            .lambda_grid
            .iter()
            .map(|&l| scatter_series(&format!("λ = {}", output::num(l)), &ensemble, Some(l), false))
            .collect();
        let title = format!("{} ({command})", cfg.source.name());
        artifacts.push(artifact(format!("{command}.svg"), svg::scatter(&title, "E", "E_inacc", &series), false));
    }
    let manifest = Manifest::for_ensemble(command, cfg, &ensemble);
    artifacts.push(artifact("manifest.json", serde_json::to_string_pretty(&manifest)? + "\n", false));
    Ok(CommandOutput { artifacts, status: ensemble_status(command, &ensemble) })
}

pub fn oracle(cfg: &ExperimentConfig, c: f64, format: Format) -> CliResult<CommandOutput> {
    let size = cfg.oracle.unwrap_or(OracleSize { n: 10, n_a: 5 });
    let run = run_oracle(cfg, size, c)?;
    let meta = {
        let mut m = output::metadata("oracle", cfg)?;
        m.push(("oracle".into(), format!("N={} N_A={} C={}", size.n, size.n_a, output::num(c))));
        m
    };
    let data = match format {
        Format::Json => artifact("oracle.json", serde_json::to_string_pretty(&run.rows)? + "\n", true),
        _ => artifact("oracle.csv", output::oracle_csv(&meta, &cfg.report_labels()?, &run)?, true),
    };
    let manifest = Manifest::for_oracle(cfg, &run);
    let failures = run.failures();
    let errors = run.rows.iter().filter(|r| r.is_err()).count();
    let status = if !failures.is_empty() {
        let worst = failures.iter().map(|r| r.deviation.max()).fold(0.0, f64::max);
        Status::Violation(format!("{} sample(s) beyond oracle tolerance (worst deviation {worst:.3e})", failures.len()))
    } else if manifest.bound_violations > 0 {
        Status::Violation(format!("{} bound violation(s)", manifest.bound_violations))
    } else if errors > 0 {
        Status::Failed(format!("{errors} sample(s) failed"))
    } else {
        Status::Ok
    };
    Ok(CommandOutput {
        artifacts: vec![data, artifact("manifest.json", serde_json::to_string_pretty(&manifest)? + "\n", false)],
        status,
    })
}

pub const FIGURES: [&str; 5] = ["fig2", "fig3", "fig4", "fig5", "fig6"];

/// Shared knobs for figure ensembles.
#[derive(Clone, Debug, Default)]
pub struct FigureOptions {
    pub samples: Option<u64>,
    pub seed: u64,
    pub workers: Option<usize>,
    pub lambda_grid: Option<Vec<f64>>,
    pub svg: bool,
}

fn file_stem(name: &str) -> String {
    name.replace('[', "").replace(']', "").replace(',', "-")
}

struct Family {
    cfg: ExperimentConfig,
    ensemble: Ensemble,
}

fn family(raw: ConfigFile, opts: &FigureOptions, samples: u64, lambdas: &[f64]) -> CliResult<Family> {
    let raw = ConfigFile {
        samples: Some(opts.samples.unwrap_or(samples)),
        seed: Some(opts.seed),
        workers: opts.workers,
        lambda_grid: Some(lambdas.to_vec()),
        ..raw
    };
    let cfg = ExperimentConfig::resolve(&raw, lambdas)?;
    let ensemble = run_analysis(&cfg)?;
    Ok(Family { cfg, ensemble })
}

fn preset_raw(name: &str) -> ConfigFile {
    ConfigFile { preset: Some(name.into()), ..Default::default() }
}

fn toy_raw(factors: &[usize]) -> ConfigFile {
    ConfigFile { source: Some("toy".into()), factors: Some(factors.to_vec()), ..Default::default() }
}

fn family_artifacts(fig: &str, label: &str, fam: &Family, artifacts: &mut Vec<Artifact>) -> CliResult<Manifest> {
    let meta = output::metadata(fig, &fam.cfg)?;
    let csv = output::ensemble_csv(&meta, &fam.cfg.report_labels()?, &fam.ensemble)?;
    artifacts.push(artifact(format!("{fig}_{}.csv", file_stem(label)), csv, artifacts.is_empty()));
    Ok(Manifest::for_ensemble(fig, &fam.cfg, &fam.ensemble))
}

/// Scatter of `(E, E_inacc)` per family and λ, plus the toy trace.
fn scatter_figure(fig: &str, presets: &[&str], toy: &[usize], opts: &FigureOptions) -> CliResult<CommandOutput> {
    let lambdas = opts.lambda_grid.clone().unwrap_or_else(|| vec![1.0, 0.5, 0.1]);
    let mut artifacts = Vec::new();
    let mut manifests = Vec::new();
    let mut series = Vec::new();
    let mut statuses = Vec::new();
    for name in presets {
        let fam = family(preset_raw(name), opts, crate::config::DEFAULT_SAMPLES, &lambdas)?;
        manifests.push(family_artifacts(fig, name, &fam, &mut artifacts)?);
        statuses.push(ensemble_status(name, &fam.ensemble));
        for &l in &lambdas {
            series.push(scatter_series(&format!("{name} λ={}", output::num(l)), &fam.ensemble, Some(l), false));
        }
    }
    let toy_opts = FigureOptions { samples: Some(1), ..opts.clone() };
    let fam = family(toy_raw(toy), &toy_opts, 1, &default_lambda_grid())?;
    manifests.push(family_artifacts(fig, "toy", &fam, &mut artifacts)?);
    statuses.push(ensemble_status("toy", &fam.ensemble));
    series.push(scatter_series("toy interpolation", &fam.ensemble, None, true));
    if opts.svg {
        artifacts.push(artifact(format!("{fig}.svg"), svg::scatter(fig, "E", "E_inacc", &series), false));
    }
    artifacts.push(artifact(format!("{fig}_manifest.json"), serde_json::to_string_pretty(&manifests)? + "\n", false));
    Ok(CommandOutput { artifacts, status: combine(statuses) })
}

/// Per-state irrep distributions.
fn fig3(opts: &FigureOptions) -> CliResult<CommandOutput> {
    let mut artifacts = Vec::new();
    let mut manifests = Vec::new();
    let mut statuses = Vec::new();
    for name in ["mnc-z2z2", "triv-z2z2", "triv-z4z2", "nonmnc-z4z2"] {
        let fam = family(preset_raw(name), opts, 4, &[1.0])?;
        manifests.push(family_artifacts("fig3", name, &fam, &mut artifacts)?);
        statuses.push(ensemble_status(name, &fam.ensemble));
        if opts.svg {
            let labels = fam.cfg.report_labels()?;
            let categories: Vec<String> = labels.iter().map(|l| l.to_string()).collect();
            let groups: Vec<(String, Vec<f64>)> =
                fam.ensemble.reports().map(|r| (format!("sample {}", r.seed.unwrap_or(0)), r.p.clone())).take(4).collect();
            artifacts.push(artifact(format!("fig3_{}.svg", file_stem(name)), svg::bars(name, &categories, &groups), false));
        }
    }
    artifacts.push(artifact("fig3_manifest.json".to_string(), serde_json::to_string_pretty(&manifests)? + "\n", false));
    Ok(CommandOutput { artifacts, status: combine(statuses) })
}

/// Bin edges over `[lo, hi]` and counts of `values` (values outside are clamped).
pub fn histogram(values: &[f64], lo: f64, hi: f64, bins: usize) -> Vec<(f64, f64, usize)> {
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for &v in values {
        let i = (((v - lo) / width).floor().max(0.0) as usize).min(bins - 1);
        counts[i] += 1;
    }
    counts.into_iter().enumerate().map(|(i, c)| (lo + i as f64 * width, lo + (i + 1) as f64 * width, c)).collect()
}

/// Labels whose first component is even: the effective Z2×Z2 left after
/// suppressing odd Z4 charges.
pub fn even_first_labels(group: &Group) -> Vec<IrrepLabel> {
    group.labels().into_iter().filter(|l| l.0[0] % 2 == 0).collect()
}

/// `E_inacc` histograms of the filtered non-MNC family per λ.
fn fig4(opts: &FigureOptions) -> CliResult<CommandOutput> {
    let lambdas = opts.lambda_grid.clone().unwrap_or_else(|| vec![1.0, 0.3, 0.01]);
    let group = Group::new(&[4, 2])?;
    let raw = ConfigFile { keep: Some(even_first_labels(&group)), ..preset_raw("nonmnc-z4z2") };
    let fam = family(raw, opts, crate::config::DEFAULT_SAMPLES, &lambdas)?;
    let mut artifacts = Vec::new();
    let manifest = family_artifacts("fig4", "nonmnc-z4z2", &fam, &mut artifacts)?;
    let (lo, hi) = (2.0, 3.0);
    let mut hist_rows = Vec::new();
    let mut groups = Vec::new();
    for &l in &lambdas {
        let values: Vec<f64> = fam.ensemble.rows.iter().filter(|r| r.lambda == l).filter_map(|r| r.report()).map(|r| r.e_inacc).collect();
        let bins = histogram(&values, lo, hi, 20);
        for &(a, b, c) in &bins {
            hist_rows.push(format!("{},{},{},{c}\n", output::num(l), output::num(a), output::num(b)));
        }
        groups.push((format!("λ = {}", output::num(l)), bins));
    }
    let mut hist = String::from("# command: fig4\n# quantity: E_inacc\nlambda,bin_lo,bin_hi,count\n");
    hist_rows.iter().for_each(|r| hist.push_str(r));
    artifacts.push(artifact("fig4_hist.csv", hist, false));
    if opts.svg {
        artifacts.push(artifact("fig4.svg", svg::histogram("fig4", "E_inacc", &groups), false));
    }
    artifacts.push(artifact("fig4_manifest.json", serde_json::to_string_pretty(&[manifest])? + "\n", false));
    Ok(CommandOutput { artifacts, status: ensemble_status("fig4", &fam.ensemble) })
}

/// Multiplicity families at λ = 1.
fn fig6(opts: &FigureOptions) -> CliResult<CommandOutput> {
    let mut artifacts = Vec::new();
    let mut manifests = Vec::new();
    let mut series = Vec::new();
    let mut statuses = Vec::new();
    for name in ["nonmnc-z4z2-n[1,1]", "nonmnc-z4z2-n[1,5]", "nonmnc-z4z2-n[3,3]"] {
        let fam = family(preset_raw(name), opts, crate::config::DEFAULT_SAMPLES, &[1.0])?;
        manifests.push(family_artifacts("fig6", name, &fam, &mut artifacts)?);
        statuses.push(ensemble_status(name, &fam.ensemble));
        series.push(scatter_series(name, &fam.ensemble, None, false));
    }
    if opts.svg {
        artifacts.push(artifact("fig6.svg", svg::scatter("fig6", "E", "E_inacc", &series), false));
    }
    artifacts.push(artifact("fig6_manifest.json", serde_json::to_string_pretty(&manifests)? + "\n", false));
    Ok(CommandOutput { artifacts, status: combine(statuses) })
}

pub fn figure(name: &str, opts: &FigureOptions) -> CliResult<CommandOutput> {
    match name {
        "fig2" => scatter_figure("fig2", &["mnc-z2z2", "triv-z2z2"], &[2, 2], opts),
        "fig3" => fig3(opts),
        "fig4" => fig4(opts),
        "fig5" => scatter_figure("fig5", &["triv-z4z2", "nonmnc-z4z2"], &[4, 2], opts),
        "fig6" => fig6(opts),
        other => Err(CliError::Validation(format!("unknown figure {other:?} (expected one of {})", FIGURES.join(", ")))),
    }
}
