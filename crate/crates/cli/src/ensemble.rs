//! Seeded ensembles evaluated on scoped worker threads. Each worker owns a
//! contiguous index range and results are concatenated in index order, so
//! output never depends on the worker count.

use std::time::Instant;

use inacc_core::factory::{apply_filter, mix_seed, FilterSpec};
use inacc_core::group::Subgroup;
use inacc_core::mps::SymmetricMps;
use inacc_core::observables::{analyze, analyze_oracle, subgroup_analysis, SptReport};
use serde::Serialize;

use crate::config::{ExperimentConfig, OracleSize, Prepared};
use crate::error::{CliError, CliResult};

/// Splits `0..n` into at most `workers` contiguous, nearly equal ranges.
pub fn partition(n: u64, workers: usize) -> Vec<(u64, u64)> {
    let w = (workers.max(1) as u64).min(n.max(1));
    (0..w).map(|i| (n * i / w, n * (i + 1) / w)).filter(|(a, b)| a < b).collect()
}

/// Maps `f` over `0..n` and returns results in index order together with
/// the per-worker ranges.
pub fn parallel_map<T, F>(n: u64, workers: usize, f: F) -> (Vec<T>, Vec<(u64, u64)>)
where
    T: Send,
    F: Fn(u64) -> T + Sync,
{
    let ranges = partition(n, workers);
    let f = &f;
    let chunks: Vec<Vec<T>> = std::thread::scope(|scope| {
        let handles: Vec<_> =
            ranges.iter().map(|&(a, b)| scope.spawn(move || (a..b).map(f).collect::<Vec<T>>())).collect();
        handles.into_iter().map(|h| h.join().expect("worker thread panicked")).collect()
    });
    (chunks.into_iter().flatten().collect(), ranges)
}

impl Prepared {
    pub fn draw(&self, seed: u64) -> inacc_core::Result<SymmetricMps> {
        match self {
            Prepared::Random(s) => s.sample(seed),
            Prepared::Fixed(state) => state.with_tensor(state.tensor().clone()),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Row {
    pub sample_id: u64,
    pub lambda: f64,
    pub seed: u64,
    pub outcome: Result<SptReport, String>,
}

impl Row {
    pub fn report(&self) -> Option<&SptReport> {
        self.outcome.as_ref().ok()
    }
}

#[derive(Clone, Debug)]
pub struct Ensemble {
    /// Ordered by sample, then by position in the λ grid.
    pub rows: Vec<Row>,
    pub ranges: Vec<(u64, u64)>,
    pub wall_seconds: f64,
}

impl Ensemble {
    pub fn reports(&self) -> impl Iterator<Item = &SptReport> {
        self.rows.iter().filter_map(Row::report)
    }

    pub fn errors(&self) -> impl Iterator<Item = (&Row, &str)> {
        self.rows.iter().filter_map(|r| r.outcome.as_ref().err().map(|e| (r, e.as_str())))
    }

    pub fn bound_violations(&self) -> usize {
        self.reports().filter(|r| !r.bound_satisfied).count()
    }
}

fn filtered(base: &SymmetricMps, cfg: &ExperimentConfig, lambda: f64) -> inacc_core::Result<Option<SymmetricMps>> {
    if lambda == 1.0 {
        return Ok(None);
    }
    apply_filter(base, &FilterSpec::new(cfg.keep.clone(), lambda)?).map(Some)
}

fn report_for(state: &SymmetricMps, subgroup: Option<&Subgroup>) -> inacc_core::Result<SptReport> {
    match subgroup {
        Some(h) => subgroup_analysis(state, h),
        None => analyze(state),
    }
}

fn sample_rows(prepared: &Prepared, cfg: &ExperimentConfig, subgroup: Option<&Subgroup>, index: u64) -> Vec<Row> {
    let seed = mix_seed(cfg.seed, index);
    let row = |lambda: f64, outcome: inacc_core::Result<SptReport>| Row {
        sample_id: index,
        lambda,
        seed,
        outcome: outcome.map(|r| r.with_meta(Some(seed), Some(lambda))).map_err(|e| e.to_string()),
    };
    let base = match prepared.draw(seed) {
        Ok(b) => b,
        Err(e) => return cfg.lambda_grid.iter().map(|&l| row(l, Err(e.clone()))).collect(),
    };
    cfg.lambda_grid
        .iter()
        .map(|&lambda| {
            let outcome = filtered(&base, cfg, lambda)
                .and_then(|s| report_for(s.as_ref().unwrap_or(&base), subgroup));
            row(lambda, outcome)
        })
        .collect()
}

/// Fixed-point analysis of every sample at every λ of the grid.
pub fn run_analysis(cfg: &ExperimentConfig) -> CliResult<Ensemble> {
    let prepared = cfg.source.prepare()?;
    let subgroup = cfg.subgroup()?;
    let start = Instant::now();
    let (rows, ranges) =
        parallel_map(cfg.samples, cfg.workers, |i| sample_rows(&prepared, cfg, subgroup.as_ref(), i));
    Ok(Ensemble { rows: rows.into_iter().flatten().collect(), ranges, wall_seconds: start.elapsed().as_secs_f64() })
}

/// Fixed-point and finite-chain results for one state.
#[derive(Clone, Debug, Serialize)]
pub struct OracleRow {
    pub sample_id: u64,
    pub lambda: f64,
    pub seed: u64,
    pub fixed_point: SptReport,
    pub oracle: SptReport,
    /// `|λ₂/λ₁|` of the transfer channel.
    pub gap_ratio: f64,
    pub tolerance: f64,
    pub deviation: Deviation,
}

#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct Deviation {
    pub p: f64,
    #[serde(rename = "E")]
    pub e: f64,
    #[serde(rename = "E_acc")]
    pub e_acc: f64,
    #[serde(rename = "E_inacc")]
    pub e_inacc: f64,
}

impl Deviation {
    pub fn max(&self) -> f64 {
        self.p.max(self.e).max(self.e_acc).max(self.e_inacc)
    }
}

/// Declared oracle tolerance `max(1e-6, C·|λ₂/λ₁|^{N/2})`, or `1e-10` when
/// the channel has no subleading eigenvalue.
pub fn oracle_tolerance(gap_ratio: f64, n: usize, c: f64) -> f64 {
    if gap_ratio < 1e-12 {
        1e-10
    } else {
        1e-6f64.max(c * gap_ratio.powi((n / 2) as i32))
    }
}

fn oracle_row(state: &SymmetricMps, size: OracleSize, c: f64) -> inacc_core::Result<(SptReport, SptReport, f64, f64)> {
    let fixed = analyze(state)?;
    let oracle = analyze_oracle(state, size.n, size.n_a)?;
    let ev = state.tensor().transfer_spectrum()?;
    let ratio = ev.get(1).map_or(0.0, |z| z.norm() / ev[0].norm());
    Ok((fixed, oracle, ratio, oracle_tolerance(ratio, size.n, c)))
}

#[derive(Clone, Debug)]
pub struct OracleRun {
    pub rows: Vec<Result<OracleRow, (u64, String)>>,
    pub ranges: Vec<(u64, u64)>,
    pub wall_seconds: f64,
}

/// Accepted `|E − E_acc − H(p)|` on the oracle side.
pub const IDENTITY_TOL: f64 = 1e-8;

impl OracleRow {
    pub fn passed(&self) -> bool {
        self.deviation.max() <= self.tolerance && self.oracle.residuals.entropy_identity <= IDENTITY_TOL
    }
}

impl OracleRun {
    pub fn failures(&self) -> Vec<&OracleRow> {
        self.rows.iter().filter_map(|r| r.as_ref().ok()).filter(|r| !r.passed()).collect()
    }
}

/// Compares the fixed-point path with the finite-chain oracle at the
/// first λ of the grid.
pub fn run_oracle(cfg: &ExperimentConfig, size: OracleSize, c: f64) -> CliResult<OracleRun> {
    if cfg.subgroup.is_some() {
        return Err(CliError::Validation("the oracle compares full-group sectors only".into()));
    }
    let prepared = cfg.source.prepare()?;
    let lambda = cfg.lambda_grid[0];
    let start = Instant::now();
    let (rows, ranges) = parallel_map(cfg.samples, cfg.workers, |i| {
        let seed = mix_seed(cfg.seed, i);
        let result = prepared.draw(seed).and_then(|base| {
            let state = filtered(&base, cfg, lambda)?;
            oracle_row(state.as_ref().unwrap_or(&base), size, c)
        });
        match result {
            Ok((fixed, oracle, gap_ratio, tolerance)) => {
                let p = fixed.p.iter().zip(&oracle.p).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                let deviation = Deviation {
                    p,
                    e: (fixed.e - oracle.e).abs(),
                    e_acc: (fixed.e_acc - oracle.e_acc).abs(),
                    e_inacc: (fixed.e_inacc - oracle.e_inacc).abs(),
                };
                Ok(OracleRow {
                    sample_id: i,
                    lambda,
                    seed,
                    fixed_point: fixed.with_meta(Some(seed), Some(lambda)),
                    oracle: oracle.with_meta(Some(seed), Some(lambda)),
                    gap_ratio,
                    tolerance,
                    deviation,
                })
            }
            Err(e) => Err((i, e.to_string())),
        }
    });
    Ok(OracleRun { rows, ranges, wall_seconds: start.elapsed().as_secs_f64() })
}
