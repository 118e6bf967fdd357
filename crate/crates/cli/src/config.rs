//! Experiment configuration: JSON file fields, command-line overrides and
//! the validated form used by the runners.

use std::path::Path;

use inacc_core::factory::{self, Keep, PhasePreset, Sampler};
use inacc_core::group::{subgroup_from_generators, Element, Group, GroupSpec, IrrepLabel, Subgroup};
use inacc_core::mps::SymmetricMps;
use inacc_core::projrep::{projective_centre, Cocycle, CocycleSpec};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const DEFAULT_SAMPLES: u64 = 1000;
pub const DEFAULT_SEED: u64 = 0;
/// Largest oracle chain accepted by `oracle`.
pub const MAX_ORACLE_SITES: usize = 16;

fn invalid(e: impl std::fmt::Display) -> CliError {
    CliError::Validation(e.to_string())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleSize {
    /// Chain length `N`.
    pub n: usize,
    /// Block length `N_A`.
    pub n_a: usize,
}

/// Raw configuration as read from JSON; every field is optional and
/// command-line flags overwrite fields before validation.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub preset: Option<String>,
    /// `"cluster"` or `"toy"` for the fixed constructions.
    pub source: Option<String>,
    pub factors: Option<Vec<usize>>,
    pub t: Option<Vec<Vec<usize>>>,
    pub m: Option<Vec<usize>>,
    pub n: Option<Vec<usize>>,
    pub samples: Option<u64>,
    pub seed: Option<u64>,
    #[serde(alias = "lambda")]
    pub lambda_grid: Option<Vec<f64>>,
    pub keep: Option<Vec<IrrepLabel>>,
    pub keep_indices: Option<Vec<usize>>,
    pub subgroup: Option<Vec<Element>>,
    pub oracle: Option<OracleSize>,
    pub workers: Option<usize>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| invalid(format!("{}: {e}", path.display())))
    }
}

/// Where states come from.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Source {
    Preset(PhasePreset),
    Cluster,
    Toy { factors: Vec<usize> },
}

impl Source {
    pub fn name(&self) -> String {
        match self {
            Source::Preset(p) => p.name.clone(),
            Source::Cluster => "cluster".into(),
            Source::Toy { factors } => {
                let f: Vec<String> = factors.iter().map(|x| format!("z{x}")).collect();
                format!("toy-{}", f.join(""))
            }
        }
    }

    pub fn group(&self) -> CliResult<Group> {
        match self {
            Source::Preset(p) => p.group().map_err(invalid),
            Source::Cluster => Ok(factory::cluster_state().group().clone()),
            Source::Toy { factors } => Group::new(factors).map_err(invalid),
        }
    }

    pub fn prepare(&self) -> CliResult<Prepared> {
        Ok(match self {
            Source::Preset(p) => Prepared::Random(p.sampler().map_err(invalid)?),
            Source::Cluster => Prepared::Fixed(factory::cluster_state()),
            Source::Toy { factors } => {
                let group = Group::new(factors).map_err(invalid)?;
                Prepared::Fixed(factory::toy_trivial(&group, &group.labels()).map_err(invalid)?)
            }
        })
    }

    /// Filter set used when none is configured: index 0 for the toy state,
    /// the trivial label otherwise.
    pub fn default_keep(&self) -> CliResult<Keep> {
        Ok(match self {
            Source::Toy { .. } => Keep::Indices(vec![0]),
            _ => Keep::Labels(vec![self.group()?.trivial_label()]),
        })
    }
}

/// A source made ready for drawing states.
pub enum Prepared {
    Random(Sampler),
    Fixed(SymmetricMps),
}

/// Validated experiment parameters.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub source: Source,
    pub samples: u64,
    pub seed: u64,
    pub lambda_grid: Vec<f64>,
    pub keep: Keep,
    pub subgroup: Option<Vec<Element>>,
    pub oracle: Option<OracleSize>,
    pub workers: usize,
}

pub fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn custom_preset(raw: &ConfigFile, factors: &[usize]) -> CliResult<PhasePreset> {
    let group = Group::new(factors).map_err(invalid)?;
    let k = group.rank();
    let t = raw.t.clone().unwrap_or_else(|| vec![vec![0; k]; k]);
    let cocycle = Cocycle::new(&group, t.clone()).map_err(invalid)?;
    let centre = projective_centre(&cocycle).order();
    Ok(PhasePreset {
        name: "custom".into(),
        group: GroupSpec { factors: factors.to_vec() },
        cocycle: CocycleSpec { t },
        m: vec![1; group.order()],
        n: vec![1; centre],
    })
}

impl ExperimentConfig {
    /// Validates a raw configuration; `default_lambdas` applies when the
    /// configuration names no grid.
    pub fn resolve(raw: &ConfigFile, default_lambdas: &[f64]) -> CliResult<Self> {
        let source = match raw.source.as_deref() {
            Some("cluster") => Source::Cluster,
            Some("toy") => Source::Toy { factors: raw.factors.clone().unwrap_or_else(|| vec![2, 2]) },
            Some(other) => return Err(invalid(format!("unknown source {other:?} (expected cluster or toy)"))),
            None => {
                let mut p = match (&raw.preset, &raw.factors) {
                    (Some(name), _) => factory::preset(name).map_err(invalid)?,
                    (None, Some(factors)) => custom_preset(raw, factors)?,
                    (None, None) => return Err(invalid("a preset, a source or explicit group factors is required")),
                };
                if raw.preset.is_some() {
                    if let Some(f) = &raw.factors {
                        p.group = GroupSpec { factors: f.clone() };
                    }
                    if let Some(t) = &raw.t {
                        p.cocycle = CocycleSpec { t: t.clone() };
                    }
                }
                if let Some(m) = &raw.m {
                    p.m = m.clone();
                }
                if let Some(n) = &raw.n {
                    p.n = n.clone();
                }
                p.cocycle().map_err(invalid)?;
                p.physical_labels().map_err(invalid)?;
                Source::Preset(p)
            }
        };
        let group = source.group()?;

        let samples = raw.samples.unwrap_or(DEFAULT_SAMPLES);
        if samples == 0 {
            return Err(invalid("samples must be at least 1"));
        }
        let lambda_grid = raw.lambda_grid.clone().unwrap_or_else(|| default_lambdas.to_vec());
        if lambda_grid.is_empty() {
            return Err(invalid("lambda grid is empty"));
        }
        if let Some(l) = lambda_grid.iter().find(|&&l| !(l > 0.0 && l <= 1.0)) {
            return Err(invalid(format!("lambda {l} outside (0, 1]")));
        }
        let keep = match (&raw.keep, &raw.keep_indices) {
            (Some(_), Some(_)) => return Err(invalid("keep and keep_indices are mutually exclusive")),
            (Some(labels), None) => {
                for l in labels {
                    group.validate_label(l).map_err(invalid)?;
                }
                Keep::Labels(labels.clone())
            }
            (None, Some(indices)) => Keep::Indices(indices.clone()),
            (None, None) => source.default_keep()?,
        };
        if let Some(gens) = &raw.subgroup {
            subgroup_from_generators(&group, gens).map_err(invalid)?;
        }
        if let Some(o) = raw.oracle {
            if o.n_a == 0 || o.n_a >= o.n {
                return Err(invalid(format!("oracle needs 1 ≤ N_A < N, got N = {}, N_A = {}", o.n, o.n_a)));
            }
            if o.n > MAX_ORACLE_SITES {
                return Err(invalid(format!("oracle chain N = {} exceeds {MAX_ORACLE_SITES}", o.n)));
            }
        }
        let workers = raw.workers.unwrap_or_else(default_workers);
        if workers == 0 {
            return Err(invalid("workers must be at least 1"));
        }
        Ok(ExperimentConfig {
            source,
            samples,
            seed: raw.seed.unwrap_or(DEFAULT_SEED),
            lambda_grid,
            keep,
            subgroup: raw.subgroup.clone(),
            oracle: raw.oracle,
            workers,
        })
    }

    pub fn group(&self) -> CliResult<Group> {
        self.source.group()
    }

    pub fn subgroup(&self) -> CliResult<Option<Subgroup>> {
        match &self.subgroup {
            None => Ok(None),
            Some(gens) => Ok(Some(subgroup_from_generators(&self.group()?, gens).map_err(invalid)?)),
        }
    }

    /// Irrep labels in report order: all of `G`, or representatives of the
    /// subgroup irreps.
    pub fn report_labels(&self) -> CliResult<Vec<IrrepLabel>> {
        Ok(match self.subgroup()? {
            Some(h) => h.irrep_labels(),
            None => self.group()?.labels(),
        })
    }
}

/// Parses `"0,1;2,0"` (optionally bracketed) into integer tuples.
pub fn parse_tuples(text: &str) -> CliResult<Vec<Vec<usize>>> {
    let text = text.trim();
    if text.is_empty() {
        return Ok(Vec::new());
    }
    text.split(';')
        .map(|item| {
            item.trim()
                .trim_start_matches('[')
                .trim_end_matches(']')
                .split(',')
                .map(|x| x.trim().parse::<usize>().map_err(|e| invalid(format!("bad entry {x:?} in {item:?}: {e}"))))
                .collect()
        })
        .collect()
}

pub fn parse_labels(text: &str) -> CliResult<Vec<IrrepLabel>> {
    Ok(parse_tuples(text)?.into_iter().map(IrrepLabel).collect())
}

pub fn parse_elements(text: &str) -> CliResult<Vec<Element>> {
    Ok(parse_tuples(text)?.into_iter().map(Element).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tuples_parse_with_and_without_brackets() {
        assert_eq!(parse_tuples("0,1;2,0").unwrap(), vec![vec![0, 1], vec![2, 0]]);
        assert_eq!(parse_tuples("[1,0]; [0,1]").unwrap(), vec![vec![1, 0], vec![0, 1]]);
        assert!(parse_tuples("").unwrap().is_empty());
        assert!(parse_tuples("1,x").is_err());
    }

    #[test]
    fn preset_overrides_apply_field_by_field() {
        let raw: ConfigFile =
            serde_json::from_str(r#"{"preset":"nonmnc-z4z2","n":[1,5],"samples":1000,"seed":42}"#).unwrap();
        let cfg = ExperimentConfig::resolve(&raw, &[1.0]).unwrap();
        match &cfg.source {
            Source::Preset(p) => {
                assert_eq!(p.n, vec![1, 5]);
                assert_eq!(p.group.factors, vec![4, 2]);
            }
            other => panic!("{other:?}"),
        }
        assert_eq!((cfg.samples, cfg.seed), (1000, 42));
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let cases = [
            r#"{"preset":"nope"}"#,
            r#"{"preset":"mnc-z2z2","samples":0}"#,
            r#"{"preset":"mnc-z2z2","lambda":[0.0]}"#,
            r#"{"preset":"mnc-z2z2","lambda":[1.5]}"#,
            r#"{"preset":"mnc-z2z2","oracle":{"n":6,"n_a":6}}"#,
            r#"{"preset":"mnc-z2z2","keep":[[2,0]]}"#,
            r#"{"preset":"mnc-z2z2","m":[1,1]}"#,
            r#"{"source":"moon"}"#,
            r#"{}"#,
        ];
        for text in cases {
            let raw: ConfigFile = serde_json::from_str(text).unwrap();
            let err = ExperimentConfig::resolve(&raw, &[1.0]).unwrap_err();
            assert_eq!(err.exit_code(), 2, "{text}: {err}");
        }
        assert!(serde_json::from_str::<ConfigFile>(r#"{"presets":"x"}"#).is_err());
    }

    #[test]
    fn custom_group_gets_unit_multiplicities() {
        let raw: ConfigFile = serde_json::from_str(r#"{"factors":[4,2],"t":[[0,1],[0,0]]}"#).unwrap();
        let cfg = ExperimentConfig::resolve(&raw, &[1.0]).unwrap();
        match &cfg.source {
            Source::Preset(p) => {
                assert_eq!(p.m, vec![1; 8]);
                assert_eq!(p.n, vec![1, 1]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn toy_defaults_to_index_filter() {
        let raw = ConfigFile { source: Some("toy".into()), ..Default::default() };
        let cfg = ExperimentConfig::resolve(&raw, &[1.0, 0.5]).unwrap();
        assert_eq!(cfg.keep, Keep::Indices(vec![0]));
        assert_eq!(cfg.lambda_grid, vec![1.0, 0.5]);
    }
}
