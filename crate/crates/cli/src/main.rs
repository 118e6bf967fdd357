use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use inacc_cli::commands::{self, CommandOutput, FigureOptions, Status};
use inacc_cli::config::{parse_elements, parse_labels, parse_tuples, ConfigFile, ExperimentConfig, OracleSize};
use inacc_cli::output::Format;
use inacc_cli::{CliError, CliResult};
use inacc_core::factory::default_lambda_grid;

#[derive(Parser)]
#[command(name = "inacc", version, about = "Accessible and inaccessible entanglement of symmetric MPS ensembles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Centre, D_ω, irrep classes, bounds and degeneracy classes of a cocycle.
    GroupInfo(GroupInfoArgs),
    /// Analyse an ensemble of states.
    Analyze(RunArgs),
    /// λ sweep of `analyze` (default: 20-point log grid from 1 to 0.01).
    Interpolate(RunArgs),
    /// Compare fixed-point results with the finite-chain oracle.
    Oracle(OracleArgs),
    /// Regenerate figure data (fig2 to fig6).
    Figure(FigureArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
    Svg,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Format {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
            FormatArg::Svg => Format::Svg,
        }
    }
}

#[derive(Args)]
struct GroupInfoArgs {
    /// Preset whose group and cocycle to describe.
    #[arg(long)]
    preset: Option<String>,
    /// Cyclic factors, e.g. `4,2`.
    #[arg(long, value_delimiter = ',')]
    factors: Option<Vec<usize>>,
    /// Cocycle matrix rows, e.g. `0,1;0,0`.
    #[arg(long)]
    cocycle: Option<String>,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
}

#[derive(Args)]
struct RunArgs {
    /// Named phase preset.
    #[arg(long)]
    preset: Option<String>,
    /// Fixed construction instead of a preset: `cluster` or `toy`.
    #[arg(long)]
    source: Option<String>,
    /// JSON configuration; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Filter strengths, comma separated.
    #[arg(long, value_delimiter = ',')]
    lambda: Option<Vec<f64>>,
    /// Irrep labels kept at weight 1, e.g. `0,0;2,0`.
    #[arg(long)]
    keep: Option<String>,
    /// Subgroup generators, e.g. `2,0;0,2`.
    #[arg(long)]
    subgroup: Option<String>,
    /// Output directory; data goes to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Chain length N.
    #[arg(long)]
    sites: Option<usize>,
    /// Block length N_A.
    #[arg(long)]
    block: Option<usize>,
    /// Prefactor C of the finite-size tolerance.
    #[arg(long, default_value_t = 10.0)]
    c: f64,
}

#[derive(Args)]
struct FigureArgs {
    /// fig2, fig3, fig4, fig5 or fig6.
    name: String,
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_delimiter = ',')]
    lambda: Option<Vec<f64>>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
    #[arg(long)]
    workers: Option<usize>,
}

impl RunArgs {
    fn raw(&self) -> CliResult<ConfigFile> {
        let mut raw = match &self.config {
            Some(path) => ConfigFile::load(path)?,
            None => ConfigFile::default(),
        };
        if let Some(p) = &self.preset {
            raw.preset = Some(p.clone());
            raw.source = None;
        }
        if let Some(s) = &self.source {
            raw.source = Some(s.clone());
        }
        if self.samples.is_some() {
            raw.samples = self.samples;
        }
        if self.seed.is_some() {
            raw.seed = self.seed;
        }
        if let Some(l) = &self.lambda {
            raw.lambda_grid = Some(l.clone());
        }
        if let Some(k) = &self.keep {
            raw.keep = Some(parse_labels(k)?);
            raw.keep_indices = None;
        }
        if let Some(s) = &self.subgroup {
            raw.subgroup = Some(parse_elements(s)?);
        }
        if self.workers.is_some() {
            raw.workers = self.workers;
        }
        Ok(raw)
    }
}

fn emit(output: &CommandOutput, out: Option<&Path>) -> CliResult<()> {
    match out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            for a in &output.artifacts {
                std::fs::write(dir.join(&a.file), &a.contents)?;
            }
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            for a in output.artifacts.iter().filter(|a| a.primary) {
                stdout.write_all(a.contents.as_bytes())?;
            }
        }
    }
    Ok(())
}

fn run(cli: Cli) -> CliResult<Status> {
    match cli.command {
        Command::GroupInfo(args) => {
            let (factors, t) = match (&args.preset, &args.factors) {
                (Some(name), _) => {
                    let p = inacc_core::factory::preset(name).map_err(|e| CliError::Validation(e.to_string()))?;
                    (p.group.factors, Some(p.cocycle.t))
                }
                (None, Some(f)) => (f.clone(), args.cocycle.as_deref().map(parse_tuples).transpose()?),
                (None, None) => return Err(CliError::Validation("group-info needs --preset or --factors".into())),
            };
            let info = commands::group_info(&factors, t)?;
            let text = match args.format {
                FormatArg::Json => serde_json::to_string_pretty(&info)? + "\n",
                _ => commands::group_info_text(&info),
            };
            print!("{text}");
            Ok(Status::Ok)
        }
        Command::Analyze(args) => {
            let cfg = ExperimentConfig::resolve(&args.raw()?, &[1.0])?;
            let output = commands::analyze("analyze", &cfg, args.format.into())?;
            emit(&output, args.out.as_deref())?;
            Ok(output.status)
        }
        Command::Interpolate(args) => {
            let cfg = ExperimentConfig::resolve(&args.raw()?, &default_lambda_grid())?;
            let output = commands::analyze("interpolate", &cfg, args.format.into())?;
            emit(&output, args.out.as_deref())?;
            Ok(output.status)
        }
        Command::Oracle(args) => {
            let mut raw = args.run.raw()?;
            let current = raw.oracle.unwrap_or(OracleSize { n: 10, n_a: 5 });
            raw.oracle = Some(OracleSize { n: args.sites.unwrap_or(current.n), n_a: args.block.unwrap_or(current.n_a) });
            if raw.samples.is_none() {
                raw.samples = Some(20);
            }
            let cfg = ExperimentConfig::resolve(&raw, &[1.0])?;
            let output = commands::oracle(&cfg, args.c, args.run.format.into())?;
            emit(&output, args.run.out.as_deref())?;
            Ok(output.status)
        }
        Command::Figure(args) => {
            let opts = FigureOptions {
                samples: args.samples,
                seed: args.seed,
                workers: args.workers,
                lambda_grid: args.lambda.clone(),
                svg: matches!(args.format, FormatArg::Svg),
            };
            let output = commands::figure(&args.name, &opts)?;
            emit(&output, Some(&args.out))?;
            Ok(output.status)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Failed(msg)) => {
            eprintln!("inacc: {msg}");
            ExitCode::from(1)
        }
        Ok(Status::Violation(msg)) => {
            eprintln!("inacc: {msg}");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("inacc: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
