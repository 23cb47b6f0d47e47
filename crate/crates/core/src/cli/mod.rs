//! The `bxshadow` command-line tool.
//!
//! Subcommands:
//!
//! * `eval`: metrics at a single parameter point;
//! * `sweep`: metrics over a grid of one or two swept fields;
//! * `figure`: the data behind one of the named figures;
//! * `mc-validate`: Monte-Carlo batch checked against the closed forms;
//! * `sample`: export of a seeded SNR batch;
//! * `replay`: re-runs the invocation recorded in a meta block.
//!
//! Exit status is 0 on success, 1 for usage errors, 2 for numerical or I/O
//! failures and 3 when a validation fails.

mod figures;
mod spec;
mod sweep;
mod table;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

pub use figures::{reproduce_figure, FigureId, FigureOptions};
pub use spec::{parse_assignment, Axis, Field, FieldRef, GridPoint, Metric, Scale, SpecError, SweepSpec};
pub use sweep::run_sweep;
pub use table::{Column, CurveTable, Meta, Missing, TableSidecar};

use crate::channel::{ChannelParams, EvalPolicy};
use crate::mcsim::{self, BatchFormat, FitReport, SamplerConfig};
use crate::quad::QuadSettings;
use crate::specfun::SeriesPolicy;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;

/// Failure of a command, classified by exit status.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Numerical(_) | CliError::Io(_) => EXIT_NUMERICAL,
            CliError::Validation(_) => EXIT_VALIDATION,
        }
    }
}

impl From<SpecError> for CliError {
    fn from(e: SpecError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<crate::Error> for CliError {
    fn from(e: crate::Error) -> Self {
        match e {
            crate::Error::InvalidParameter { .. } | crate::Error::InsufficientSamples { .. } => {
                CliError::Usage(e.to_string())
            }
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum SampleFormat {
    Csv,
    Binary,
}

#[derive(Debug, Parser)]
#[command(
    name = "bxshadow",
    version,
    about = "Statistics, outage analysis and Monte-Carlo validation for the alpha-BX-shadowed fading channel"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// TOML file with flag values; flags given on the command line win
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Worker threads for grid evaluation and sampling
    #[arg(long, global = true, env = "BXSHADOW_WORKERS")]
    pub workers: Option<usize>,
    /// Output format of tables
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
    /// Output file instead of stdout; CSV tables also get PATH.meta.json
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Absolute truncation tolerance of the series
    #[arg(long, global = true, default_value_t = 1e-12)]
    pub abs_tol: f64,
    /// Relative truncation tolerance of the series
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub rel_tol: f64,
    /// Maximum number of terms per series index
    #[arg(long, global = true, default_value_t = 100_000)]
    pub max_terms: usize,
}

/// The global settings that influence results.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Settings {
    pub format: OutputFormat,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_terms: usize,
}

impl Settings {
    pub fn policy(&self) -> Result<EvalPolicy, CliError> {
        Ok(EvalPolicy {
            series: SeriesPolicy::new(self.max_terms, self.abs_tol, self.rel_tol)?,
            quad: QuadSettings::default(),
        })
    }
}

/// A command together with its settings, as stored in meta blocks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Invocation {
    pub settings: Settings,
    pub command: Command,
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// Evaluate metrics at one parameter point
    Eval(EvalArgs),
    /// Evaluate metrics over a grid of one or two swept fields
    Sweep(SweepArgs),
    /// Emit the data of a figure
    Figure(FigureArgs),
    /// Sample the SNR and compare the batch with the closed forms
    McValidate(McValidateArgs),
    /// Write a seeded SNR batch to --out
    Sample(SampleArgs),
    /// Re-run the invocation recorded in a meta block
    Replay(ReplayArgs),
}

/// Channel parameters; powers and SNRs in dB or linear units.
#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
pub struct ParamArgs {
    /// Fading parameter of the multipath part
    #[arg(long, allow_hyphen_values = true)]
    pub m_x: Option<f64>,
    /// Shadowing parameter of the LoS part
    #[arg(long, allow_hyphen_values = true)]
    pub m_y: Option<f64>,
    /// Multipath power in dB
    #[arg(long, allow_hyphen_values = true, conflicts_with = "omega_x")]
    pub omega_x_db: Option<f64>,
    /// Multipath power, linear
    #[arg(long, allow_hyphen_values = true)]
    pub omega_x: Option<f64>,
    /// LoS power in dB (-inf for no LoS)
    #[arg(long, allow_hyphen_values = true, conflicts_with = "omega_y")]
    pub omega_y_db: Option<f64>,
    /// LoS power, linear
    #[arg(long, allow_hyphen_values = true)]
    pub omega_y: Option<f64>,
    /// Nonlinearity parameter
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    /// Mean SNR in dB
    #[arg(long, allow_hyphen_values = true, conflicts_with = "gamma_bar")]
    pub gamma_bar_db: Option<f64>,
    /// Mean SNR, linear
    #[arg(long, allow_hyphen_values = true)]
    pub gamma_bar: Option<f64>,
}

impl ParamArgs {
    fn assignments(&self) -> Vec<(FieldRef, f64)> {
        let entries = [
            (Field::MX, false, self.m_x),
            (Field::MY, false, self.m_y),
            (Field::OmegaX, true, self.omega_x_db),
            (Field::OmegaX, false, self.omega_x),
            (Field::OmegaY, true, self.omega_y_db),
            (Field::OmegaY, false, self.omega_y),
            (Field::Alpha, false, self.alpha),
            (Field::GammaBar, true, self.gamma_bar_db),
            (Field::GammaBar, false, self.gamma_bar),
        ];
        entries
            .into_iter()
            .filter_map(|(field, db, v)| v.map(|v| (FieldRef { field, db }, v)))
            .collect()
    }

    /// Channel parameters with `extra` assignments applied on top.
    fn resolve(&self, extra: &[String]) -> Result<ChannelParams, CliError> {
        let mut fixed = self.assignments();
        for s in extra {
            let (f, v) = parse_assignment(s)?;
            fixed.retain(|(g, _)| g.field != f.field);
            fixed.push((f, v));
        }
        let spec = SweepSpec {
            fixed,
            swept: vec![],
            metrics: vec![Metric::Aof],
        };
        spec.validate()?;
        Ok(spec.grid()[0].params()?)
    }
}

/// Parameters of a single evaluation point.
#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
pub struct PointArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// SNR at which pdf and cdf are evaluated, in dB
    #[arg(long, allow_hyphen_values = true, conflicts_with = "gamma")]
    pub gamma_db: Option<f64>,
    /// SNR at which pdf and cdf are evaluated, linear
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: Option<f64>,
    /// Outage threshold in dB
    #[arg(long, allow_hyphen_values = true, conflicts_with = "gamma_th")]
    pub gamma_th_db: Option<f64>,
    /// Outage threshold, linear
    #[arg(long, allow_hyphen_values = true)]
    pub gamma_th: Option<f64>,
    /// Fixed field as NAME=VALUE, e.g. omega_y_db=-5 (repeatable)
    #[arg(long = "set", value_name = "NAME=VALUE")]
    pub set: Vec<String>,
    /// Metrics: pdf, cdf, pout, pout_bounds, moment:K, aof, cqei, ber, qr_curve
    #[arg(long, value_delimiter = ',', required = true)]
    pub metric: Vec<String>,
}

impl PointArgs {
    fn spec(&self, sweeps: &[String]) -> Result<SweepSpec, SpecError> {
        let mut fixed = self.params.assignments();
        let extra = [
            (Field::Gamma, true, self.gamma_db),
            (Field::Gamma, false, self.gamma),
            (Field::GammaTh, true, self.gamma_th_db),
            (Field::GammaTh, false, self.gamma_th),
        ];
        fixed.extend(
            extra
                .into_iter()
                .filter_map(|(field, db, v)| v.map(|v| (FieldRef { field, db }, v))),
        );
        for s in &self.set {
            fixed.push(parse_assignment(s)?);
        }
        let spec = SweepSpec {
            fixed,
            swept: sweeps.iter().map(|s| s.parse()).collect::<Result<_, _>>()?,
            metrics: self.metric.iter().map(|s| s.parse()).collect::<Result<_, _>>()?,
        };
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct EvalArgs {
    #[command(flatten)]
    pub point: PointArgs,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SweepArgs {
    #[command(flatten)]
    pub point: PointArgs,
    /// Swept field as NAME:START:STOP:COUNT:linear|log|db (at most twice)
    #[arg(long = "sweep", value_name = "SPEC", allow_hyphen_values = true)]
    pub sweep: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct FigureArgs {
    #[arg(value_enum)]
    pub id: FigureId,
    /// Replace a figure default as FIELD=VALUE[,VALUE...] (repeatable)
    #[arg(long = "override", value_name = "FIELD=VALUE")]
    pub overrides: Vec<String>,
    /// Monte-Carlo samples per curve of fig2; 0 disables the column
    #[arg(long, default_value_t = 1_000_000)]
    pub mc_samples: usize,
    /// Seed of the Monte-Carlo column of fig2
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct McValidateArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// Number of samples (at least 10000)
    #[arg(long, default_value_t = 1_000_000)]
    pub n: usize,
    /// Use a full batch of 10^7 samples
    #[arg(long, conflicts_with = "n")]
    pub full: bool,
    /// Seed of the random stream
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Stream identifier; distinct streams of one seed are independent
    #[arg(long, default_value_t = 0)]
    pub stream: u64,
    /// Significance level of the KS test
    #[arg(long, default_value_t = 0.01)]
    pub significance: f64,
    /// Moment orders to compare
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 2.0])]
    pub orders: Vec<f64>,
    /// Change a field of the analytic target only, as NAME=VALUE (repeatable)
    #[arg(long = "target", value_name = "NAME=VALUE")]
    pub target: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SampleArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// Number of SNR samples
    #[arg(long, default_value_t = 1_000_000)]
    pub n: usize,
    /// Seed of the random stream
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Stream identifier; distinct streams of one seed are independent
    #[arg(long, default_value_t = 0)]
    pub stream: u64,
    /// Layout of the exported samples
    #[arg(long, value_enum, default_value_t = SampleFormat::Binary)]
    pub sample_format: SampleFormat,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct ReplayArgs {
    /// A CSV sidecar, a JSON table, an mc-validate report or a sample sidecar
    pub meta: PathBuf,
}

/// Runs the tool on `args` (including the program name) and returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let argv: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let argv = match merge_config(argv) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: Cli) -> Result<i32, CliError> {
    let g = cli.global;
    let settings = Settings {
        format: g.format,
        abs_tol: g.abs_tol,
        rel_tol: g.rel_tol,
        max_terms: g.max_terms,
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(w) = g.workers {
        if w == 0 {
            return Err(CliError::Usage("--workers must be at least 1".into()));
        }
        pool = pool.num_threads(w);
    }
    let pool = pool
        .build()
        .map_err(|e| CliError::Io(format!("cannot start worker pool: {e}")))?;
    pool.install(|| dispatch(settings, cli.command, g.out.as_deref()))
}

fn dispatch(settings: Settings, command: Command, out: Option<&Path>) -> Result<i32, CliError> {
    if let Command::Replay(args) = &command {
        let invocation = load_invocation(&args.meta)?;
        return dispatch(invocation.settings, invocation.command, out);
    }
    let policy = settings.policy()?;
    let recorded = serde_json::to_value(Invocation {
        settings,
        command: command.clone(),
    })
    .expect("invocations serialize");
    match command {
        Command::Eval(args) => {
            let spec = args.point.spec(&[])?;
            spec.grid()[0].params()?;
            let resolved = serde_json::to_value(&spec).expect("specs serialize");
            let table = run_sweep(&spec, &policy, Meta::new(recorded, resolved, None))?;
            emit_table(&table, settings.format, out)?;
            Ok(if table.missing.is_empty() { EXIT_OK } else { EXIT_NUMERICAL })
        }
        Command::Sweep(args) => {
            let spec = args.point.spec(&args.sweep)?;
            let resolved = serde_json::to_value(&spec).expect("specs serialize");
            let table = run_sweep(&spec, &policy, Meta::new(recorded, resolved, None))?;
            emit_table(&table, settings.format, out)?;
            Ok(EXIT_OK)
        }
        Command::Figure(args) => {
            let options = FigureOptions {
                overrides: args.overrides,
                mc_samples: args.mc_samples,
                seed: args.seed,
            };
            let table = reproduce_figure(args.id, &options, &policy, recorded)?;
            emit_table(&table, settings.format, out)?;
            Ok(EXIT_OK)
        }
        Command::McValidate(args) => mc_validate(&args, recorded, out),
        Command::Sample(args) => {
            let out = out.ok_or_else(|| CliError::Usage("sample needs --out PATH".into()))?;
            let params = args.params.resolve(&[])?;
            let config = SamplerConfig::new(params, args.n, args.seed, args.stream)?;
            let batch = mcsim::sample_snr(&config)?;
            let format = match args.sample_format {
                SampleFormat::Csv => BatchFormat::Csv,
                SampleFormat::Binary => BatchFormat::Binary,
            };
            let resolved = serde_json::to_value(config).expect("configs serialize");
            let meta = Meta::new(recorded, resolved, Some(args.seed));
            mcsim::write_batch_with_meta(&batch, out, format, Some(serde_json::to_value(meta).expect("meta serializes")))?;
            Ok(EXIT_OK)
        }
        Command::Replay(_) => unreachable!("handled above"),
    }
}

#[derive(Serialize)]
struct ValidationOutput<'a> {
    #[serde(flatten)]
    report: &'a FitReport,
    sampled: SamplerConfig,
    target: ChannelParams,
    meta: Meta,
}

fn mc_validate(args: &McValidateArgs, recorded: serde_json::Value, out: Option<&Path>) -> Result<i32, CliError> {
    let params = args.params.resolve(&[])?;
    let target = args.params.resolve(&args.target)?;
    let n = if args.full { 10_000_000 } else { args.n };
    if n < mcsim::MIN_SAMPLES {
        return Err(CliError::Usage(format!("--n {n} is below the minimum of {}", mcsim::MIN_SAMPLES)));
    }
    let config = SamplerConfig::new(params, n, args.seed, args.stream)?;
    let batch = mcsim::sample_snr(&config)?;
    let report = mcsim::validate_against(&batch, &target, &args.orders, args.significance)?;
    let resolved = serde_json::json!({ "sampled": config, "target": target });
    let doc = ValidationOutput {
        report: &report,
        sampled: config,
        target,
        meta: Meta::new(recorded, resolved, Some(args.seed)),
    };
    let body = serde_json::to_string_pretty(&doc).expect("reports serialize") + "\n";
    write_output(out, &body)?;
    if report.pass {
        Ok(EXIT_OK)
    } else {
        eprintln!(
            "validation failed: KS {} (distance {:e}, threshold {:e}), moments {}",
            if report.ks_pass { "passed" } else { "failed" },
            report.ks_distance,
            report.ks_threshold,
            if report.moments_pass { "passed" } else { "failed" },
        );
        Ok(EXIT_VALIDATION)
    }
}

fn write_output(out: Option<&Path>, body: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, body)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(body.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn emit_table(table: &CurveTable, format: OutputFormat, out: Option<&Path>) -> Result<(), CliError> {
    match format {
        OutputFormat::Json => write_output(out, &table.to_json())?,
        OutputFormat::Csv => {
            write_output(out, &table.to_csv())?;
            match out {
                Some(path) => {
                    let sidecar = serde_json::to_string_pretty(&table.sidecar()).expect("sidecars serialize");
                    let meta_path = mcsim::sidecar_path(path);
                    std::fs::write(&meta_path, sidecar + "\n")
                        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", meta_path.display())))?;
                }
                None => {
                    for m in &table.missing {
                        eprintln!("missing: row {} column {}: {}", m.row, m.column, m.reason);
                    }
                }
            }
        }
    }
    Ok(())
}

/// Reads the invocation stored under `meta.command` in a JSON document.
pub fn load_invocation(path: &Path) -> Result<Invocation, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    let doc: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("{} is not JSON: {e}", path.display())))?;
    let command = doc
        .get("meta")
        .and_then(|m| m.get("command"))
        .ok_or_else(|| CliError::Usage(format!("{} has no meta.command block", path.display())))?;
    let invocation: Invocation = serde_json::from_value(command.clone())
        .map_err(|e| CliError::Usage(format!("{}: unreadable meta.command: {e}", path.display())))?;
    if matches!(invocation.command, Command::Replay(_)) {
        return Err(CliError::Usage("a replay cannot replay another replay".into()));
    }
    Ok(invocation)
}

/// Global flags that take a value, used to locate the subcommand in argv.
const GLOBAL_VALUE_FLAGS: [&str; 7] = [
    "--config",
    "--workers",
    "--format",
    "--out",
    "--abs-tol",
    "--rel-tol",
    "--max-terms",
];

/// Inserts flags from the `--config` file ahead of the command-line flags.
///
/// Top-level keys become global flags; a table named after a subcommand
/// (e.g. `[sweep]` or `[mc-validate]`) holds flags of that subcommand. A
/// key whose flag also appears on the command line is skipped.
fn merge_config(argv: Vec<OsString>) -> Result<Vec<OsString>, CliError> {
    let strings: Vec<String> = argv.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    let mut config = None;
    let mut sub_index = None;
    let mut i = 1;
    while i < strings.len() {
        let a = &strings[i];
        if let Some(v) = a.strip_prefix("--config=") {
            config = Some(v.to_string());
        } else if a == "--config" {
            config = strings.get(i + 1).cloned();
        }
        if a.starts_with('-') {
            if GLOBAL_VALUE_FLAGS.contains(&a.as_str()) {
                i += 1;
            }
        } else if sub_index.is_none() {
            sub_index = Some(i);
        }
        i += 1;
        if sub_index.is_some() && config.is_some() {
            break;
        }
    }
    // --config may also follow the subcommand
    if config.is_none() {
        config = strings.windows(2).find(|w| w[0] == "--config").map(|w| w[1].clone());
    }
    let Some(path) = config else {
        return Ok(argv);
    };
    let text = std::fs::read_to_string(&path).map_err(|e| CliError::Usage(format!("--config {path}: {e}")))?;
    let table: toml::Table = text
        .parse()
        .map_err(|e| CliError::Usage(format!("--config {path}: {e}")))?;

    let given: std::collections::BTreeSet<String> = strings
        .iter()
        .filter(|a| a.starts_with("--"))
        .map(|a| a.split('=').next().unwrap_or(a).to_string())
        .collect();
    let flag_of = |key: &str| format!("--{}", key.replace('_', "-"));
    let to_args = |key: &str, value: &toml::Value, dst: &mut Vec<OsString>| -> Result<(), CliError> {
        let flag = flag_of(key);
        if given.contains(&flag) || flag == "--config" {
            return Ok(());
        }
        let scalar = |v: &toml::Value| -> Result<Option<String>, CliError> {
            Ok(match v {
                toml::Value::String(s) => Some(s.clone()),
                toml::Value::Integer(n) => Some(n.to_string()),
                toml::Value::Float(x) => Some(x.to_string()),
                toml::Value::Boolean(_) => None,
                _ => return Err(CliError::Usage(format!("--config {path}: unsupported value for `{key}`"))),
            })
        };
        match value {
            toml::Value::Boolean(true) => dst.push(flag.into()),
            toml::Value::Boolean(false) => {}
            toml::Value::Array(items) => {
                for item in items {
                    if let Some(s) = scalar(item)? {
                        dst.push(format!("{flag}={s}").into());
                    }
                }
            }
            other => {
                if let Some(s) = scalar(other)? {
                    dst.push(format!("{flag}={s}").into());
                }
            }
        }
        Ok(())
    };

    let subcommand = sub_index.map(|i| strings[i].replace('_', "-"));
    let mut globals = Vec::new();
    let mut locals = Vec::new();
    for (key, value) in &table {
        if let toml::Value::Table(section) = value {
            if Some(key.replace('_', "-")) == subcommand {
                for (k, v) in section {
                    to_args(k, v, &mut locals)?;
                }
            }
        } else {
            to_args(key, value, &mut globals)?;
        }
    }

    let mut merged = Vec::with_capacity(argv.len() + globals.len() + locals.len());
    merged.push(argv[0].clone());
    merged.extend(globals);
    match sub_index {
        Some(s) => {
            merged.extend(argv[1..=s].iter().cloned());
            merged.extend(locals);
            merged.extend(argv[s + 1..].iter().cloned());
        }
        None => merged.extend(argv[1..].iter().cloned()),
    }
    Ok(merged)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn os(v: &[&str]) -> Vec<OsString> {
        v.iter().map(OsString::from).collect()
    }

    #[test]
    fn config_values_yield_to_flags() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("c.toml");
        std::fs::write(
            &cfg,
            "format = \"json\"\nabs_tol = 1e-11\n[sweep]\nm_x = 2.0\nalpha = 3\nmetric = [\"aof\", \"cqei\"]\n",
        )
        .unwrap();
        let argv = os(&["bxshadow", "--config", cfg.to_str().unwrap(), "--format", "csv", "sweep", "--alpha", "2"]);
        let merged = merge_config(argv).unwrap();
        let cli = Cli::try_parse_from(merged).unwrap();
        assert_eq!(cli.global.format, OutputFormat::Csv);
        assert_eq!(cli.global.abs_tol, 1e-11);
        let Command::Sweep(s) = cli.command else { panic!() };
        assert_eq!(s.point.params.m_x, Some(2.0));
        assert_eq!(s.point.params.alpha, Some(2.0));
        assert_eq!(s.point.metric, vec!["aof", "cqei"]);
    }

    #[test]
    fn usage_errors_exit_with_one() {
        assert_eq!(run(["bxshadow", "frobnicate"]), EXIT_USAGE);
        assert_eq!(run(["bxshadow", "eval", "--metric", "aof", "--m-x", "1"]), EXIT_USAGE);
        assert_eq!(run(["bxshadow", "--help"]), EXIT_OK);
    }

    #[test]
    fn invocation_round_trips() {
        let cli = Cli::try_parse_from([
            "bxshadow", "sweep", "--m-x", "1", "--sweep", "gamma_bar:-10:10:3:db", "--metric", "aof,pout",
        ])
        .unwrap();
        let inv = Invocation {
            settings: Settings {
                format: OutputFormat::Csv,
                abs_tol: 1e-12,
                rel_tol: 1e-10,
                max_terms: 10,
            },
            command: cli.command,
        };
        let back: Invocation = serde_json::from_value(serde_json::to_value(&inv).unwrap()).unwrap();
        assert_eq!(back, inv);
    }
}
