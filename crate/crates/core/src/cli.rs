//! Batch front end: `catalog`, `run` and `converge`.
//!
//! Settings come from flags, then an optional flat `key = value` config
//! file, then defaults. The fully resolved configuration is embedded in
//! every report so a report can be reproduced from itself.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use thiserror::Error;

use crate::fields::{catalog_listing, field_catalog, CatalogEntry};
use crate::operators::{Backend, DerivativeEngine, OUTER_STEP};
use crate::verify::{
    default_h0, estimate_convergence_order, run_suite, select_checks, select_fields, Convergence,
    Outcome, ResidualReport, SampleMode, SamplingPlan, Suite, VerifyError, FIELD_CHECKS,
};
use crate::VERSION;

pub const EXIT_OK: i32 = 0;
pub const EXIT_UNEXPECTED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Verify(#[from] VerifyError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Verify(
                VerifyError::Config(_) | VerifyError::UnknownCheck(_) | VerifyError::UnknownField(_),
            ) => EXIT_CONFIG,
            CliError::Verify(_) | CliError::Io(_) => EXIT_UNEXPECTED,
        }
    }
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

#[derive(Debug, Parser)]
#[command(name = "fueterlab", version, about = "Numerical verification of Fueter-type identities")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the field catalog.
    Catalog {
        #[arg(long)]
        format: Option<String>,
    },
    /// Run check suites and write a report.
    Run(RunArgs),
    /// Estimate the convergence order of a check under step halving.
    Converge(RunArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// all | positive | negative | identities
    #[arg(long)]
    pub suite: Option<String>,
    /// Glob over field names; repeatable.
    #[arg(long = "field")]
    pub fields: Vec<String>,
    /// Check name; repeatable.
    #[arg(long = "check")]
    pub checks: Vec<String>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Step size (starting step for `converge`).
    #[arg(long)]
    pub h: Option<f64>,
    /// analytic | fd2 | fd4
    #[arg(long)]
    pub backend: Option<String>,
    /// Combine steps h and h/2 by Richardson extrapolation.
    #[arg(long)]
    pub richardson: bool,
    /// e.g. t=-1:1,r=0.5:2,beta=0.4:2.7
    #[arg(long = "box")]
    pub bbox: Option<String>,
    /// Sample a cell-centred grid with this many nodes per axis.
    #[arg(long)]
    pub grid: Option<usize>,
    /// json | csv | pretty
    #[arg(long)]
    pub format: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub levels: Option<usize>,
    /// Flat `key = value` file with the same keys as the flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Pretty,
}

impl Format {
    fn parse(s: &str) -> Result<Self, CliError> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "pretty" => Ok(Format::Pretty),
            _ => Err(config_err(format!("unknown format {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EngineConfig {
    pub backend: Backend,
    pub h: f64,
    pub richardson: bool,
    pub outer_h: f64,
}

/// Fully resolved settings of one invocation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub suite: String,
    pub fields: Vec<String>,
    pub checks: Vec<String>,
    pub plan: SamplingPlan,
    pub engine: EngineConfig,
    pub format: Format,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub levels: Option<usize>,
}

impl RunConfig {
    pub fn engine(&self) -> DerivativeEngine<f64> {
        DerivativeEngine::new(self.engine.backend, self.engine.h).with_richardson(self.engine.richardson)
    }
}

const CONFIG_KEYS: &[&str] = &[
    "suite", "field", "check", "n", "seed", "h", "backend", "richardson", "box", "grid", "format",
    "out", "levels",
];

/// Parses `key = value` lines; `#` starts a comment. `field` and `check`
/// accept comma-separated lists and may repeat.
pub fn parse_config_file(text: &str) -> Result<BTreeMap<String, Vec<String>>, CliError> {
    let mut map: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| config_err(format!("line {}: expected key = value", k + 1)))?;
        let key = key.trim();
        if !CONFIG_KEYS.contains(&key) {
            return Err(config_err(format!("line {}: unknown key {key:?}", k + 1)));
        }
        let value = value.trim().to_string();
        let entry = map.entry(key.to_string()).or_default();
        if key == "field" || key == "check" {
            entry.extend(value.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()));
        } else {
            *entry = vec![value];
        }
    }
    Ok(map)
}

fn parse_num<N: std::str::FromStr>(key: &str, s: &str) -> Result<N, CliError> {
    s.parse().map_err(|_| config_err(format!("{key}: cannot parse {s:?}")))
}

fn parse_range(key: &str, s: &str) -> Result<(f64, f64), CliError> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| config_err(format!("box {key}: expected a:b")))?;
    Ok((parse_num(key, a.trim())?, parse_num(key, b.trim())?))
}

/// Applies `t=a:b,r=a:b,beta=a:b` (any subset) to `plan`.
pub fn apply_box(plan: &mut SamplingPlan, text: &str) -> Result<(), CliError> {
    for part in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (key, range) = part
            .split_once('=')
            .ok_or_else(|| config_err(format!("box: expected key=a:b, got {part:?}")))?;
        let (lo, hi) = parse_range(key, range)?;
        match key.trim() {
            "t" => (plan.t_min, plan.t_max) = (lo, hi),
            "r" => (plan.r_min, plan.r_max) = (lo, hi),
            "beta" => (plan.beta_min, plan.beta_max) = (lo, hi),
            other => return Err(config_err(format!("box: unknown axis {other:?}"))),
        }
    }
    Ok(())
}

/// Merges flags over the config file over defaults and validates every
/// name before anything is computed.
pub fn resolve(args: &RunArgs, default_format: Format) -> Result<RunConfig, CliError> {
    let file = match &args.config {
        Some(path) => parse_config_file(&std::fs::read_to_string(path).map_err(|e| {
            config_err(format!("cannot read {}: {e}", path.display()))
        })?)?,
        None => BTreeMap::new(),
    };
    let from_file = |key: &str| file.get(key).and_then(|v| v.first()).cloned();
    let pick = |flag: &Option<String>, key: &str| flag.clone().or_else(|| from_file(key));

    let suite = pick(&args.suite, "suite").unwrap_or_else(|| "all".into());
    Suite::parse(&suite).ok_or_else(|| config_err(format!("unknown suite {suite:?}")))?;

    let list = |flag: &Vec<String>, key: &str| {
        if flag.is_empty() {
            file.get(key).cloned().unwrap_or_default()
        } else {
            flag.clone()
        }
    };
    let fields = list(&args.fields, "field");
    let checks = list(&args.checks, "check");
    select_checks(&checks)?;
    select_fields(&fields, &crate::verify::known_names())?;

    let backend_name = pick(&args.backend, "backend").unwrap_or_else(|| "analytic".into());
    let backend = Backend::parse(&backend_name)
        .ok_or_else(|| config_err(format!("unknown backend {backend_name:?}")))?;
    let h = match args.h {
        Some(h) => h,
        None => match from_file("h") {
            Some(s) => parse_num("h", &s)?,
            None => DerivativeEngine::<f64>::for_backend(backend).h,
        },
    };
    if !(h > 0.0 && h.is_finite()) {
        return Err(config_err("h must be positive"));
    }
    let richardson = args.richardson
        || match from_file("richardson") {
            Some(s) => parse_num::<bool>("richardson", &s)?,
            None => false,
        };

    let mut plan = SamplingPlan::default();
    if let Some(b) = pick(&args.bbox, "box") {
        apply_box(&mut plan, &b)?;
    }
    if let Some(n) = args.n.or(from_file("n").map(|s| parse_num("n", &s)).transpose()?) {
        plan.n_samples = n;
    }
    if let Some(seed) = args.seed.or(from_file("seed").map(|s| parse_num("seed", &s)).transpose()?) {
        plan.rng_seed = seed;
    }
    if let Some(g) = args.grid.or(from_file("grid").map(|s| parse_num("grid", &s)).transpose()?) {
        plan.mode = SampleMode::Grid { per_axis: g };
    }
    plan.validate()?;

    let format = match pick(&args.format, "format") {
        Some(f) => Format::parse(&f)?,
        None => default_format,
    };
    let out = args.out.clone().or_else(|| from_file("out").map(PathBuf::from));
    let levels = args.levels.or(from_file("levels").map(|s| parse_num("levels", &s)).transpose()?);

    Ok(RunConfig {
        suite,
        fields,
        checks,
        plan,
        engine: EngineConfig {
            backend,
            h,
            richardson,
            outer_h: OUTER_STEP,
        },
        format,
        out,
        levels,
    })
}

#[derive(Serialize)]
struct RunDocument<'a> {
    version: &'static str,
    config: &'a RunConfig,
    reports: Vec<&'a ResidualReport>,
}

#[derive(Serialize)]
struct ConvergeDocument<'a> {
    version: &'static str,
    config: &'a RunConfig,
    convergence: &'a Convergence,
}

#[derive(Serialize)]
struct CsvRow<'a> {
    check: &'a str,
    field: &'a str,
    backend: &'a str,
    h: f64,
    n: usize,
    max_abs: f64,
    mean_abs: f64,
    rel_max: f64,
    worst_t: f64,
    worst_r: f64,
    worst_alpha: f64,
    worst_beta: f64,
    tol: f64,
    pass: bool,
}

impl<'a> From<&'a ResidualReport> for CsvRow<'a> {
    fn from(r: &'a ResidualReport) -> Self {
        Self {
            check: &r.check,
            field: &r.field,
            backend: &r.backend,
            h: r.h,
            n: r.n,
            max_abs: r.max_abs,
            mean_abs: r.mean_abs,
            rel_max: r.rel_max,
            worst_t: r.worst_point.t,
            worst_r: r.worst_point.r,
            worst_alpha: r.worst_point.alpha,
            worst_beta: r.worst_point.beta,
            tol: r.tol,
            pass: r.pass,
        }
    }
}

/// `# key=value` header lines echoing the resolved config.
fn csv_header(cfg: &RunConfig) -> Result<String, CliError> {
    let value = serde_json::to_value(cfg).map_err(|e| config_err(e.to_string()))?;
    let mut out = format!("# version={VERSION}\n");
    fn walk(prefix: &str, v: &serde_json::Value, out: &mut String) {
        match v {
            serde_json::Value::Object(m) => {
                for (k, v) in m {
                    let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                    walk(&key, v, out);
                }
            }
            serde_json::Value::Array(a) => {
                let items: Vec<String> = a.iter().map(|x| x.as_str().unwrap_or("").to_string()).collect();
                out.push_str(&format!("# {prefix}={}\n", items.join(",")));
            }
            serde_json::Value::String(s) => out.push_str(&format!("# {prefix}={s}\n")),
            other => out.push_str(&format!("# {prefix}={other}\n")),
        }
    }
    walk("", &value, &mut out);
    Ok(out)
}

fn render_run(cfg: &RunConfig, outcomes: &[Outcome]) -> Result<String, CliError> {
    let reports: Vec<&ResidualReport> = outcomes.iter().map(|o| &o.report).collect();
    Ok(match cfg.format {
        Format::Json => {
            let doc = RunDocument {
                version: VERSION,
                config: cfg,
                reports,
            };
            let mut s = serde_json::to_string_pretty(&doc).map_err(|e| config_err(e.to_string()))?;
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in reports {
                w.serialize(CsvRow::from(r)).map_err(|e| config_err(e.to_string()))?;
            }
            let body = w.into_inner().map_err(|e| config_err(e.to_string()))?;
            csv_header(cfg)? + &String::from_utf8_lossy(&body)
        }
        Format::Pretty => {
            let mut s = format!(
                "{:<34} {:<32} {:<9} {:>10} {:>8}  {:<6} {}\n",
                "field", "check", "backend", "rel_max", "tol", "result", "expected"
            );
            for o in outcomes {
                let r = &o.report;
                s.push_str(&format!(
                    "{:<34} {:<32} {:<9} {:>10.3e} {:>8.0e}  {:<6} {}{}\n",
                    r.field,
                    r.check,
                    r.backend,
                    r.rel_max,
                    r.tol,
                    if r.pass { "pass" } else { "FAIL" },
                    o.expected.as_str(),
                    if o.as_expected() { "" } else { "  <-- unexpected" },
                ));
            }
            s
        }
    })
}

fn render_converge(cfg: &RunConfig, conv: &Convergence) -> Result<String, CliError> {
    let verdict = match conv.order {
        Some(o) => format!("order {o:.3}"),
        None => "floor reached".to_string(),
    };
    Ok(match cfg.format {
        Format::Json => {
            let doc = ConvergeDocument {
                version: VERSION,
                config: cfg,
                convergence: conv,
            };
            let mut s = serde_json::to_string_pretty(&doc).map_err(|e| config_err(e.to_string()))?;
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for row in &conv.rows {
                w.serialize(row).map_err(|e| config_err(e.to_string()))?;
            }
            let body = w.into_inner().map_err(|e| config_err(e.to_string()))?;
            format!("{}# result={verdict}\n{}", csv_header(cfg)?, String::from_utf8_lossy(&body))
        }
        Format::Pretty => {
            let mut s = format!("{} on {} ({})\n{:>12} {:>12}\n", conv.check, conv.field, conv.backend, "h", "rel_max");
            for row in &conv.rows {
                s.push_str(&format!("{:>12.4e} {:>12.4e}\n", row.h, row.rel_max));
            }
            s.push_str(&verdict);
            s.push('\n');
            s
        }
    })
}

/// Writes `text` to `path` through a temporary file in the same directory,
/// so a failed run never leaves a partial report behind.
pub fn write_atomic(path: &Path, text: &str) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(text.as_bytes())?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| CliError::Io(e.error))?;
    Ok(())
}

fn emit(cfg: &RunConfig, text: &str, stdout: &mut dyn Write) -> Result<(), CliError> {
    match &cfg.out {
        Some(path) => write_atomic(path, text),
        None => Ok(stdout.write_all(text.as_bytes())?),
    }
}

pub fn cmd_catalog(format: Option<&str>) -> Result<String, CliError> {
    let listing: Vec<CatalogEntry> = catalog_listing(&field_catalog::<f64>());
    match Format::parse(format.unwrap_or("json"))? {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&listing).map_err(|e| config_err(e.to_string()))?;
            s.push('\n');
            Ok(s)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for e in &listing {
                w.serialize(e).map_err(|e| config_err(e.to_string()))?;
            }
            let body = w.into_inner().map_err(|e| config_err(e.to_string()))?;
            Ok(String::from_utf8_lossy(&body).into_owned())
        }
        Format::Pretty => Ok(listing
            .iter()
            .map(|e| {
                format!(
                    "{:<34} {:<8} {:<5} {}\n",
                    e.name,
                    serde_json::to_value(e.kind).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
                    e.satisfies_condition,
                    e.singular_loci
                )
            })
            .collect()),
    }
}

/// Runs the configured suite. Returns the rendered report and whether every
/// outcome matched its expectation.
pub fn cmd_run(cfg: &RunConfig) -> Result<(String, Vec<Outcome>), CliError> {
    let suite = Suite::parse(&cfg.suite).ok_or_else(|| config_err("unknown suite"))?;
    let outcomes = run_suite(suite, &cfg.fields, &cfg.checks, &cfg.plan, &cfg.engine())?;
    Ok((render_run(cfg, &outcomes)?, outcomes))
}

/// One check on one field over `levels` halvings of `h`.
pub fn cmd_converge(cfg: &RunConfig) -> Result<(String, Convergence), CliError> {
    let levels = cfg.levels.unwrap_or(4);
    let [check] = cfg.checks.as_slice() else {
        return Err(config_err("converge needs exactly one --check"));
    };
    if !FIELD_CHECKS.contains(&check.as_str()) {
        return Err(config_err(format!("converge works on field checks, not {check:?}")));
    }
    let names: Vec<String> = field_catalog::<f64>().iter().map(|f| f.name().to_string()).collect();
    let selected = select_fields(&cfg.fields, &names)?;
    let [name] = selected.as_slice() else {
        return Err(config_err("converge needs a --field selecting exactly one catalog field"));
    };
    let field = field_catalog::<f64>()
        .into_iter()
        .find(|f| f.name() == name)
        .ok_or_else(|| config_err(format!("unknown field {name:?}")))?;
    let conv = estimate_convergence_order(check, &field, &cfg.plan, cfg.engine.backend, cfg.engine.h, levels)?;
    Ok((render_converge(cfg, &conv)?, conv))
}

/// Entry point shared by the binary and the tests. Returns the exit code.
pub fn run_cli<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(stderr, "{e}")
            } else {
                write!(stdout, "{e}")
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Catalog { format } => {
            cmd_catalog(format.as_deref()).and_then(|s| Ok(stdout.write_all(s.as_bytes())?)).map(|_| EXIT_OK)
        }
        Command::Run(args) => resolve(&args, Format::Json).and_then(|cfg| {
            let (text, outcomes) = cmd_run(&cfg)?;
            emit(&cfg, &text, stdout)?;
            let unexpected: Vec<_> = outcomes.iter().filter(|o| !o.as_expected()).collect();
            for o in &unexpected {
                let _ = writeln!(
                    stderr,
                    "unexpected: {} {} rel_max={:e} tol={:e} expected {}",
                    o.report.field,
                    o.report.check,
                    o.report.rel_max,
                    o.report.tol,
                    o.expected.as_str()
                );
            }
            Ok(if unexpected.is_empty() { EXIT_OK } else { EXIT_UNEXPECTED })
        }),
        Command::Converge(args) => resolve(&args, Format::Pretty).and_then(|mut cfg| {
            if args.h.is_none() && !cfg_has_file_key(&args, "h") {
                cfg.engine.h = default_h0(cfg.engine.backend);
            }
            if cfg.levels.is_none() {
                cfg.levels = Some(4);
            }
            let (text, _) = cmd_converge(&cfg)?;
            emit(&cfg, &text, stdout)?;
            Ok(EXIT_OK)
        }),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn cfg_has_file_key(args: &RunArgs, key: &str) -> bool {
    args.config
        .as_ref()
        .and_then(|p| std::fs::read_to_string(p).ok())
        .and_then(|t| parse_config_file(&t).ok())
        .is_some_and(|m| m.contains_key(key))
}
