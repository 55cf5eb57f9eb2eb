//! Command-line interface. Exit codes: 0 success, 1 usage or parse error,
//! 2 failed assertion, 3 degenerate input.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use acycle_core::geometry::{delaunay_complex, WeightMode};
use acycle_core::msa::{statistics, MsaError};
use acycle_core::persistence::reduce;
use acycle_core::stochastic::{sample_config, sample_poisson, ConfigSpec, Window};
use acycle_core::{FilteredComplex, PhiSpec, PointSet};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::experiments::{self, ExperimentError, ExperimentReport};
use crate::io::{self, IoError};

/// Environment variable supplying the default seed.
pub const SEED_ENV: &str = "ACYCLE_SEED";

#[derive(Debug, Parser)]
#[command(name = "acycle", version, about = "Minimal spanning acycles of Delaunay complexes")]
pub struct Cli {
    /// Worker threads; defaults to the available parallelism.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// More log output (repeatable).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the weighted Delaunay complex of a point file.
    Complex {
        /// Point file (CSV, or JSON lines with a .jsonl extension).
        #[arg(short, long)]
        input: PathBuf,
        #[arg(short, long, value_enum, default_value_t = Weight::Alpha)]
        weight: Weight,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Persistence diagrams of a complex.
    Persistence {
        #[command(flatten)]
        input: Input,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Minimal spanning acycle statistics in one degree.
    Msa {
        #[command(flatten)]
        input: Input,
        #[arg(short, long)]
        k: usize,
        /// Exponent of the weight map t -> t^p.
        #[arg(short, long, default_value_t = 1.0)]
        p: f64,
        /// Include the acycle's simplices.
        #[arg(long)]
        simplices: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Sample a point set.
    Sample {
        #[arg(long, value_enum, default_value_t = SampleKind::Poisson)]
        kind: SampleKind,
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        #[arg(short, long, default_value_t = 2)]
        d: usize,
        /// Volume of the centered window.
        #[arg(short, long, default_value_t = 100.0)]
        n: f64,
        #[arg(short, long, default_value_t = 1.0)]
        r: f64,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        rho: Option<f64>,
        #[arg(long, env = SEED_ENV, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        replicate: u64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run an experiment and write its report.
    Experiment(ExperimentArgs),
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct Input {
    /// Complex file.
    #[arg(short, long)]
    pub complex: Option<PathBuf>,
    /// Point file; its complex is built first.
    #[arg(long)]
    pub points: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    #[arg(value_enum)]
    pub which: Experiment,
    /// Parameter file, TOML or JSON (by a .json extension).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Directory receiving the report files.
    #[arg(long, default_value = "results")]
    pub out_dir: PathBuf,
    /// Override any parameter, e.g. `--set n_grid=[64,128]`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(short, long)]
    pub d: Option<usize>,
    #[arg(short, long)]
    pub k: Option<usize>,
    #[arg(short, long)]
    pub p: Option<f64>,
    #[arg(short, long)]
    pub n: Option<f64>,
    #[arg(short, long)]
    pub r: Option<f64>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long)]
    pub replicates: Option<usize>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Weight {
    Alpha,
    DelaunayCech,
}

impl From<Weight> for WeightMode {
    fn from(w: Weight) -> Self {
        match w {
            Weight::Alpha => WeightMode::Alpha,
            Weight::DelaunayCech => WeightMode::DelaunayCech,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SampleKind {
    Poisson,
    Config,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Jsonl,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Experiment {
    Stabilization,
    Clt,
    Config,
    Tails,
    Geom,
    D2angle,
}

impl Experiment {
    fn name(self) -> &'static str {
        match self {
            Experiment::Stabilization => "stabilization",
            Experiment::Clt => "clt",
            Experiment::Config => "config",
            Experiment::Tails => "tails",
            Experiment::Geom => "geom",
            Experiment::D2angle => "d2angle",
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Degenerate(String),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Failed(_) => 2,
            CliError::Degenerate(_) => 3,
        }
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        match &e {
            IoError::Geometry(g) if g.is_degeneracy() => CliError::Degenerate(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<acycle_core::geometry::GeometryError> for CliError {
    fn from(e: acycle_core::geometry::GeometryError) -> Self {
        if e.is_degeneracy() {
            CliError::Degenerate(e.to_string())
        } else {
            CliError::Usage(e.to_string())
        }
    }
}

impl From<MsaError> for CliError {
    fn from(e: MsaError) -> Self {
        match e {
            MsaError::Geometry(g) => g.into(),
            e => CliError::Usage(e.to_string()),
        }
    }
}

impl From<ExperimentError> for CliError {
    fn from(e: ExperimentError) -> Self {
        if e.is_degeneracy() {
            CliError::Degenerate(e.to_string())
        } else {
            CliError::Usage(e.to_string())
        }
    }
}

/// Parses `args` and runs the command, returning the process exit code.
pub fn main_with<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    let _ = env_logger::Builder::new().filter_level(level).parse_default_env().try_init();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

pub fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Complex { input, weight, output } => {
            let points = io::read_points_path(&input)?;
            let complex = delaunay_complex(&points, weight.into())?;
            let params = json!({ "command": "complex", "input": input, "weight": format!("{weight:?}") });
            let mut w = io::output(output.as_deref())?;
            io::write_complex(&mut w, &complex, &params)?;
            w.flush()?;
        }
        Command::Persistence { input, output } => {
            let complex = load(&input)?;
            let pairing = reduce(&complex);
            let degrees: Vec<usize> = (0..=complex.dim().unwrap_or(0)).collect();
            let params = json!({ "command": "persistence", "input": input_value(&input) });
            let mut w = io::output(output.as_deref())?;
            io::write_diagrams(&mut w, &complex, &pairing, &degrees, &params)?;
            w.flush()?;
        }
        Command::Msa {
            input,
            k,
            p,
            simplices,
            output,
        } => {
            let complex = load(&input)?;
            let phi = PhiSpec::new(p)?;
            let result = statistics(&complex, k, phi)?;
            let params = json!({ "command": "msa", "input": input_value(&input), "k": k, "p": p });
            let mut w = io::output(output.as_deref())?;
            serde_json::to_writer_pretty(&mut w, &io::MsaJson::new(&result, simplices, params)).map_err(IoError::from)?;
            writeln!(w)?;
            w.flush()?;
        }
        Command::Sample {
            kind,
            lambda,
            d,
            n,
            r,
            eps,
            rho,
            seed,
            replicate,
            format,
            output,
        } => {
            if !(2..=3).contains(&d) {
                return Err(CliError::Usage(format!("d must be 2 or 3 (got {d})")));
            }
            let (points, params) = match kind {
                SampleKind::Poisson => {
                    if !(lambda > 0.0 && n > 0.0) {
                        return Err(CliError::Usage("lambda and n must be positive".into()));
                    }
                    let pts = sample_poisson(lambda, &Window::centered(n, d).bounds(), seed, replicate);
                    let params = json!({ "command": "sample", "kind": "poisson", "lambda": lambda, "d": d, "n": n, "seed": seed, "replicate": replicate });
                    (pts, params)
                }
                SampleKind::Config => {
                    let spec = config_spec(d, r, eps, rho).map_err(|e| CliError::Usage(e.to_string()))?;
                    let pts = sample_config(spec, seed).map_err(|e| CliError::Usage(e.to_string()))?;
                    let params = json!({ "command": "sample", "kind": "config", "d": d, "r": r, "eps": spec.eps, "rho": spec.rho, "seed": seed });
                    (pts, params)
                }
            };
            let mut w = io::output(output.as_deref())?;
            match format {
                Format::Csv => io::write_points_csv(&mut w, &points, &params)?,
                Format::Jsonl => io::write_points_jsonl(&mut w, &points, &params)?,
            }
            w.flush()?;
        }
        Command::Experiment(args) => experiment(&args)?,
    }
    Ok(())
}

use std::io::Write as _;

fn config_spec(d: usize, r: f64, eps: Option<f64>, rho: Option<f64>) -> Result<ConfigSpec, acycle_core::stochastic::ConfigError> {
    let mut s = ConfigSpec::new(d, r)?;
    if let Some(rho) = rho {
        s = s.with_rho(rho)?;
    }
    if let Some(eps) = eps {
        s = s.with_eps(eps)?;
    }
    Ok(s)
}

fn load(input: &Input) -> Result<FilteredComplex, CliError> {
    match (&input.complex, &input.points) {
        (Some(c), _) => Ok(io::read_complex_path(c)?),
        (None, Some(p)) => {
            let pts: PointSet = io::read_points_path(p)?;
            Ok(delaunay_complex(&pts, WeightMode::Alpha)?)
        }
        (None, None) => Err(CliError::Usage("an input file is required".into())),
    }
}

fn input_value(input: &Input) -> Value {
    match (&input.complex, &input.points) {
        (Some(c), _) => json!({ "complex": c }),
        (_, p) => json!({ "points": p }),
    }
}

/// Reads a parameter file as a JSON object.
pub fn read_params_file(path: &Path) -> Result<Map<String, Value>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let value: Value = if path.extension().is_some_and(|e| e == "json") {
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?
    } else {
        let t: toml::Value = toml::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        serde_json::to_value(t).map_err(|e| CliError::Usage(e.to_string()))?
    };
    match value {
        Value::Object(m) => Ok(m),
        _ => Err(CliError::Usage(format!("{}: expected a table of parameters", path.display()))),
    }
}

/// Merges parameters with precedence flag > `--set` > file > environment
/// seed > defaults.
pub fn merged_params(args: &ExperimentArgs, env_seed: Option<&str>) -> Result<Map<String, Value>, CliError> {
    let mut m = Map::new();
    if let Some(s) = env_seed {
        let seed: u64 = s
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{SEED_ENV} must be an unsigned integer (got {s:?})")))?;
        if args.which != Experiment::Geom {
            m.insert("seed".into(), json!(seed));
        }
    }
    if let Some(path) = &args.config {
        m.extend(read_params_file(path)?);
    }
    for kv in &args.set {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("--set expects KEY=VALUE (got {kv:?})")))?;
        let v = serde_json::from_str(v).unwrap_or_else(|_| Value::String(v.to_string()));
        m.insert(k.trim().to_string(), v);
    }
    let mut flag = |key: &str, v: Option<Value>| {
        if let Some(v) = v {
            m.insert(key.to_string(), v);
        }
    };
    flag("lambda", args.lambda.map(|x| json!(x)));
    flag("d", args.d.map(|x| json!(x)));
    match args.which {
        Experiment::Stabilization => flag("ks", args.k.map(|x| json!([x]))),
        _ => flag("k", args.k.map(|x| json!(x))),
    }
    match args.which {
        Experiment::Config => flag("ps", args.p.map(|x| json!([x]))),
        _ => flag("p", args.p.map(|x| json!(x))),
    }
    flag("n", args.n.map(|x| json!(x)));
    flag("r", args.r.map(|x| json!(x)));
    flag("eps", args.eps.map(|x| json!(x)));
    flag("rho", args.rho.map(|x| json!(x)));
    flag("replicates", args.replicates.map(|x| json!(x)));
    flag("trials", args.trials.map(|x| json!(x)));
    flag("seed", args.seed.map(|x| json!(x)));
    Ok(m)
}

fn parse<P: DeserializeOwned>(which: Experiment, m: Map<String, Value>) -> Result<P, CliError> {
    serde_json::from_value(Value::Object(m)).map_err(|e| CliError::Usage(format!("{} parameters: {e}", which.name())))
}

/// Runs the experiment described by `m`.
pub fn run_experiment(which: Experiment, m: Map<String, Value>) -> Result<ExperimentReport, CliError> {
    use experiments::*;
    Ok(match which {
        Experiment::Stabilization => stabilization::run(&parse(which, m)?)?,
        Experiment::Clt => clt::run(&parse(which, m)?)?,
        Experiment::Config => config::run(&parse(which, m)?)?,
        Experiment::Tails => tails::run(&parse(which, m)?)?,
        Experiment::Geom => geom::run(&parse(which, m)?)?,
        Experiment::D2angle => angle::run(&parse(which, m)?)?,
    })
}

fn experiment(args: &ExperimentArgs) -> Result<(), CliError> {
    let env_seed = std::env::var(SEED_ENV).ok();
    let params = merged_params(args, env_seed.as_deref())?;
    let report = run_experiment(args.which, params)?;
    let paths = report.write_to(&args.out_dir)?;
    let mut out = std::io::stdout().lock();
    for line in &report.lines {
        writeln!(out, "{line}")?;
    }
    for p in &paths {
        writeln!(out, "wrote {}", p.display())?;
    }
    if report.ok {
        writeln!(out, "{}: ok", report.experiment)?;
        Ok(())
    } else {
        Err(CliError::Failed(format!(
            "{}: assertions failed; see {}",
            report.experiment,
            paths[0].display()
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(v: &[&str]) -> ExperimentArgs {
        let mut full = vec!["acycle", "experiment"];
        full.extend_from_slice(v);
        match Cli::try_parse_from(full).unwrap().command {
            Command::Experiment(a) => a,
            _ => unreachable!(),
        }
    }

    #[test]
    fn flags_beat_sets_beat_environment() {
        let a = args(&["clt", "--set", "seed=5", "--set", "n=1024", "--seed", "9"]);
        let m = merged_params(&a, Some("3")).unwrap();
        assert_eq!(m["seed"], json!(9));
        assert_eq!(m["n"], json!(1024));
        let a = args(&["clt", "--set", "seed=5"]);
        assert_eq!(merged_params(&a, Some("3")).unwrap()["seed"], json!(5));
        let a = args(&["clt"]);
        assert_eq!(merged_params(&a, Some("3")).unwrap()["seed"], json!(3));
        assert!(merged_params(&a, Some("x")).is_err());
    }

    #[test]
    fn file_sits_between_environment_and_flags() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.toml");
        std::fs::write(&path, "seed = 7\nks = [1]\nn_grid = [64.0, 128.0]\n").unwrap();
        let a = args(&["stabilization", "--config", path.to_str().unwrap(), "--k", "2"]);
        let m = merged_params(&a, Some("3")).unwrap();
        assert_eq!(m["seed"], json!(7));
        assert_eq!(m["ks"], json!([2]));
        let p: experiments::stabilization::StabilizationParams = parse(Experiment::Stabilization, m).unwrap();
        assert_eq!(p.n_grid, vec![64.0, 128.0]);
    }

    #[test]
    fn unknown_keys_are_usage_errors() {
        let a = args(&["clt", "--trials", "3"]);
        let e = run_experiment(Experiment::Clt, merged_params(&a, None).unwrap()).unwrap_err();
        assert_eq!(e.exit_code(), 1);
    }
}
