//! Command-line front end. Every run writes its data files plus a manifest
//! holding the resolved configuration, the library version and the seed.

mod verify;

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::bounds::{classical_limit_table, qsl_curve, QslReport};
use crate::error::{Error, Result};
use crate::grape::sweep::{bracket_t_hi, default_t_hi, mct_sweep, SweepOptions, SweepResult};
use crate::grape::{optimize, Method, OptimizationResult, OptimizeOptions};
use crate::lie::{generate_algebra, DEFAULT_TOL};
use crate::models::{ModelSpec, PhaseControlModel, TargetFamily, TargetSpec};
use crate::short_time::{su2_mct_bounds, su3_mct_bounds, target_mct_bound};

pub use verify::{run_properties, PropertyOutcome};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PROPERTY: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INVARIANT: i32 = 3;

#[derive(Debug, Parser, Serialize)]
#[command(name = "unitary-qsl", version, about = "Speed limits and minimum control times for phase-controlled gates")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Seed for every random draw of the run.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// QSL times and short-time bounds along V(phi) for each target.
    Bounds(BoundsArgs),
    /// MCT estimate by continuation in T.
    Sweep(SweepArgs),
    /// Best-of-seeds GRAPE optimization at a single T.
    Mct(MctArgs),
    /// Dynamical Lie algebra of the model's controls.
    Lie(ModelArgs),
    /// tau2 at the most distant rotation angle for growing spin J.
    Classical(ClassicalArgs),
    /// Run the property suites; exit 1 on any failure.
    Verify,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Su2,
    Su3,
    Spin,
}

#[derive(Debug, Args, Serialize)]
pub struct ModelArgs {
    #[arg(long, value_enum, default_value_t = ModelKind::Su2)]
    pub model: ModelKind,
    /// Spin quantum number for `--model spin`.
    #[arg(long)]
    pub j: Option<f64>,
    /// Rabi frequency; times are reported in units of 1/omega when it is 1.
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
}

impl ModelArgs {
    pub fn build(&self) -> Result<PhaseControlModel> {
        let label = match self.model {
            ModelKind::Su2 => "su2",
            ModelKind::Su3 => "su3",
            ModelKind::Spin => "spinJ",
        };
        PhaseControlModel::from_spec(&ModelSpec { label: label.into(), omega: self.omega, j: self.j })
    }
}

#[derive(Debug, Args, Serialize)]
pub struct BoundsArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Comma-separated target labels.
    #[arg(long, value_delimiter = ',', default_value = "x,z")]
    pub targets: Vec<String>,
    /// `start:stop:step` in radians, stop inclusive.
    #[arg(long)]
    pub phi: String,
}

#[derive(Debug, Args, Serialize)]
pub struct OptimizerArgs {
    /// Time steps per field.
    #[arg(long, default_value_t = 30)]
    pub nts: usize,
    #[arg(long, default_value_t = 20)]
    pub seeds: usize,
    #[arg(long, value_enum, default_value_t = MethodArg::Gd)]
    pub method: MethodArg,
    #[arg(long, default_value_t = 5000)]
    pub max_iters: usize,
}

impl OptimizerArgs {
    fn options(&self) -> OptimizeOptions {
        OptimizeOptions {
            method: match self.method {
                MethodArg::Gd => Method::GradientDescent,
                MethodArg::Lbfgs => Method::Lbfgs,
            },
            max_iters: self.max_iters,
            ..OptimizeOptions::default()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodArg {
    Gd,
    Lbfgs,
}

#[derive(Debug, Args, Serialize)]
pub struct SweepArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub target: String,
    #[arg(long)]
    pub phi: f64,
    #[command(flatten)]
    pub optimizer: OptimizerArgs,
    /// Grid spacing in units of 1/omega.
    #[arg(long, default_value_t = 0.05)]
    pub tstep: f64,
    /// Starting time in units of 1/omega. Defaults to the larger of
    /// max(3 tau, 2) and 1.5 times the short-time bound, doubled until some
    /// seed succeeds.
    #[arg(long)]
    pub thi: Option<f64>,
    #[arg(long, default_value_t = 1e-5)]
    pub threshold: f64,
    /// CSV of `(phi, T)` reference pairs copied into the sweep JSON.
    #[arg(long)]
    pub overlay: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct MctArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub target: String,
    #[arg(long)]
    pub phi: f64,
    /// Total time in units of 1/omega.
    #[arg(long)]
    pub t: f64,
    #[command(flatten)]
    pub optimizer: OptimizerArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct ClassicalArgs {
    /// `start:stop[:step]`; the step defaults to 1/2.
    #[arg(long, default_value = "0.5:50")]
    pub j: String,
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
}

/// Error carrying the process exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvariantViolation(_) => EXIT_INVARIANT,
            Error::Io(_) | Error::Json(_) | Error::Csv(_) => EXIT_PROPERTY,
            _ => EXIT_USAGE,
        };
        Self { code, message: e.to_string() }
    }
}

/// Parses `start:stop:step` (or `start:stop` when `default_step` is given)
/// into an inclusive grid.
pub fn parse_range(s: &str, default_step: Option<f64>) -> Result<Vec<f64>> {
    let bad = || Error::InvalidArgument(format!("bad range `{s}`, expected start:stop:step"));
    let parts: Vec<f64> = s
        .split(':')
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_>>()?;
    let (start, stop, step) = match (parts.as_slice(), default_step) {
        ([a, b, c], _) => (*a, *b, *c),
        ([a, b], Some(c)) => (*a, *b, c),
        ([a], _) => (*a, *a, 1.0),
        _ => return Err(bad()),
    };
    if !(step > 0.0) || !start.is_finite() || !stop.is_finite() {
        return Err(bad());
    }
    let n = ((stop - start) / step + 1e-9).floor();
    if n < 0.0 {
        return Ok(Vec::new());
    }
    // rounding removes accumulated drift such as 0.15000000000000002
    Ok((0..=n as usize).map(|k| ((start + k as f64 * step) * 1e12).round() / 1e12).collect())
}

#[derive(Serialize)]
struct Manifest<'a> {
    command: &'a str,
    version: &'a str,
    seed: u64,
    config: &'a Cli,
    resolved: serde_json::Value,
    outputs: Vec<String>,
}

struct Run<'a> {
    cli: &'a Cli,
    outputs: Vec<String>,
}

impl Run<'_> {
    fn path(&mut self, name: &str) -> Result<PathBuf> {
        fs::create_dir_all(&self.cli.out)?;
        self.outputs.push(name.to_string());
        Ok(self.cli.out.join(name))
    }

    fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let p = self.path(name)?;
        let mut s = serde_json::to_string_pretty(value)?;
        s.push('\n');
        fs::write(p, s)?;
        Ok(())
    }

    fn write_csv<T: Serialize>(&mut self, name: &str, rows: &[T]) -> Result<()> {
        let p = self.path(name)?;
        let mut w = csv::Writer::from_path(p)?;
        for r in rows {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(())
    }

    fn write_rows<T: Serialize>(&mut self, stem: &str, rows: &[T]) -> Result<()> {
        match self.cli.format {
            Format::Csv => self.write_csv(&format!("{stem}.csv"), rows),
            Format::Json => self.write_json(&format!("{stem}.json"), &rows),
        }
    }

    fn finish(mut self, command: &str, stem: &str, resolved: serde_json::Value) -> Result<()> {
        let name = format!("{stem}.manifest.json");
        let outputs = std::mem::take(&mut self.outputs);
        let m = Manifest { command, version: env!("CARGO_PKG_VERSION"), seed: self.cli.seed, config: self.cli, resolved, outputs };
        self.write_json(&name, &m)
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct BoundsRow {
    pub phi: f64,
    pub s1: f64,
    pub s2: f64,
    pub tau1: f64,
    pub tau2: f64,
    pub tau_unified: f64,
}

/// Short-time bound table for SU(2).
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Su2ShortRow {
    pub phi: f64,
    #[serde(rename = "T_x")]
    pub t_x: f64,
    #[serde(rename = "T_z")]
    pub t_z: f64,
}

/// Short-time bound table for SU(3).
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Su3ShortRow {
    pub phi: f64,
    #[serde(rename = "T_A")]
    pub t_a: f64,
    #[serde(rename = "T_C")]
    pub t_c: f64,
    #[serde(rename = "T_D")]
    pub t_d: f64,
}

/// Sweep output file.
#[derive(Debug, Serialize)]
pub struct SweepReport {
    pub model: ModelSpec,
    pub target: String,
    pub phi: f64,
    pub threshold: f64,
    pub t_hi: f64,
    pub t_step: f64,
    pub grid: Vec<SweepPoint>,
    pub t_min: Option<f64>,
    pub t_min_by_threshold: Vec<crate::grape::sweep::ThresholdTmin>,
    pub bounds: SweepBounds,
    pub qsl_consistent: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub overlay: Option<Vec<OverlayPoint>>,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct SweepPoint {
    #[serde(rename = "T")]
    pub t: f64,
    #[serde(rename = "best_J")]
    pub best_j: f64,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct SweepBounds {
    pub tau1: f64,
    pub tau2: f64,
    pub tau_unified: f64,
    pub short_time: Option<f64>,
    /// Lowest time allowed by the speed limits for any gate within the
    /// threshold.
    pub qsl_floor: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, serde::Deserialize)]
pub struct OverlayPoint {
    pub phi: f64,
    #[serde(rename = "T")]
    pub t: f64,
}

fn read_overlay(path: &Path) -> Result<Vec<OverlayPoint>> {
    let mut r = csv::Reader::from_path(path)?;
    Ok(r.deserialize().collect::<std::result::Result<_, _>>()?)
}

fn file_tag(x: f64) -> String {
    format!("{x:.4}").replace('.', "p").replace('-', "m")
}

fn model_tag(m: &PhaseControlModel) -> String {
    match m.spec().j {
        Some(j) => format!("spin{}", file_tag(j)),
        None => m.spec().label,
    }
}

fn cmd_bounds(cli: &Cli, a: &BoundsArgs) -> Result<()> {
    let model = a.model.build()?;
    let phis = parse_range(&a.phi, None)?;
    if phis.is_empty() {
        return Err(Error::InvalidArgument(format!("empty phi grid `{}`", a.phi)));
    }
    if a.targets.is_empty() {
        return Err(Error::InvalidArgument("no targets".into()));
    }
    let mut run = Run { cli, outputs: Vec::new() };
    for target in &a.targets {
        let family = TargetFamily::named(target);
        let rows = qsl_curve(&model, &family, &phis)?
            .into_iter()
            .map(|r| {
                let QslReport { s1, s2, tau1, tau2, tau_unified } = r.report;
                if !(tau_unified.is_finite() && tau_unified >= tau1 && tau_unified >= tau2) {
                    return Err(Error::InvariantViolation(format!("bad QSL times at phi = {}", r.phi)));
                }
                Ok(BoundsRow { phi: r.phi, s1, s2, tau1, tau2, tau_unified })
            })
            .collect::<Result<Vec<_>>>()?;
        run.write_rows(&format!("bounds_{}_{target}", model_tag(&model)), &rows)?;
    }
    let short = format!("short_time_{}", model_tag(&model));
    match model.spec().label.as_str() {
        "su2" => {
            let rows = phis
                .iter()
                .map(|&phi| su2_mct_bounds(&model, phi).map(|(t_x, t_z)| Su2ShortRow { phi, t_x, t_z }))
                .collect::<Result<Vec<_>>>()?;
            run.write_rows(&short, &rows)?;
        }
        "su3" => {
            let (a, b) = model.generators();
            let report = generate_algebra(&[a.normalized(), b.normalized()], DEFAULT_TOL)?;
            let rows = phis
                .iter()
                .map(|&phi| {
                    su3_mct_bounds(&model, phi, &report).map(|(t_a, t_c, t_d)| Su3ShortRow { phi, t_a, t_c, t_d })
                })
                .collect::<Result<Vec<_>>>()?;
            run.write_rows(&short, &rows)?;
        }
        _ => {}
    }
    let stem = format!("bounds_{}", model_tag(&model));
    run.finish("bounds", &stem, serde_json::json!({ "model": model.spec(), "phi": phis }))
}

/// Runs a sweep as the `sweep` subcommand would, without writing files.
pub fn run_sweep(a: &SweepArgs, seed: u64) -> Result<(SweepReport, SweepResult)> {
    let model = a.model.build()?;
    let family = TargetFamily::named(&a.target);
    let v = model.target(&TargetSpec { family: family.clone(), phi: a.phi })?;
    let om = model.omega();
    let short_time = target_mct_bound(&model, &family, a.phi)?;
    let mut opts = SweepOptions::new(0.0, a.tstep / om);
    opts.n_seeds = a.optimizer.seeds;
    opts.n_ts = a.optimizer.nts;
    opts.threshold = a.threshold;
    opts.seed = seed;
    opts.optimize = a.optimizer.options();
    let mut warning = None;
    opts.t_hi = match a.thi {
        Some(t) => t / om,
        None => {
            let start = default_t_hi(&model, &v)?.max(1.5 * short_time.unwrap_or(0.0));
            let mut probe = opts.clone();
            probe.t_hi = start;
            bracket_t_hi(&model, &v, &probe, 4)?.unwrap_or_else(|| {
                warning = Some(format!("no seed reached the threshold up to T = {}", start * 16.0));
                start
            })
        }
    };
    // keep the grid aligned with t_step
    opts.t_hi = (opts.t_hi / opts.t_step).ceil() * opts.t_step;
    let r = mct_sweep(&model, &v, &opts)?;
    if r.t_min.is_none() && warning.is_none() {
        warning = Some(format!("no grid point reached J <= {}", a.threshold));
    }
    let overlay = a.overlay.as_deref().map(read_overlay).transpose()?;
    let report = SweepReport {
        model: model.spec(),
        target: a.target.clone(),
        phi: a.phi,
        threshold: a.threshold,
        t_hi: opts.t_hi,
        t_step: opts.t_step,
        grid: r.grid.iter().map(|p| SweepPoint { t: p.t, best_j: p.best_j }).collect(),
        t_min: r.t_min,
        t_min_by_threshold: r.t_min_by_threshold.clone(),
        bounds: SweepBounds {
            tau1: r.qsl.tau1,
            tau2: r.qsl.tau2,
            tau_unified: r.qsl.tau_unified,
            short_time,
            qsl_floor: r.qsl_floor,
        },
        qsl_consistent: r.qsl_consistent,
        warning,
        overlay,
    };
    Ok((report, r))
}

fn cmd_sweep(cli: &Cli, a: &SweepArgs) -> Result<()> {
    let (report, _) = run_sweep(a, cli.seed)?;
    let mut run = Run { cli, outputs: Vec::new() };
    let model = a.model.build()?;
    let stem = format!("sweep_{}_{}_{}", model_tag(&model), a.target, file_tag(a.phi));
    run.write_json(&format!("{stem}.json"), &report)?;
    run.write_csv(&format!("{stem}.csv"), &report.grid)?;
    run.finish("sweep", &stem, serde_json::json!({ "t_hi": report.t_hi, "t_step": report.t_step }))?;
    if let Some(w) = &report.warning {
        eprintln!("warning: {w}");
    }
    if !report.qsl_consistent {
        return Err(Error::InvariantViolation(format!(
            "t_min = {:?} below the speed-limit floor {}",
            report.t_min, report.bounds.qsl_floor
        )));
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct MctReport {
    model: ModelSpec,
    target: String,
    phi: f64,
    #[serde(rename = "T")]
    t: f64,
    #[serde(rename = "best_J")]
    best_j: f64,
    best_seed: usize,
    best: OptimizationResult,
    runs: Vec<MctRun>,
}

#[derive(Debug, Serialize)]
struct MctRun {
    seed: usize,
    #[serde(rename = "J")]
    j: f64,
    iterations: usize,
    converged: bool,
}

fn cmd_mct(cli: &Cli, a: &MctArgs) -> Result<()> {
    let model = a.model.build()?;
    let v = model.target(&TargetSpec::named(&a.target, a.phi))?;
    let t = a.t / model.omega();
    let opts = a.optimizer.options();
    let mut runs = Vec::new();
    let mut best: Option<(usize, OptimizationResult)> = None;
    for k in 0..a.optimizer.seeds.max(1) {
        let r = optimize(&model, &v, t, a.optimizer.nts, cli.seed.wrapping_add(k as u64), &opts)?;
        runs.push(MctRun { seed: k, j: r.final_infidelity, iterations: r.iterations, converged: r.converged });
        if best.as_ref().map_or(true, |(_, b)| r.final_infidelity < b.final_infidelity) {
            best = Some((k, r));
        }
    }
    let (best_seed, best) = best.expect("at least one seed");
    let report = MctReport {
        model: model.spec(),
        target: a.target.clone(),
        phi: a.phi,
        t,
        best_j: best.final_infidelity,
        best_seed,
        best,
        runs,
    };
    let stem = format!("mct_{}_{}_{}_{}", model_tag(&model), a.target, file_tag(a.phi), file_tag(a.t));
    let mut run = Run { cli, outputs: Vec::new() };
    run.write_json(&format!("{stem}.json"), &report)?;
    run.finish("mct", &stem, serde_json::json!({ "T": t }))
}

fn cmd_lie(cli: &Cli, a: &ModelArgs) -> Result<()> {
    let model = a.build()?;
    let (ga, gb) = model.generators();
    let report = generate_algebra(&[ga.normalized(), gb.normalized()], DEFAULT_TOL)?;
    let stem = format!("lie_{}", model_tag(&model));
    let mut run = Run { cli, outputs: Vec::new() };
    run.write_json(&format!("{stem}.json"), &report.to_json())?;
    run.finish("lie", &stem, serde_json::json!({ "model": model.spec() }))
}

fn cmd_classical(cli: &Cli, a: &ClassicalArgs) -> Result<()> {
    let js = parse_range(&a.j, Some(0.5))?;
    if js.is_empty() {
        return Err(Error::InvalidArgument(format!("empty J grid `{}`", a.j)));
    }
    let rows = classical_limit_table(&js, a.omega)?;
    let mut run = Run { cli, outputs: Vec::new() };
    run.write_rows("classical", &rows)?;
    run.finish("classical", "classical", serde_json::json!({ "J": js }))
}

fn cmd_verify(seed: u64) -> std::result::Result<(), CliError> {
    let outcomes = run_properties(seed);
    let mut failed = Vec::new();
    for o in &outcomes {
        println!("{} {}: {}", if o.passed { "PASS" } else { "FAIL" }, o.name, o.detail);
        if !o.passed {
            failed.push(o.name);
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError { code: EXIT_PROPERTY, message: format!("failed properties: {}", failed.join(", ")) })
    }
}

/// Executes a parsed command line.
pub fn run(cli: &Cli) -> std::result::Result<(), CliError> {
    let r = match &cli.command {
        Command::Bounds(a) => cmd_bounds(cli, a),
        Command::Sweep(a) => cmd_sweep(cli, a),
        Command::Mct(a) => cmd_mct(cli, a),
        Command::Lie(a) => cmd_lie(cli, a),
        Command::Classical(a) => cmd_classical(cli, a),
        Command::Verify => return cmd_verify(cli.seed),
    };
    r.map_err(CliError::from)
}

/// Parses `args` and runs; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match run(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}
