//! Subcommand implementations. Each returns a [`Report`] and the files it
//! wrote, or a [`CliError`] carrying its exit code.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use bingham_dae::constitutive::DashpotLaw;
use bingham_dae::filippov::{check_inclusion, default_tolerance, FilippovError};
use bingham_dae::scenarios::{energy_audit, naive_signum_simulate, summarize, NaiveOptions, ScenarioId};
use bingham_dae::stepper::{convergence_study, residual_check, simulate, ConvergenceRow, StepError, Trajectory};
use bingham_dae::system::is_equilibrium;
use rayon::prelude::*;

use crate::config::{ConfigError, ConfigMap, RunConfig};
use crate::csv::{self, format_f64, CsvError};
use crate::report::Report;
use crate::svg;

/// Environment variable that overrides the output directory.
pub const OUT_DIR_ENV: &str = "BINGHAM_DAE_OUT_DIR";
/// Residual bound used by `verify` unless given explicitly.
pub const DEFAULT_VERIFY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    Usage,
    Parse,
    Io,
    Validation,
    Numerical,
    Verification,
}

impl ErrorCategory {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Usage => "usage",
            Self::Parse => "parse",
            Self::Io => "io",
            Self::Validation => "validation",
            Self::Numerical => "numerical",
            Self::Verification => "verification",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage | Self::Parse | Self::Io => 1,
            Self::Validation => 2,
            Self::Numerical => 3,
            Self::Verification => 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub category: ErrorCategory,
    pub message: String,
}

impl CliError {
    pub fn new(category: ErrorCategory, message: impl Into<String>) -> Self {
        // Keep the error on one line.
        let message = message.into().replace('\n', " ");
        Self { category, message }
    }

    pub fn exit_code(&self) -> i32 {
        self.category.exit_code()
    }

    fn io(path: &Path, e: std::io::Error) -> Self {
        Self::new(ErrorCategory::Io, format!("{}: {e}", path.display()))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "error[{}]: {}", self.category.as_str(), self.message)
    }
}

impl std::error::Error for CliError {}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        let category = if e.is_parse() { ErrorCategory::Parse } else { ErrorCategory::Validation };
        Self::new(category, e.to_string())
    }
}

impl From<StepError> for CliError {
    fn from(e: StepError) -> Self {
        let category = match e {
            StepError::Corrector { .. } => ErrorCategory::Numerical,
            _ => ErrorCategory::Validation,
        };
        Self::new(category, e.to_string())
    }
}

impl From<CsvError> for CliError {
    fn from(e: CsvError) -> Self {
        Self::new(ErrorCategory::Parse, e.to_string())
    }
}

/// What a command produced.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub report: Report,
    pub files: Vec<PathBuf>,
}

/// Output directory: explicit flag, then the environment override, then `.`.
pub fn resolve_out_dir(flag: Option<&Path>) -> PathBuf {
    if let Some(p) = flag {
        return p.to_path_buf();
    }
    match std::env::var_os(OUT_DIR_ENV) {
        Some(v) if !v.is_empty() => PathBuf::from(v),
        _ => PathBuf::from("."),
    }
}

fn place(out_dir: &Path, configured: Option<&PathBuf>, default_name: String) -> PathBuf {
    match configured {
        Some(p) if p.is_absolute() => p.clone(),
        Some(p) => out_dir.join(p),
        None => out_dir.join(default_name),
    }
}

fn write_file(path: &Path, contents: &str, files: &mut Vec<PathBuf>) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
        }
    }
    fs::write(path, contents).map_err(|e| CliError::io(path, e))?;
    files.push(path.to_path_buf());
    Ok(())
}

pub fn read_config(path: &Path) -> Result<ConfigMap, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    Ok(ConfigMap::parse(&text)?)
}

fn run_trajectory(config: &RunConfig) -> Result<Trajectory, CliError> {
    let init = config.initial_state()?;
    Ok(simulate(&config.params, &config.law, &config.forcing, init, config.dt, config.t_end)?)
}

fn describe(report: &mut Report, config: &RunConfig) {
    report
        .text("name", config.name.clone())
        .number("m", config.params.mass())
        .number("k", config.params.stiffness())
        .text("law", config.law.name())
        .number("x0", config.x0)
        .number("dt", config.dt)
        .number("t_end", config.t_end);
}

fn certify(report: &mut Report, prefix: &str, trajectory: &Trajectory) {
    match check_inclusion(trajectory, &trajectory.forcing, default_tolerance(trajectory)) {
        Ok(inc) => {
            report.inclusion(prefix, &inc);
        }
        Err(FilippovError::UnsupportedLaw) => {
            report.text(format!("{prefix}inclusion"), "unsupported");
        }
    }
}

fn audit(report: &mut Report, trajectory: &Trajectory) {
    let summary = summarize(trajectory);
    report.count("steps", trajectory.modes.len()).summary("", &summary);
    if let Some(b) = trajectory.law.as_bingham() {
        let load = trajectory.forcing.eval(summary.final_state.t);
        report.text("final.is_equilibrium", is_equilibrium(&trajectory.params, b, &summary.final_state, load).to_string());
    }
    report.residuals(&residual_check(trajectory, &trajectory.forcing));
    certify(report, "", trajectory);
    report.energy(&energy_audit(trajectory, &trajectory.forcing));
}

/// Simulates one configuration and writes its CSV, report and (optionally) plots.
pub fn cmd_run(config: &RunConfig, out_dir: &Path, plots: bool) -> Result<Outcome, CliError> {
    let trajectory = run_trajectory(config)?;
    let mut out = Outcome::default();
    describe(&mut out.report, config);
    audit(&mut out.report, &trajectory);

    let csv_path = place(out_dir, config.output.csv.as_ref(), format!("{}.csv", config.name));
    write_file(&csv_path, &csv::write_trajectory(&trajectory), &mut out.files)?;
    if plots || config.output.plots.is_some() {
        let dir = place(out_dir, config.output.plots.as_ref(), format!("{}_plots", config.name));
        for (var, doc) in svg::plot_trajectory(&trajectory, &config.name) {
            write_file(&dir.join(format!("{}_{var}.svg", config.name)), &doc, &mut out.files)?;
        }
    }
    let report_path = place(out_dir, config.output.report.as_ref(), format!("{}.report", config.name));
    out.report.text("output.csv", csv_path.display().to_string());
    write_file(&report_path, &out.report.render(), &mut out.files)?;
    Ok(out)
}

/// Runs a reference scenario with the reference parameters.
pub fn cmd_paper(id: ScenarioId, t_end: Option<f64>, out_dir: &Path, plots: bool) -> Result<Outcome, CliError> {
    let mut config = RunConfig::paper(id);
    if let Some(t) = t_end {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(CliError::new(ErrorCategory::Validation, format!("t_end must be >= 0 (got {t})")));
        }
        config.t_end = t;
    }
    cmd_run(&config, out_dir, plots)
}

/// Re-reads a trajectory CSV and checks it with the residual and inclusion
/// checkers only. `law_config` supplies `m`, `k` and the law; without it the
/// reference values are assumed.
pub fn cmd_verify(
    csv_path: &Path,
    law_config: Option<&RunConfig>,
    tol: Option<f64>,
    inclusion_tol: Option<f64>,
) -> Result<Outcome, CliError> {
    let text = fs::read_to_string(csv_path).map_err(|e| CliError::io(csv_path, e))?;
    let rows = csv::read_rows(&text)?;
    let (params, law) = match law_config {
        Some(c) => (c.params, c.law.clone()),
        None => {
            let c = RunConfig::paper(ScenarioId::SmallDisplacement);
            (c.params, c.law)
        }
    };
    let trajectory = csv::rows_to_trajectory(&rows, params, law)?;
    let tol = tol.unwrap_or(DEFAULT_VERIFY_TOL);
    let inclusion_tol = inclusion_tol.unwrap_or_else(|| default_tolerance(&trajectory));
    for (name, t) in [("tol", tol), ("inclusion tol", inclusion_tol)] {
        if !(t > 0.0) || !t.is_finite() {
            return Err(CliError::new(ErrorCategory::Usage, format!("{name} must be > 0 (got {t})")));
        }
    }

    let mut out = Outcome::default();
    out.report
        .text("file", csv_path.display().to_string())
        .count("steps", trajectory.modes.len())
        .number("tol", tol);
    let residuals = residual_check(&trajectory, &trajectory.forcing);
    out.report.residuals(&residuals);
    // Only Bingham laws have an inclusion to check.
    let inclusion = check_inclusion(&trajectory, &trajectory.forcing, inclusion_tol).ok();
    match &inclusion {
        Some(r) => {
            out.report.inclusion("", r);
        }
        None => {
            out.report.text("inclusion", "unsupported");
        }
    }

    if !residuals.within(tol) {
        let step = residuals.worst_step_index.map_or_else(|| "?".to_string(), |i| (i + 1).to_string());
        return Err(CliError::new(
            ErrorCategory::Verification,
            format!("step {step}: residual {} exceeds {}", format_f64(residuals.max()), format_f64(tol)),
        ));
    }
    if let Some((i, d)) = inclusion.as_ref().and_then(|r| r.violations.first().copied()) {
        return Err(CliError::new(
            ErrorCategory::Verification,
            format!("step {}: inclusion distance {} exceeds {}", i + 1, format_f64(d), format_f64(inclusion_tol)),
        ));
    }
    out.report.text("verdict", "pass");
    Ok(out)
}

pub fn convergence_table(rows: &[ConvergenceRow]) -> String {
    let mut out = String::from("dt,error,order\n");
    for r in rows {
        let order = r.observed_order.map_or_else(|| "-".to_string(), format_f64);
        out.push_str(&format!("{},{},{}\n", format_f64(r.dt), format_f64(r.error), order));
    }
    out
}

/// Self-convergence table for `dt_list` against a finer reference run.
pub fn cmd_converge(
    config: &RunConfig,
    dt_list: &[f64],
    dt_ref: Option<f64>,
    out_dir: &Path,
) -> Result<(Outcome, Vec<ConvergenceRow>), CliError> {
    let init = config.initial_state()?;
    let rows = convergence_study(&config.params, &config.law, &config.forcing, init, config.t_end, dt_list, dt_ref)?;
    let mut out = Outcome::default();
    describe(&mut out.report, config);
    for (i, r) in rows.iter().enumerate() {
        out.report.number(format!("row{i}.dt"), r.dt).number(format!("row{i}.error"), r.error);
        if let Some(p) = r.observed_order {
            out.report.number(format!("row{i}.order"), p);
        }
    }
    write_file(&out_dir.join(format!("{}_convergence.csv", config.name)), &convergence_table(&rows), &mut out.files)?;
    Ok((out, rows))
}

/// Fraction of nodes at which the velocity is nonzero.
pub fn moving_fraction(trajectory: &Trajectory) -> f64 {
    let n = trajectory.states.len().max(1);
    trajectory.states.iter().filter(|s| s.v != 0.0).count() as f64 / n as f64
}

/// Runs the DAE stepper and the smoothed-signum integrator side by side.
pub fn cmd_compare_naive(config: &RunConfig, out_dir: &Path) -> Result<Outcome, CliError> {
    let Some(bingham) = config.law.as_bingham() else {
        return Err(CliError::new(ErrorCategory::Validation, "compare-naive needs law = bingham"));
    };
    let dae = run_trajectory(config)?;
    let init = *dae.initial();
    let options = NaiveOptions { pure_coulomb: config.pure_coulomb, ..Default::default() };
    let naive =
        naive_signum_simulate(&config.params, bingham, &config.forcing, init.x, init.v, config.dt, config.t_end, options)?;

    let mut out = Outcome::default();
    describe(&mut out.report, config);
    out.report.text("naive.pure_coulomb", config.pure_coulomb.to_string());
    for (prefix, traj) in [("dae.", &dae), ("naive.", &naive)] {
        let s = summarize(traj);
        out.report
            .number(format!("{prefix}stick_fraction"), s.stick_fraction)
            .number(format!("{prefix}moving_fraction"), moving_fraction(traj))
            .number(format!("{prefix}final.x"), s.final_state.x)
            .number(format!("{prefix}final.v"), s.final_state.v)
            .number(format!("{prefix}max_abs_x"), s.max_abs_x);
        certify(&mut out.report, prefix, traj);
    }
    let (mut dx, mut dv) = (0.0f64, 0.0f64);
    for (a, b) in dae.states.iter().zip(&naive.states) {
        dx = dx.max((a.x - b.x).abs());
        dv = dv.max((a.v - b.v).abs());
    }
    let disagree = dae.states.iter().zip(&naive.states).filter(|(a, b)| (a.v == 0.0) != (b.v == 0.0)).count();
    out.report
        .number("divergence.max_abs_dx", dx)
        .number("divergence.max_abs_dv", dv)
        .number("divergence.stick_disagreement", disagree as f64 / dae.states.len().max(1) as f64)
        .text("divergence.detected", (disagree > 0 || dx > 0.0).to_string());

    write_file(&out_dir.join(format!("{}_dae.csv", config.name)), &csv::write_trajectory(&dae), &mut out.files)?;
    write_file(&out_dir.join(format!("{}_naive.csv", config.name)), &csv::write_trajectory(&naive), &mut out.files)?;
    write_file(&out_dir.join(format!("{}_compare.report", config.name)), &out.report.render(), &mut out.files)?;
    Ok(out)
}

/// One sweep axis, as given by `key=v1,v2,...`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridAxis {
    pub key: String,
    pub values: Vec<String>,
}

impl std::str::FromStr for GridAxis {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        let bad = || CliError::new(ErrorCategory::Usage, format!("grid axis `{s}`: expected key=v1,v2,..."));
        let (key, values) = s.split_once('=').ok_or_else(bad)?;
        let values: Vec<String> = values.split(',').map(|v| v.trim().to_string()).collect();
        if key.trim().is_empty() || values.iter().any(String::is_empty) {
            return Err(bad());
        }
        Ok(Self { key: key.trim().to_string(), values })
    }
}

/// Cartesian product of the axes, first axis varying slowest.
pub fn grid_points(axes: &[GridAxis]) -> Vec<Vec<(String, String)>> {
    let mut points = vec![Vec::new()];
    for axis in axes {
        points = points
            .into_iter()
            .flat_map(|p| {
                axis.values.iter().map(move |v| {
                    let mut q = p.clone();
                    q.push((axis.key.clone(), v.clone()));
                    q
                })
            })
            .collect();
    }
    points
}

/// Runs every grid point (in parallel), one CSV each, plus `sweep_index.csv`.
pub fn cmd_sweep(template: &ConfigMap, axes: &[GridAxis], out_dir: &Path) -> Result<Outcome, CliError> {
    if axes.is_empty() {
        return Err(CliError::new(ErrorCategory::Usage, "sweep needs at least one --grid axis"));
    }
    let points = grid_points(axes);
    let configs = points
        .iter()
        .map(|point| {
            let mut map = template.clone();
            for (k, v) in point {
                map.set(k, v.clone())?;
            }
            Ok(RunConfig::from_map(&map)?)
        })
        .collect::<Result<Vec<_>, CliError>>()?;

    let results: Vec<Result<(PathBuf, String), CliError>> = configs
        .par_iter()
        .enumerate()
        .map(|(i, config)| {
            let trajectory = run_trajectory(config)?;
            let path = out_dir.join(format!("sweep_{i:04}.csv"));
            let mut files = Vec::new();
            write_file(&path, &csv::write_trajectory(&trajectory), &mut files)?;
            let s = summarize(&trajectory);
            let line = format!(
                "{},{},{},{}",
                format_f64(s.final_state.x),
                format_f64(s.max_abs_x),
                s.rest_time.map_or_else(|| "none".to_string(), format_f64),
                format_f64(s.stick_fraction)
            );
            Ok((path, line))
        })
        .collect();

    let mut out = Outcome::default();
    let mut index = String::from("index,");
    for axis in axes {
        index.push_str(&axis.key);
        index.push(',');
    }
    index.push_str("file,final_x,max_abs_x,rest_time,stick_fraction\n");
    for (i, (point, result)) in points.iter().zip(results).enumerate() {
        let (path, line) = result?;
        index.push_str(&i.to_string());
        index.push(',');
        for (_, v) in point {
            index.push_str(v);
            index.push(',');
        }
        let file = path.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default();
        index.push_str(&format!("{file},{line}\n"));
        out.files.push(path);
    }
    write_file(&out_dir.join("sweep_index.csv"), &index, &mut out.files)?;
    out.report.count("points", points.len());
    Ok(out)
}

/// Label for a law in reports.
trait LawName {
    fn name(&self) -> String;
}

impl LawName for DashpotLaw {
    fn name(&self) -> String {
        match self {
            DashpotLaw::Bingham(b) => format!("bingham(gamma={}, threshold={})", b.gamma, b.threshold),
            DashpotLaw::LinearViscous { c } => format!("linear(c={c})"),
            DashpotLaw::GenericMonotone(g) => format!("generic({})", g.name()),
        }
    }
}
