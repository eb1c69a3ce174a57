//! Trajectory CSV: header `t,x,v,Fs,Fd,F,mode`, floats with 17 significant
//! digits so every binary64 value survives a round trip.

use std::fmt::Write as _;

use bingham_dae::constitutive::{DashpotLaw, SystemParams};
use bingham_dae::forcing::Forcing;
use bingham_dae::stepper::{StepMode, Trajectory};
use bingham_dae::system::State;
use thiserror::Error;

pub const HEADER: &str = "t,x,v,Fs,Fd,F,mode";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CsvError {
    #[error("line 1: expected header `{HEADER}`")]
    BadHeader,
    #[error("line {line}: expected 7 fields, found {found}")]
    FieldCount { line: usize, found: usize },
    #[error("line {line}: column {column}: cannot parse `{value}`")]
    BadNumber { line: usize, column: &'static str, value: String },
    #[error("line {line}: unknown mode `{value}`")]
    BadMode { line: usize, value: String },
    #[error("trajectory file has no rows")]
    Empty,
    #[error("times are not uniformly spaced (row {row})")]
    NonUniform { row: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowMode {
    Init,
    Step(StepMode),
}

impl RowMode {
    fn as_str(&self) -> &'static str {
        match self {
            Self::Init => "init",
            Self::Step(m) => m.as_str(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Row {
    pub state: State,
    /// External force at the row's time.
    pub force: f64,
    pub mode: RowMode,
}

/// 17 significant digits in scientific notation.
pub fn format_f64(value: f64) -> String {
    format!("{value:.16e}")
}

pub fn write_rows(rows: &[Row]) -> String {
    let mut out = String::with_capacity(rows.len() * 150 + HEADER.len() + 1);
    out.push_str(HEADER);
    out.push('\n');
    for r in rows {
        let s = &r.state;
        // Writing to a String cannot fail.
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            format_f64(s.t),
            format_f64(s.x),
            format_f64(s.v),
            format_f64(s.fs),
            format_f64(s.fd),
            format_f64(r.force),
            r.mode.as_str()
        );
    }
    out
}

pub fn trajectory_rows(trajectory: &Trajectory) -> Vec<Row> {
    trajectory
        .states
        .iter()
        .enumerate()
        .map(|(n, s)| Row {
            state: *s,
            force: trajectory.forcing.eval(s.t),
            mode: if n == 0 { RowMode::Init } else { RowMode::Step(trajectory.modes[n - 1]) },
        })
        .collect()
}

pub fn write_trajectory(trajectory: &Trajectory) -> String {
    write_rows(&trajectory_rows(trajectory))
}

pub fn read_rows(text: &str) -> Result<Vec<Row>, CsvError> {
    let mut lines = text.lines();
    if lines.next().map(str::trim) != Some(HEADER) {
        return Err(CsvError::BadHeader);
    }
    let mut rows = Vec::new();
    for (idx, line) in lines.enumerate() {
        let line_no = idx + 2;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 7 {
            return Err(CsvError::FieldCount { line: line_no, found: fields.len() });
        }
        const COLUMNS: [&str; 6] = ["t", "x", "v", "Fs", "Fd", "F"];
        let mut values = [0.0; 6];
        for (i, column) in COLUMNS.iter().enumerate() {
            values[i] = fields[i].parse().map_err(|_| CsvError::BadNumber {
                line: line_no,
                column,
                value: fields[i].to_string(),
            })?;
        }
        let mode = match fields[6] {
            "init" => RowMode::Init,
            "stick" => RowMode::Step(StepMode::Stick),
            "slip" => RowMode::Step(StepMode::Slip),
            other => return Err(CsvError::BadMode { line: line_no, value: other.to_string() }),
        };
        let [t, x, v, fs, fd, force] = values;
        rows.push(Row { state: State { t, x, v, fs, fd }, force, mode });
    }
    Ok(rows)
}

/// Rebuilds a trajectory from CSV rows. The load is the tabulated `F`
/// column, so the checkers see exactly the values that were written.
pub fn rows_to_trajectory(rows: &[Row], params: SystemParams, law: DashpotLaw) -> Result<Trajectory, CsvError> {
    let first = rows.first().ok_or(CsvError::Empty)?;
    let n = rows.len() - 1;
    let dt = if n == 0 { 1.0 } else { (rows[n].state.t - first.state.t) / n as f64 };
    for (i, r) in rows.iter().enumerate() {
        let expected = first.state.t + i as f64 * dt;
        if (r.state.t - expected).abs() > 1e-9 * dt.max(expected.abs()) {
            return Err(CsvError::NonUniform { row: i });
        }
    }
    let forcing = if n == 0 {
        Forcing::Constant { value: first.force }
    } else {
        Forcing::tabulated(rows.iter().map(|r| (r.state.t, r.force)).collect())
            .map_err(|_| CsvError::NonUniform { row: 0 })?
    };
    let modes = rows[1..]
        .iter()
        .map(|r| match r.mode {
            RowMode::Step(m) => m,
            RowMode::Init => StepMode::Stick,
        })
        .collect();
    Ok(Trajectory {
        params,
        law,
        forcing,
        dt,
        states: rows.iter().map(|r| r.state).collect(),
        modes,
    })
}
