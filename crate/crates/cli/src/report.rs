//! Flat `key = value` reports.

use std::fmt::Write as _;

use bingham_dae::filippov::InclusionReport;
use bingham_dae::scenarios::{EnergyAudit, TrajectorySummary};
use bingham_dae::stepper::ResidualReport;

use crate::csv::format_f64;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    entries: Vec<(String, String)>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn text(&mut self, key: impl Into<String>, value: impl Into<String>) -> &mut Self {
        self.entries.push((key.into(), value.into()));
        self
    }

    pub fn number(&mut self, key: impl Into<String>, value: f64) -> &mut Self {
        self.text(key, format_f64(value))
    }

    pub fn count(&mut self, key: impl Into<String>, value: usize) -> &mut Self {
        self.text(key, value.to_string())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn summary(&mut self, prefix: &str, s: &TrajectorySummary) -> &mut Self {
        let f = &s.final_state;
        self.number(format!("{prefix}final.t"), f.t)
            .number(format!("{prefix}final.x"), f.x)
            .number(format!("{prefix}final.v"), f.v)
            .number(format!("{prefix}final.Fs"), f.fs)
            .number(format!("{prefix}final.Fd"), f.fd)
            .count(format!("{prefix}extrema.count"), s.extrema.len());
        let mags = s.extrema.iter().map(|e| format_f64(e.1)).collect::<Vec<_>>().join(" ");
        self.text(format!("{prefix}extrema.x"), mags);
        match s.rest_time {
            Some(t) => self.number(format!("{prefix}rest_time"), t),
            None => self.text(format!("{prefix}rest_time"), "none"),
        };
        self.number(format!("{prefix}total_dissipation"), s.total_dissipation)
            .number(format!("{prefix}max_abs_x"), s.max_abs_x)
            .number(format!("{prefix}stick_fraction"), s.stick_fraction)
    }

    pub fn residuals(&mut self, r: &ResidualReport) -> &mut Self {
        self.number("residual.momentum", r.max_momentum_residual)
            .number("residual.spring", r.max_spring_residual)
            .number("residual.constitutive", r.max_constitutive_residual)
            .text(
                "residual.worst_step",
                r.worst_step_index.map_or_else(|| "none".to_string(), |i| i.to_string()),
            )
    }

    pub fn inclusion(&mut self, prefix: &str, r: &InclusionReport) -> &mut Self {
        self.count(format!("{prefix}inclusion.steps_checked"), r.steps_checked)
            .count(format!("{prefix}inclusion.violations"), r.violations.len())
            .number(format!("{prefix}inclusion.max_distance"), r.max_distance)
            .number(format!("{prefix}inclusion.tolerance"), r.tolerance)
    }

    pub fn energy(&mut self, e: &EnergyAudit) -> &mut Self {
        self.number("energy.work_in", e.work_in)
            .number("energy.spring_delta", e.spring_delta)
            .number("energy.kinetic_delta", e.kinetic_delta)
            .number("energy.dissipated", e.dissipated)
            .number("energy.closure_error", e.closure_error)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }
}

/// Parses a rendered report back into pairs.
pub fn parse_report(text: &str) -> Vec<(String, String)> {
    text.lines()
        .filter_map(|l| l.split_once(" = "))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}
