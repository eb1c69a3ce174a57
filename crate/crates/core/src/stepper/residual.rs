//! A-posteriori check of the discrete equations.
//!
//! Recomputes the three backward-Euler equations from the stored nodes alone;
//! nothing here touches the predictor or correctors.

use crate::forcing::Forcing;

use super::Trajectory;

/// Largest absolute residual of each discrete equation over a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ResidualReport {
    /// `(v₊ − v)/Δt − (F₊ − F_s₊ − F_d₊)/m`, acceleration units.
    pub max_momentum_residual: f64,
    /// `(F_s₊ − F_s)/Δt − k v₊`, force per time.
    pub max_spring_residual: f64,
    /// `v₊ − g(F_d₊)`, velocity units.
    pub max_constitutive_residual: f64,
    /// Step (0-based, from node `i` to node `i + 1`) holding the largest
    /// single residual, if any step was checked.
    pub worst_step_index: Option<usize>,
    pub steps_checked: usize,
}

impl ResidualReport {
    pub fn max(&self) -> f64 {
        self.max_momentum_residual
            .max(self.max_spring_residual)
            .max(self.max_constitutive_residual)
    }

    pub fn within(&self, tol: f64) -> bool {
        self.max() <= tol
    }
}

/// Residuals of one step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepResidual {
    pub momentum: f64,
    pub spring: f64,
    pub constitutive: f64,
}

impl StepResidual {
    pub fn max(&self) -> f64 {
        self.momentum.max(self.spring).max(self.constitutive)
    }
}

/// Residuals of every step, in order.
pub fn step_residuals(trajectory: &Trajectory, forcing: &Forcing) -> Vec<StepResidual> {
    let m = trajectory.params.mass();
    let k = trajectory.params.stiffness();
    let dt = trajectory.dt;
    trajectory
        .states
        .windows(2)
        .map(|w| {
            let (prev, next) = (&w[0], &w[1]);
            let load = forcing.eval(next.t);
            StepResidual {
                momentum: ((next.v - prev.v) / dt - (load - next.fs - next.fd) / m).abs(),
                spring: ((next.fs - prev.fs) / dt - k * next.v).abs(),
                constitutive: trajectory.law.residual(next.v, next.fd).abs(),
            }
        })
        .collect()
}

pub fn residual_check(trajectory: &Trajectory, forcing: &Forcing) -> ResidualReport {
    let mut report = ResidualReport::default();
    let mut worst = -1.0;
    for (i, r) in step_residuals(trajectory, forcing).into_iter().enumerate() {
        report.max_momentum_residual = report.max_momentum_residual.max(r.momentum);
        report.max_spring_residual = report.max_spring_residual.max(r.spring);
        report.max_constitutive_residual = report.max_constitutive_residual.max(r.constitutive);
        // NaN residuals compare false; treat them as worst.
        let m = if r.max().is_nan() { f64::INFINITY } else { r.max() };
        if m > worst {
            worst = m;
            report.worst_step_index = Some(i);
        }
        report.steps_checked += 1;
    }
    report
}
