//! Set-valued right-hand side of the Bingham oscillator and trajectory
//! certification against it.
//!
//! Writing the dynamics as `ż ∈ F(z, t)` with `z = (v, x)`:
//!
//! ```text
//! v > 0:  { ( [F − F_s − v/γ − τ]/m , v ) }
//! v < 0:  { ( [F − F_s − v/γ + τ]/m , v ) }
//! v = 0:  { ( [F − F_s − F_d]/m , 0 ) : |F_d| ≤ τ }
//! ```
//!
//! The spring force rate is `k` times the second component.
//!
//! Membership is tested at the nodes of a computed trajectory using the same
//! backward differences the integrator uses. That is a discrete stand-in for
//! "almost everywhere in time", not a proof about the continuous solution.

use thiserror::Error;

use crate::constitutive::{Bingham, DashpotLaw, SystemParams};
use crate::forcing::Forcing;
use crate::stepper::Trajectory;
use crate::system::State;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FilippovError {
    #[error("differential inclusion is only available for the Bingham law")]
    UnsupportedLaw,
}

/// Value of the set-valued field at one state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FilippovSet {
    Singleton { dv_dt: f64, dx_dt: f64, dfs_dt: f64 },
    /// `dx_dt` (and the spring rate) are exactly zero here.
    AccelInterval { dv_lo: f64, dv_hi: f64 },
}

/// Outcome of a membership test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Membership {
    pub inside: bool,
    /// Max-norm distance from the point to the set.
    pub distance: f64,
}

impl FilippovSet {
    pub fn dx_dt(&self) -> f64 {
        match self {
            Self::Singleton { dx_dt, .. } => *dx_dt,
            Self::AccelInterval { .. } => 0.0,
        }
    }

    pub fn dfs_dt(&self) -> f64 {
        match self {
            Self::Singleton { dfs_dt, .. } => *dfs_dt,
            Self::AccelInterval { .. } => 0.0,
        }
    }

    /// Max-norm distance of `(dv_dt, dx_dt)` from the set.
    pub fn distance(&self, dv_dt: f64, dx_dt: f64) -> f64 {
        let (accel_gap, rate_gap) = match *self {
            Self::Singleton { dv_dt: a, dx_dt: r, .. } => ((dv_dt - a).abs(), (dx_dt - r).abs()),
            Self::AccelInterval { dv_lo, dv_hi } => {
                let below = (dv_lo - dv_dt).max(0.0);
                let above = (dv_dt - dv_hi).max(0.0);
                (below.max(above), dx_dt.abs())
            }
        };
        accel_gap.max(rate_gap)
    }

    pub fn contains(&self, dv_dt: f64, dx_dt: f64, tol: f64) -> Membership {
        let distance = self.distance(dv_dt, dx_dt);
        Membership { inside: distance <= tol, distance }
    }
}

/// Field value at `state` under load `external_force`.
pub fn filippov_set(params: &SystemParams, law: &Bingham, state: &State, external_force: f64) -> FilippovSet {
    let m = params.mass();
    let free = external_force - state.fs;
    if state.v == 0.0 {
        FilippovSet::AccelInterval {
            dv_lo: (free - law.threshold) / m,
            dv_hi: (free + law.threshold) / m,
        }
    } else {
        let friction = if state.v > 0.0 { law.threshold } else { -law.threshold };
        FilippovSet::Singleton {
            dv_dt: (free - state.v / law.gamma - friction) / m,
            dx_dt: state.v,
            dfs_dt: params.stiffness() * state.v,
        }
    }
}

/// [`filippov_set`] for any law; only Bingham is supported.
pub fn filippov_set_for(
    params: &SystemParams,
    law: &DashpotLaw,
    state: &State,
    external_force: f64,
) -> Result<FilippovSet, FilippovError> {
    let b = law.as_bingham().ok_or(FilippovError::UnsupportedLaw)?;
    Ok(filippov_set(params, b, state, external_force))
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct InclusionReport {
    pub steps_checked: usize,
    /// `(step index, distance)` of every step outside tolerance.
    pub violations: Vec<(usize, f64)>,
    pub max_distance: f64,
    pub tolerance: f64,
}

impl InclusionReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// `1e-8 · max(1, k max|x| / m)`.
pub fn default_tolerance(trajectory: &Trajectory) -> f64 {
    let max_x = trajectory.states.iter().map(|s| s.x.abs()).fold(0.0, f64::max);
    let scale = trajectory.params.stiffness() * max_x / trajectory.params.mass();
    1e-8 * scale.max(1.0)
}

/// Tests every backward difference of `trajectory` against the field at the
/// step's end node.
///
/// Besides `(v̇, ẋ)`, the spring force rate `(F_s₊ − F_s)/Δt` is compared
/// with `k ẋ` of the set, converted back to velocity units.
pub fn check_inclusion(
    trajectory: &Trajectory,
    forcing: &Forcing,
    tol: f64,
) -> Result<InclusionReport, FilippovError> {
    let law = trajectory.law.as_bingham().ok_or(FilippovError::UnsupportedLaw)?;
    let params = &trajectory.params;
    let k = params.stiffness();
    let dt = trajectory.dt;
    let mut report = InclusionReport { tolerance: tol, ..InclusionReport::default() };
    for (i, w) in trajectory.states.windows(2).enumerate() {
        let (prev, next) = (&w[0], &w[1]);
        let set = filippov_set(params, law, next, forcing.eval(next.t));
        let dv_dt = (next.v - prev.v) / dt;
        let dx_dt = (next.x - prev.x) / dt;
        let dfs_dt = (next.fs - prev.fs) / dt;
        let spring_gap = (dfs_dt - set.dfs_dt()).abs() / k;
        let mut distance = set.distance(dv_dt, dx_dt).max(spring_gap);
        if distance.is_nan() {
            distance = f64::INFINITY;
        }
        if distance > tol {
            report.violations.push((i, distance));
        }
        report.max_distance = report.max_distance.max(distance);
        report.steps_checked += 1;
    }
    Ok(report)
}
