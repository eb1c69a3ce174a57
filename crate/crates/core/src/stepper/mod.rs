//! Backward-Euler predictor-corrector integration of the DAE
//!
//! ```text
//! m v̇ = F(t) − F_s − F_d,   Ḟ_s = k v,   0 = v − g(F_d),   x = F_s / k.
//! ```
//!
//! Each step evaluates a predictor force from already known quantities,
//! corrects `(v, F_d)` against the dashpot law (closed form for Bingham,
//! bracketed Newton otherwise), then updates the spring.

mod convergence;
mod corrector;
mod residual;
pub mod root;

pub use convergence::{convergence_study, ConvergenceRow};
pub use corrector::{corrector_bingham, corrector_generic, predictor, Correction, StepCoefficients, StepMode};
pub use residual::{residual_check, ResidualReport};

use thiserror::Error;

use crate::constitutive::{law_wellformed, DashpotLaw, SystemParams, ValidationReport};
use crate::forcing::Forcing;
use crate::system::State;
use root::RootError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StepError {
    #[error("time step must be finite and > 0 (got {0})")]
    InvalidTimeStep(f64),
    #[error("end time {t_end} precedes start time {t_start}")]
    InvalidHorizon { t_start: f64, t_end: f64 },
    #[error("{steps} steps exceed the step budget of {budget}")]
    BudgetExceeded { steps: u64, budget: u64 },
    #[error("ill-formed dashpot law: {0}")]
    IllFormedLaw(ValidationReport),
    #[error("invalid convergence plan: {0}")]
    InvalidConvergencePlan(String),
    #[error("corrector failed at t = {t}: {source}")]
    Corrector { t: f64, source: RootError },
}

/// Advances `state_n` by one step of size `dt` with end-of-step load `force_next`.
pub fn step(
    params: &SystemParams,
    law: &DashpotLaw,
    state_n: &State,
    force_next: f64,
    dt: f64,
) -> Result<(State, StepMode), StepError> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(StepError::InvalidTimeStep(dt));
    }
    advance(params, law, state_n, force_next, dt, state_n.t + dt)
}

fn advance(
    params: &SystemParams,
    law: &DashpotLaw,
    state_n: &State,
    force_next: f64,
    dt: f64,
    t_next: f64,
) -> Result<(State, StepMode), StepError> {
    let f_tilde = predictor(params, state_n.v, state_n.fs, force_next, dt);
    let correction = match law {
        DashpotLaw::Bingham(b) => corrector_bingham(params, b, f_tilde, dt),
        _ => corrector_generic(params, law, f_tilde, dt)
            .map_err(|source| StepError::Corrector { t: t_next, source })?,
    };
    let fs = state_n.fs + dt * params.stiffness() * correction.v;
    let next = State {
        t: t_next,
        x: params.spring_displacement(fs),
        v: correction.v,
        fs,
        fd: correction.fd,
    };
    Ok((next, correction.mode))
}

/// Default cap on the number of steps a single simulation may take.
pub const DEFAULT_STEP_BUDGET: u64 = 100_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationOptions {
    pub step_budget: u64,
}

impl Default for SimulationOptions {
    fn default() -> Self {
        Self { step_budget: DEFAULT_STEP_BUDGET }
    }
}

/// Uniformly sampled solution together with the data that produced it.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub params: SystemParams,
    pub law: DashpotLaw,
    pub forcing: Forcing,
    pub dt: f64,
    /// `states[n].t = states[0].t + n dt`.
    pub states: Vec<State>,
    /// `modes[n]` is the branch that produced `states[n + 1]`.
    pub modes: Vec<StepMode>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn initial(&self) -> &State {
        &self.states[0]
    }

    pub fn last(&self) -> &State {
        self.states.last().expect("trajectory has at least the initial state")
    }

    /// External force at node `n`.
    pub fn force_at(&self, n: usize) -> f64 {
        self.forcing.eval(self.states[n].t)
    }
}

/// Number of uniform steps covering `[t_start, t_end]`.
pub fn step_count(t_start: f64, t_end: f64, dt: f64) -> Result<u64, StepError> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(StepError::InvalidTimeStep(dt));
    }
    if !(t_end >= t_start) {
        return Err(StepError::InvalidHorizon { t_start, t_end });
    }
    let steps = ((t_end - t_start) / dt).round();
    if !steps.is_finite() || steps > u64::MAX as f64 {
        return Err(StepError::BudgetExceeded { steps: u64::MAX, budget: 0 });
    }
    Ok(steps as u64)
}

/// Integrates from `init` to `t_end` with the default step budget.
pub fn simulate(
    params: &SystemParams,
    law: &DashpotLaw,
    forcing: &Forcing,
    init: State,
    dt: f64,
    t_end: f64,
) -> Result<Trajectory, StepError> {
    simulate_with(params, law, forcing, init, dt, t_end, SimulationOptions::default())
}

/// Integrates from `init` to `t_end`, sampling the load at each step's end time.
pub fn simulate_with(
    params: &SystemParams,
    law: &DashpotLaw,
    forcing: &Forcing,
    init: State,
    dt: f64,
    t_end: f64,
    options: SimulationOptions,
) -> Result<Trajectory, StepError> {
    let steps = step_count(init.t, t_end, dt)?;
    if steps > options.step_budget {
        return Err(StepError::BudgetExceeded { steps, budget: options.step_budget });
    }
    let report = law_wellformed(law);
    if !report.is_valid() {
        return Err(StepError::IllFormedLaw(report));
    }

    let n = steps as usize;
    let mut states = Vec::with_capacity(n + 1);
    let mut modes = Vec::with_capacity(n);
    states.push(init);
    let mut current = init;
    for i in 1..=n {
        // Times are recomputed from the origin so they never drift.
        let t_next = init.t + i as f64 * dt;
        let (next, mode) = advance(params, law, &current, forcing.eval(t_next), dt, t_next)?;
        states.push(next);
        modes.push(mode);
        current = next;
    }
    Ok(Trajectory {
        params: *params,
        law: law.clone(),
        forcing: forcing.clone(),
        dt,
        states,
        modes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::consistent_init;

    fn paper() -> (SystemParams, DashpotLaw) {
        (SystemParams::new(1.0, 100.0).unwrap(), DashpotLaw::bingham(1.0, 1.0).unwrap())
    }

    #[test]
    fn one_stick_step_holds_stretched_spring() {
        let (p, law) = paper();
        let s0 = consistent_init(&p, &law, 0.005, Some(0.0), None).unwrap();
        let (s1, mode) = step(&p, &law, &s0, 0.0, 1e-4).unwrap();
        assert_eq!(mode, StepMode::Stick);
        assert_eq!((s1.x, s1.v, s1.fs, s1.fd), (0.005, 0.0, 0.5, -0.5));
        assert_eq!(s1.t, 1e-4);
    }

    #[test]
    fn zero_state_is_fixed_point() {
        let (p, law) = paper();
        let (s1, mode) = step(&p, &law, &State::zero(), 0.0, 1e-4).unwrap();
        assert_eq!(mode, StepMode::Stick);
        assert_eq!(s1, State { t: 1e-4, ..State::zero() });
    }

    #[test]
    fn one_slip_step_clean_numbers() {
        let p = SystemParams::new(1.0, 1.0).unwrap();
        let law = DashpotLaw::bingham(1.0, 1.0).unwrap();
        let (s1, mode) = step(&p, &law, &State::zero(), 4.0, 1.0).unwrap();
        assert_eq!(mode, StepMode::Slip);
        assert_eq!((s1.v, s1.fd, s1.fs, s1.x), (1.0, 2.0, 1.0, 1.0));
    }

    #[test]
    fn step_rejects_bad_dt() {
        let (p, law) = paper();
        assert_eq!(
            step(&p, &law, &State::zero(), 0.0, 0.0),
            Err(StepError::InvalidTimeStep(0.0))
        );
        assert!(step(&p, &law, &State::zero(), 0.0, f64::NAN).is_err());
    }

    #[test]
    fn simulate_zero_is_zero() {
        let (p, law) = paper();
        let traj = simulate(&p, &law, &Forcing::Zero, State::zero(), 1e-3, 1.0).unwrap();
        assert_eq!(traj.len(), 1001);
        assert_eq!(traj.modes.len(), 1000);
        assert!(traj.states.iter().all(|s| s.x == 0.0 && s.v == 0.0 && s.fs == 0.0 && s.fd == 0.0));
        assert!((traj.last().t - 1.0).abs() < 1e-12);
    }

    #[test]
    fn simulate_respects_budget() {
        let (p, law) = paper();
        let opts = SimulationOptions { step_budget: 10 };
        let e = simulate_with(&p, &law, &Forcing::Zero, State::zero(), 0.01, 1.0, opts);
        assert_eq!(e.unwrap_err(), StepError::BudgetExceeded { steps: 100, budget: 10 });
        let e = simulate(&p, &law, &Forcing::Zero, State::zero(), 0.01, -1.0);
        assert!(matches!(e, Err(StepError::InvalidHorizon { .. })));
    }

    #[test]
    fn simulate_rejects_ill_formed_law() {
        let (p, _) = paper();
        let bad = DashpotLaw::LinearViscous { c: -1.0 };
        let e = simulate(&p, &bad, &Forcing::Zero, State::zero(), 0.01, 1.0);
        assert!(matches!(e, Err(StepError::IllFormedLaw(_))));
    }

    #[test]
    fn generic_law_goes_through_root_finder() {
        let (p, _) = paper();
        let law = DashpotLaw::linear_viscous(2.0).unwrap();
        let init = consistent_init(&p, &law, 0.1, None, None).unwrap();
        let traj = simulate(&p, &law, &Forcing::Zero, init, 1e-3, 0.5).unwrap();
        for s in &traj.states {
            assert!(s.is_consistent(&p, &law));
        }
        assert!(traj.last().x.abs() < 0.1);
    }
}
