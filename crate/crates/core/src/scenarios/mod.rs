//! The four reference experiments, a naive signum-ODE comparator, and
//! trajectory summaries.

mod naive;
mod summary;

pub use naive::{naive_signum_simulate, NaiveOptions};
pub use summary::{energy_audit, summarize, EnergyAudit, TrajectorySummary, REST_HOLD};

use std::fmt;
use std::str::FromStr;

use crate::constitutive::{Bingham, DashpotLaw, SystemParams};
use crate::forcing::Forcing;
use crate::stepper::{simulate, StepError, Trajectory};
use crate::system::{consistent_init, State};

pub const PAPER_MASS: f64 = 1.0;
pub const PAPER_STIFFNESS: f64 = 100.0;
pub const PAPER_GAMMA: f64 = 1.0;
pub const PAPER_THRESHOLD: f64 = 1.0;
pub const PAPER_DT: f64 = 1e-4;

pub fn paper_params() -> SystemParams {
    SystemParams::new(PAPER_MASS, PAPER_STIFFNESS).expect("positive constants")
}

pub fn paper_bingham() -> Bingham {
    Bingham { gamma: PAPER_GAMMA, threshold: PAPER_THRESHOLD }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScenarioId {
    /// Sub-threshold sinusoid from rest.
    F1Forced,
    /// Super-threshold sinusoid from rest.
    F2Forced,
    /// Free release from `x0 = 0.005`, inside the stick band.
    SmallDisplacement,
    /// Free release from `x0 = 0.5`.
    LargeDisplacement,
}

impl ScenarioId {
    pub const ALL: [ScenarioId; 4] = [
        Self::F1Forced,
        Self::F2Forced,
        Self::SmallDisplacement,
        Self::LargeDisplacement,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Self::F1Forced => "f1",
            Self::F2Forced => "f2",
            Self::SmallDisplacement => "small",
            Self::LargeDisplacement => "large",
        }
    }

    pub fn forcing(&self) -> Forcing {
        match self {
            Self::F1Forced => Forcing::f1(),
            Self::F2Forced => Forcing::f2(),
            Self::SmallDisplacement | Self::LargeDisplacement => Forcing::Zero,
        }
    }

    pub fn initial_displacement(&self) -> f64 {
        match self {
            Self::F1Forced | Self::F2Forced => 0.0,
            Self::SmallDisplacement => 0.005,
            Self::LargeDisplacement => 0.5,
        }
    }

    /// Two time units cover the forcing window and an equal free-decay tail.
    /// The large release needs longer to settle (about 3.15).
    pub fn default_t_end(&self) -> f64 {
        match self {
            Self::LargeDisplacement => 5.0,
            _ => 2.0,
        }
    }

    /// Consistent initial state: `x0` as listed, `F_d(0) = 0`.
    pub fn initial_state(&self) -> State {
        let law = DashpotLaw::Bingham(paper_bingham());
        consistent_init(&paper_params(), &law, self.initial_displacement(), Some(0.0), None)
            .expect("reference initial data is consistent")
    }
}

impl fmt::Display for ScenarioId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScenarioId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "f1" | "f1forced" | "f1_forced" => Ok(Self::F1Forced),
            "f2" | "f2forced" | "f2_forced" => Ok(Self::F2Forced),
            "small" | "smalldisplacement" | "small_displacement" => Ok(Self::SmallDisplacement),
            "large" | "largedisplacement" | "large_displacement" => Ok(Self::LargeDisplacement),
            other => Err(format!("unknown scenario `{other}` (expected f1, f2, small, large)")),
        }
    }
}

/// Simulates one reference experiment with the reference parameters.
pub fn run_paper_case(id: ScenarioId, t_end: f64) -> Result<(Trajectory, TrajectorySummary), StepError> {
    let params = paper_params();
    let law = DashpotLaw::Bingham(paper_bingham());
    let traj = simulate(&params, &law, &id.forcing(), id.initial_state(), PAPER_DT, t_end)?;
    let summary = summarize(&traj);
    Ok((traj, summary))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scenario_names_round_trip() {
        for id in ScenarioId::ALL {
            assert_eq!(id.name().parse::<ScenarioId>(), Ok(id));
        }
        assert!("f3".parse::<ScenarioId>().is_err());
    }

    #[test]
    fn initial_states() {
        let s = ScenarioId::SmallDisplacement.initial_state();
        assert_eq!((s.x, s.v, s.fs, s.fd), (0.005, 0.0, 0.5, 0.0));
        let s = ScenarioId::LargeDisplacement.initial_state();
        assert_eq!(s.fs, 50.0);
        assert_eq!(ScenarioId::F1Forced.initial_state(), State::zero());
    }

    #[test]
    fn small_displacement_holds() {
        let (traj, summary) = run_paper_case(ScenarioId::SmallDisplacement, 0.5).unwrap();
        assert!(traj.states.iter().all(|s| s.x == 0.005 && s.v == 0.0));
        assert_eq!(summary.rest_time, Some(0.0));
        assert_eq!(summary.stick_fraction, 1.0);
        assert!(summary.extrema.is_empty());
    }
}
