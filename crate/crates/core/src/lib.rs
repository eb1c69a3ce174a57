//! Lumped mass-spring-dashpot systems whose dashpot gives velocity as a
//! function of force (Bingham-type), integrated as a semi-explicit
//! differential-algebraic system.
//!
//! * [`constitutive`]: spring and dashpot laws.
//! * [`system`]: state, consistent initialization, equilibrium set.
//! * [`stepper`]: backward-Euler predictor-corrector, residual checks,
//!   convergence studies.
//! * [`filippov`]: set-valued right-hand side and trajectory certification.
//! * [`forcing`]: external load signals.
//! * [`scenarios`]: reference experiments, naive signum comparator,
//!   summaries.
//!
//! ```
//! use bingham_dae::prelude::*;
//!
//! let params = SystemParams::new(1.0, 100.0).unwrap();
//! let law = DashpotLaw::bingham(1.0, 1.0).unwrap();
//! let init = consistent_init(&params, &law, 0.005, Some(0.0), None).unwrap();
//! let traj = simulate(&params, &law, &Forcing::Zero, init, 1e-4, 0.5).unwrap();
//! // Released inside the stick band, the mass never moves.
//! assert!(traj.states.iter().all(|s| s.v == 0.0 && s.x == 0.005));
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constitutive;
pub mod filippov;
pub mod forcing;
pub mod scenarios;
pub mod stepper;
pub mod system;

pub mod prelude {
    pub use crate::constitutive::{sgn, Bingham, DashpotLaw, GenericLaw, SystemParams};
    pub use crate::filippov::{check_inclusion, filippov_set, FilippovSet, InclusionReport};
    pub use crate::forcing::Forcing;
    pub use crate::scenarios::{run_paper_case, summarize, ScenarioId, TrajectorySummary};
    pub use crate::stepper::{residual_check, simulate, step, ResidualReport, StepMode, Trajectory};
    pub use crate::system::{consistent_init, State};
}
