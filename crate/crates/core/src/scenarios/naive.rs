//! Classical single-valued friction model integrated as an explicit ODE.
//!
//! The dashpot force is taken as `sgn(ẋ) τ + ẋ/γ` with `sgn(0) = 0`, so a mass
//! held by static friction sees no friction at all at `ẋ = 0` and starts to
//! move. The resulting velocity chatters around zero instead of sticking.
//! This is the formulation the DAE integrator replaces; it is kept only for
//! comparison.

use crate::constitutive::{sgn, Bingham, DashpotLaw, SystemParams};
use crate::forcing::Forcing;
use crate::stepper::{step_count, SimulationOptions, StepError, StepMode, Trajectory};
use crate::system::State;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NaiveOptions {
    /// Drop the viscous `ẋ/γ` term and keep only `sgn(ẋ) τ`.
    pub pure_coulomb: bool,
    pub simulation: SimulationOptions,
}

/// Classical RK4 on `(x, v)` with the single-valued friction force.
#[allow(clippy::too_many_arguments)]
pub fn naive_signum_simulate(
    params: &SystemParams,
    law: &Bingham,
    forcing: &Forcing,
    x0: f64,
    v0: f64,
    dt: f64,
    t_end: f64,
    options: NaiveOptions,
) -> Result<Trajectory, StepError> {
    let steps = step_count(0.0, t_end, dt)?;
    if steps > options.simulation.step_budget {
        return Err(StepError::BudgetExceeded { steps, budget: options.simulation.step_budget });
    }
    let m = params.mass();
    let k = params.stiffness();
    let dashpot = |v: f64| {
        let dry = sgn(v) * law.threshold;
        if options.pure_coulomb {
            dry
        } else {
            dry + v / law.gamma
        }
    };
    let accel = |t: f64, x: f64, v: f64| (forcing.eval(t) - k * x - dashpot(v)) / m;
    let node = |t: f64, x: f64, v: f64| State { t, x, v, fs: k * x, fd: dashpot(v) };

    let n = steps as usize;
    let mut states = Vec::with_capacity(n + 1);
    let mut modes = Vec::with_capacity(n);
    let (mut x, mut v) = (x0, v0);
    states.push(node(0.0, x, v));
    for i in 0..n {
        let t = i as f64 * dt;
        let h = dt;
        let (k1x, k1v) = (v, accel(t, x, v));
        let (k2x, k2v) = (v + 0.5 * h * k1v, accel(t + 0.5 * h, x + 0.5 * h * k1x, v + 0.5 * h * k1v));
        let (k3x, k3v) = (v + 0.5 * h * k2v, accel(t + 0.5 * h, x + 0.5 * h * k2x, v + 0.5 * h * k2v));
        let (k4x, k4v) = (v + h * k3v, accel(t + h, x + h * k3x, v + h * k3v));
        x += h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        states.push(node((i + 1) as f64 * dt, x, v));
        modes.push(if v == 0.0 { StepMode::Stick } else { StepMode::Slip });
    }
    Ok(Trajectory {
        params: *params,
        law: DashpotLaw::Bingham(*law),
        forcing: forcing.clone(),
        dt,
        states,
        modes,
    })
}
