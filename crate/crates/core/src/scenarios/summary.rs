//! Scalar summaries and the energy balance of a trajectory.

use crate::constitutive::sgn;
use crate::forcing::Forcing;
use crate::stepper::Trajectory;
use crate::system::State;

/// Minimum span of exact rest at the end of a run before it counts as
/// permanent.
pub const REST_HOLD: f64 = 0.1;

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectorySummary {
    pub final_state: State,
    /// `(t, x)` at interior turning points, in time order.
    pub extrema: Vec<(f64, f64)>,
    /// Start of the final stretch of exact `v = 0`, if it lasts at least
    /// [`REST_HOLD`].
    pub rest_time: Option<f64>,
    /// `Σ F_d v Δt` over steps.
    pub total_dissipation: f64,
    pub max_abs_x: f64,
    /// Fraction of nodes with `v = 0` exactly.
    pub stick_fraction: f64,
}

pub fn summarize(trajectory: &Trajectory) -> TrajectorySummary {
    let states = &trajectory.states;
    let final_state = *trajectory.last();

    // Last node with nonzero velocity and that velocity's sign.
    let mut extrema = Vec::new();
    let mut last_moving: Option<(usize, f64)> = None;
    for (n, s) in states.iter().enumerate() {
        let dir = sgn(s.v);
        if dir == 0.0 {
            continue;
        }
        if let Some((j, prev_dir)) = last_moving {
            if dir != prev_dir {
                // Direct reversal peaks at the last node of the old direction;
                // a stick plateau is reported at its entry node.
                let at = if j + 1 == n { j } else { j + 1 };
                extrema.push((states[at].t, states[at].x));
            }
        }
        last_moving = Some((n, dir));
    }

    let first_rest = states.iter().rposition(|s| s.v != 0.0).map_or(0, |i| i + 1);
    let rest_time = states
        .get(first_rest)
        .filter(|s| final_state.t - s.t >= REST_HOLD - 1e-12)
        .map(|s| s.t);

    let total_dissipation = states[1..].iter().map(|s| s.fd * s.v * trajectory.dt).sum();
    let max_abs_x = states.iter().map(|s| s.x.abs()).fold(0.0, f64::max);
    let stick_nodes = states.iter().filter(|s| s.v == 0.0).count();
    TrajectorySummary {
        final_state,
        extrema,
        rest_time,
        total_dissipation,
        max_abs_x,
        stick_fraction: stick_nodes as f64 / states.len() as f64,
    }
}

/// Discrete energy bookkeeping of a trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyAudit {
    /// `Σ F(t₊) v₊ Δt`.
    pub work_in: f64,
    /// `½ k (x_N² − x_0²)`.
    pub spring_delta: f64,
    /// `½ m (v_N² − v_0²)`.
    pub kinetic_delta: f64,
    /// `Σ F_d v Δt`.
    pub dissipated: f64,
    /// `|work_in − spring_delta − kinetic_delta − dissipated|`; backward Euler
    /// leaks `O(Δt)` here.
    pub closure_error: f64,
}

pub fn energy_audit(trajectory: &Trajectory, forcing: &Forcing) -> EnergyAudit {
    let dt = trajectory.dt;
    let k = trajectory.params.stiffness();
    let m = trajectory.params.mass();
    let (first, last) = (trajectory.initial(), trajectory.last());
    let mut work_in = 0.0;
    let mut dissipated = 0.0;
    for s in &trajectory.states[1..] {
        work_in += forcing.eval(s.t) * s.v * dt;
        dissipated += s.fd * s.v * dt;
    }
    let spring_delta = 0.5 * k * (last.x * last.x - first.x * first.x);
    let kinetic_delta = 0.5 * m * (last.v * last.v - first.v * first.v);
    EnergyAudit {
        work_in,
        spring_delta,
        kinetic_delta,
        dissipated,
        closure_error: (work_in - spring_delta - kinetic_delta - dissipated).abs(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constitutive::{DashpotLaw, SystemParams};
    use crate::stepper::StepMode;

    fn hand_made(vs: &[f64]) -> Trajectory {
        let dt = 0.1;
        let mut x = 0.0;
        let states = vs
            .iter()
            .enumerate()
            .map(|(n, &v)| {
                x += dt * v;
                State { t: n as f64 * dt, x, v, fs: 0.0, fd: 0.0 }
            })
            .collect::<Vec<_>>();
        Trajectory {
            params: SystemParams::new(1.0, 1.0).unwrap(),
            law: DashpotLaw::bingham(1.0, 1.0).unwrap(),
            forcing: Forcing::Zero,
            dt,
            modes: vec![StepMode::Slip; states.len() - 1],
            states,
        }
    }

    #[test]
    fn direct_reversal_and_plateau() {
        let t = hand_made(&[0.0, 1.0, 1.0, -1.0, 0.0, 0.0, 0.0, 1.0, 1.0, 0.0, 1.0]);
        let s = summarize(&t);
        let times: Vec<f64> = s.extrema.iter().map(|e| e.0).collect();
        // Reversal between nodes 2 and 3, plateau entered at node 4.
        assert_eq!(times.len(), 2);
        assert!((times[0] - 0.2).abs() < 1e-12);
        assert!((times[1] - 0.4).abs() < 1e-12);
        assert_eq!(s.rest_time, None);
    }

    #[test]
    fn constant_trajectory() {
        let t = hand_made(&[0.0; 5]);
        let s = summarize(&t);
        assert!(s.extrema.is_empty());
        assert_eq!(s.rest_time, Some(0.0));
        assert_eq!(s.total_dissipation, 0.0);
        assert_eq!(s.stick_fraction, 1.0);
        let e = energy_audit(&t, &Forcing::Zero);
        assert_eq!(
            (e.work_in, e.spring_delta, e.kinetic_delta, e.dissipated, e.closure_error),
            (0.0, 0.0, 0.0, 0.0, 0.0)
        );
    }

    #[test]
    fn rest_needs_a_hold() {
        let short = hand_made(&[1.0, 1.0, 1.0, 0.0]);
        assert_eq!(summarize(&short).rest_time, None);
        let long = hand_made(&[1.0, 1.0, 0.0, 0.0, 0.0]);
        assert!((summarize(&long).rest_time.unwrap() - 0.2).abs() < 1e-12);
    }
}
