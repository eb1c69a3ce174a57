//! Self-convergence against a fine-step reference run.

use crate::constitutive::{DashpotLaw, SystemParams};
use crate::forcing::Forcing;
use crate::system::State;

use super::{simulate, step_count, StepError, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub dt: f64,
    /// Max over shared nodes of `|x_dt − x_ref|`.
    pub error: f64,
    /// Order observed between the previous row and this one.
    pub observed_order: Option<f64>,
}

/// Integer `n` with `a ≈ n b`, if one exists.
fn integer_ratio(a: f64, b: f64) -> Option<u64> {
    let r = a / b;
    let n = r.round();
    ((r - n).abs() <= 1e-9 * n.max(1.0) && n >= 1.0).then_some(n as u64)
}

/// Runs each `dt` in `dt_list` (descending) and compares displacements with
/// a reference run at `dt_ref`, which defaults to a tenth of the smallest step.
pub fn convergence_study(
    params: &SystemParams,
    law: &DashpotLaw,
    forcing: &Forcing,
    init: State,
    t_end: f64,
    dt_list: &[f64],
    dt_ref: Option<f64>,
) -> Result<Vec<ConvergenceRow>, StepError> {
    let plan = |msg: String| Err(StepError::InvalidConvergencePlan(msg));
    if dt_list.is_empty() {
        return plan("dt list is empty".into());
    }
    if dt_list.windows(2).any(|w| !(w[0] > w[1])) {
        return plan("dt list must be strictly descending".into());
    }
    let horizon = t_end - init.t;
    for &dt in dt_list {
        step_count(init.t, t_end, dt)?;
        if horizon > 0.0 && integer_ratio(horizon, dt).is_none() {
            return plan(format!("dt = {dt} does not divide the horizon {horizon}"));
        }
    }
    let finest = dt_list[dt_list.len() - 1];
    let dt_ref = dt_ref.unwrap_or(finest / 10.0);
    if dt_ref > finest / 10.0 * (1.0 + 1e-12) {
        return plan(format!("reference step {dt_ref} must be <= {}", finest / 10.0));
    }
    let strides = dt_list
        .iter()
        .map(|&dt| integer_ratio(dt, dt_ref).map(|n| n as usize))
        .collect::<Option<Vec<_>>>();
    let Some(strides) = strides else {
        return plan(format!("every dt must be an integer multiple of dt_ref = {dt_ref}"));
    };

    let reference = simulate(params, law, forcing, init, dt_ref, t_end)?;
    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(dt_list.len());
    for (&dt, &stride) in dt_list.iter().zip(&strides) {
        let run = simulate(params, law, forcing, init, dt, t_end)?;
        let error = max_displacement_gap(&run, &reference, stride);
        let observed_order = rows.last().and_then(|prev| {
            (prev.error > 0.0 && error > 0.0).then(|| (prev.error / error).ln() / (prev.dt / dt).ln())
        });
        rows.push(ConvergenceRow { dt, error, observed_order });
    }
    Ok(rows)
}

fn max_displacement_gap(run: &Trajectory, reference: &Trajectory, stride: usize) -> f64 {
    run.states
        .iter()
        .enumerate()
        .filter_map(|(n, s)| reference.states.get(n * stride).map(|r| (s.x - r.x).abs()))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::consistent_init;

    #[test]
    fn single_dt_has_no_order() {
        let p = SystemParams::new(1.0, 100.0).unwrap();
        let law = DashpotLaw::bingham(1.0, 1.0).unwrap();
        let init = consistent_init(&p, &law, 0.5, None, None).unwrap();
        let rows = convergence_study(&p, &law, &Forcing::Zero, init, 0.1, &[1e-3], None).unwrap();
        assert_eq!(rows.len(), 1);
        assert!(rows[0].error > 0.0);
        assert_eq!(rows[0].observed_order, None);
    }

    #[test]
    fn stick_case_is_exact_at_every_dt() {
        let p = SystemParams::new(1.0, 100.0).unwrap();
        let law = DashpotLaw::bingham(1.0, 1.0).unwrap();
        let rows = convergence_study(
            &p,
            &law,
            &Forcing::f1(),
            State::zero(),
            2.0,
            &[4e-4, 2e-4, 1e-4],
            Some(1e-5),
        )
        .unwrap();
        assert!(rows.iter().all(|r| r.error == 0.0 && r.observed_order.is_none()));
    }

    #[test]
    fn viscous_case_is_first_order() {
        let p = SystemParams::new(1.0, 100.0).unwrap();
        let law = DashpotLaw::linear_viscous(1.0).unwrap();
        let init = consistent_init(&p, &law, 0.5, None, None).unwrap();
        let rows =
            convergence_study(&p, &law, &Forcing::Zero, init, 0.5, &[4e-3, 2e-3, 1e-3], None).unwrap();
        for r in &rows[1..] {
            let order = r.observed_order.unwrap();
            assert!((0.8..=1.2).contains(&order), "{rows:?}");
        }
    }

    #[test]
    fn rejects_bad_plans() {
        let p = SystemParams::new(1.0, 100.0).unwrap();
        let law = DashpotLaw::bingham(1.0, 1.0).unwrap();
        let z = State::zero();
        let f = Forcing::Zero;
        for (list, dt_ref) in [
            (vec![], None),
            (vec![1e-3, 2e-3], None),
            (vec![3e-1], None),
            (vec![1e-2], Some(5e-3)),
            (vec![1e-2], Some(3e-4)),
        ] {
            let e = convergence_study(&p, &law, &f, z, 1.0, &list, dt_ref);
            assert!(matches!(e, Err(StepError::InvalidConvergencePlan(_))), "{list:?} {dt_ref:?}");
        }
    }
}
