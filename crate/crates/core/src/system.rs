//! Instantaneous DAE state, consistent initialization, the differential part
//! of the right-hand side, and the rest set of a threshold dashpot.

use thiserror::Error;

use crate::constitutive::{Bingham, ConstitutiveError, DashpotLaw, SystemParams};

/// Tolerance on the constitutive residual of a consistent state.
pub const CONSTRAINT_TOL: f64 = 1e-12;
/// Relative tolerance on `x = F_s / k`.
pub const SPRING_REL_TOL: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SystemError {
    #[error("initial velocity {v0} and dashpot force {fd0} violate the dashpot law (residual {residual:e})")]
    InconsistentPair { v0: f64, fd0: f64, residual: f64 },
    #[error("initial value {0} must be finite")]
    NonFinite(&'static str),
    #[error(transparent)]
    Constitutive(#[from] ConstitutiveError),
}

/// Unknowns of the DAE at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct State {
    pub t: f64,
    pub x: f64,
    pub v: f64,
    /// Spring force.
    pub fs: f64,
    /// Dashpot force.
    pub fd: f64,
}

impl State {
    pub const fn zero() -> Self {
        Self { t: 0.0, x: 0.0, v: 0.0, fs: 0.0, fd: 0.0 }
    }

    /// `|x − F_s/k|` relative to `max(|x|, tiny)`.
    pub fn spring_mismatch(&self, params: &SystemParams) -> f64 {
        let expected = params.spring_displacement(self.fs);
        let diff = (self.x - expected).abs();
        if diff == 0.0 {
            0.0
        } else {
            diff / self.x.abs().max(expected.abs()).max(f64::MIN_POSITIVE)
        }
    }

    /// Checks both algebraic invariants of the state.
    pub fn is_consistent(&self, params: &SystemParams, law: &DashpotLaw) -> bool {
        self.spring_mismatch(params) <= SPRING_REL_TOL
            && law.residual(self.v, self.fd).abs() <= CONSTRAINT_TOL
    }
}

/// Builds an initial state that satisfies the algebraic constraints.
///
/// `F_s` follows from `x0`. Of `fd0` and `v0`, whichever is given determines
/// the other through the law; if both are given they must agree. When the law
/// leaves the dashpot force undetermined (`v = 0` inside the stick band) the
/// force defaults to zero.
pub fn consistent_init(
    params: &SystemParams,
    law: &DashpotLaw,
    x0: f64,
    fd0: Option<f64>,
    v0: Option<f64>,
) -> Result<State, SystemError> {
    if !x0.is_finite() {
        return Err(SystemError::NonFinite("x0"));
    }
    let fs = params.spring_force(x0);
    let (v, fd) = match (fd0, v0) {
        (Some(fd), Some(v)) => {
            if !fd.is_finite() || !v.is_finite() {
                return Err(SystemError::NonFinite("fd0/v0"));
            }
            let residual = law.residual(v, fd);
            if residual.abs() > CONSTRAINT_TOL {
                return Err(SystemError::InconsistentPair { v0: v, fd0: fd, residual });
            }
            (v, fd)
        }
        (Some(fd), None) => {
            if !fd.is_finite() {
                return Err(SystemError::NonFinite("fd0"));
            }
            (law.velocity(fd), fd)
        }
        (None, Some(v)) if v != 0.0 => {
            if !v.is_finite() {
                return Err(SystemError::NonFinite("v0"));
            }
            (v, law.force_from_velocity(v)?)
        }
        (None, _) => (law.velocity(0.0), 0.0),
    };
    Ok(State { t: 0.0, x: x0, v, fs, fd })
}

/// Differential part of the DAE: `(dv/dt, dF_s/dt)`.
#[inline]
pub fn rhs_ode_part(params: &SystemParams, state: &State, external_force: f64) -> (f64, f64) {
    let accel = (external_force - state.fs - state.fd) / params.mass();
    let spring_rate = params.stiffness() * state.v;
    (accel, spring_rate)
}

/// Closed interval of rest displacements under a constant load.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquilibriumInterval {
    pub x_lo: f64,
    pub x_hi: f64,
}

impl EquilibriumInterval {
    pub fn contains(&self, x: f64) -> bool {
        self.x_lo <= x && x <= self.x_hi
    }

    pub fn width(&self) -> f64 {
        self.x_hi - self.x_lo
    }

    pub fn is_degenerate(&self) -> bool {
        self.x_lo == self.x_hi
    }
}

/// `{ x : |F̄ − k x| ≤ τ }`: every spring deflection the yield force can hold.
pub fn equilibrium_interval(params: &SystemParams, law: &Bingham, load: f64) -> EquilibriumInterval {
    let k = params.stiffness();
    EquilibriumInterval {
        x_lo: (load - law.threshold) / k,
        x_hi: (load + law.threshold) / k,
    }
}

/// True iff the mass is exactly at rest inside the equilibrium interval.
pub fn is_equilibrium(params: &SystemParams, law: &Bingham, state: &State, load: f64) -> bool {
    state.v == 0.0 && equilibrium_interval(params, law, load).contains(state.x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn paper() -> (SystemParams, DashpotLaw) {
        (SystemParams::new(1.0, 100.0).unwrap(), DashpotLaw::bingham(1.0, 1.0).unwrap())
    }

    #[test]
    fn init_from_dashpot_force() {
        let (p, law) = paper();
        let s = consistent_init(&p, &law, 0.0, Some(0.0), None).unwrap();
        assert_eq!(s, State::zero());
        let s = consistent_init(&p, &law, 0.005, Some(0.0), None).unwrap();
        assert_eq!((s.x, s.v, s.fs, s.fd), (0.005, 0.0, 0.5, 0.0));
        assert!(s.is_consistent(&p, &law));
        let s = consistent_init(&p, &law, 0.5, None, None).unwrap();
        assert_eq!(s.fs, 50.0);
    }

    #[test]
    fn init_from_velocity_uses_slip_inverse() {
        let (p, law) = paper();
        let s = consistent_init(&p, &law, 0.0, None, Some(1.0)).unwrap();
        assert_eq!((s.v, s.fd, s.fs), (1.0, 2.0, 0.0));
        assert_eq!(law.residual(s.v, s.fd), 0.0);
        let s = consistent_init(&p, &law, 0.0, None, Some(0.0)).unwrap();
        assert_eq!((s.v, s.fd), (0.0, 0.0));
    }

    #[test]
    fn init_rejects_inconsistent_pair() {
        let (p, law) = paper();
        assert!(consistent_init(&p, &law, 0.0, Some(2.0), Some(1.0)).is_ok());
        assert!(matches!(
            consistent_init(&p, &law, 0.0, Some(5.0), Some(0.0)),
            Err(SystemError::InconsistentPair { .. })
        ));
        assert!(matches!(
            consistent_init(&p, &law, 0.0, Some(0.5), Some(1.0)),
            Err(SystemError::InconsistentPair { .. })
        ));
    }

    #[test]
    fn rhs_examples() {
        let (p, _) = paper();
        let balanced = State { v: 0.0, fs: 0.5, fd: -0.5, ..State::zero() };
        assert_eq!(rhs_ode_part(&p, &balanced, 0.0), (0.0, 0.0));
        let sliding = State { v: 1.0, fs: 0.0, fd: 2.0, ..State::zero() };
        assert_eq!(rhs_ode_part(&p, &sliding, 0.0), (-2.0, 100.0));
        assert_eq!(rhs_ode_part(&p, &State::zero(), 0.3), (0.3, 0.0));
    }

    #[test]
    fn equilibrium_interval_examples() {
        let (p, _) = paper();
        let unit = Bingham { gamma: 1.0, threshold: 1.0 };
        assert_eq!(equilibrium_interval(&p, &unit, 0.0), EquilibriumInterval { x_lo: -0.01, x_hi: 0.01 });
        assert_eq!(equilibrium_interval(&p, &unit, 0.5), EquilibriumInterval { x_lo: -0.005, x_hi: 0.015 });
        let frictionless = Bingham { gamma: 1.0, threshold: 0.0 };
        let iv = equilibrium_interval(&p, &frictionless, 0.0);
        assert!(iv.is_degenerate());
        assert_eq!(iv.x_lo, 0.0);
    }

    #[test]
    fn equilibrium_membership() {
        let (p, _) = paper();
        let unit = Bingham { gamma: 1.0, threshold: 1.0 };
        let stretched = State { x: 0.005, fs: 0.5, ..State::zero() };
        assert!(is_equilibrium(&p, &unit, &stretched, 0.0));
        let far = State { x: 0.5, fs: 50.0, ..State::zero() };
        assert!(!is_equilibrium(&p, &unit, &far, 0.0));
        let moving = State { v: 1.0, ..State::zero() };
        assert!(!is_equilibrium(&p, &unit, &moving, 0.0));
    }

    #[test]
    fn every_point_of_the_interval_can_be_held() {
        let (p, _) = paper();
        let unit = Bingham { gamma: 1.0, threshold: 1.0 };
        for load in [-0.7, 0.0, 0.5, 3.0] {
            let iv = equilibrium_interval(&p, &unit, load);
            assert!((iv.width() - 2.0 * unit.threshold / p.stiffness()).abs() < 1e-15);
            assert!((0.5 * (iv.x_lo + iv.x_hi) - load / p.stiffness()).abs() < 1e-15);
            for i in 0..=100 {
                let x = iv.x_lo + iv.width() * i as f64 / 100.0;
                let fs = p.spring_force(x);
                let fd = load - fs;
                assert!(fd.abs() <= unit.threshold + 1e-12);
                let s = State { x, fs, fd, ..State::zero() };
                let (a, r) = rhs_ode_part(&p, &s, load);
                assert_eq!(a, 0.0);
                assert_eq!(r, 0.0);
            }
        }
    }
}
