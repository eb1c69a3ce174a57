//! Predictor and corrector of the backward-Euler step.
//!
//! Eliminating `F_s^{n+1} = F_s^n + Δt k v^{n+1}` from the discrete momentum
//! balance leaves one scalar relation between the unknown velocity and
//! dashpot force,
//!
//! ```text
//! A v = (Δt/m) (F̃ − F_d),    A = 1 + Δt² k/m,
//! F̃   = m v_n / Δt + F^{n+1} − F_s^n,
//! ```
//!
//! closed by the dashpot law `v = g(F_d)`. Since `g` is monotone, `F_d` and
//! `F̃` share a sign, and `|F̃| ≤ τ` decides stick versus slip before any
//! unknown is computed.

use crate::constitutive::{sgn, Bingham, DashpotLaw, SystemParams};

use super::root::{safeguarded_newton, RootError, RootOptions};

/// Which branch of the corrector produced a step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StepMode {
    Stick,
    Slip,
}

impl StepMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Stick => "stick",
            Self::Slip => "slip",
        }
    }
}

/// Step-size dependent constants of the corrector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepCoefficients {
    /// `1 + Δt² k/m`.
    pub a: f64,
    /// `Δt / m`.
    pub dt_over_m: f64,
    pub dt: f64,
}

impl StepCoefficients {
    pub fn new(params: &SystemParams, dt: f64) -> Self {
        let m = params.mass();
        Self {
            a: 1.0 + dt * dt * params.stiffness() / m,
            dt_over_m: dt / m,
            dt,
        }
    }

    /// `γ A + Δt/m`, the denominator of the closed-form Bingham slip force.
    pub fn bingham_denominator(&self, gamma: f64) -> f64 {
        gamma * self.a + self.dt_over_m
    }
}

/// Output of a corrector: end-of-step velocity and dashpot force.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Correction {
    pub v: f64,
    pub fd: f64,
    pub mode: StepMode,
}

/// `F̃ = m v_n / Δt + F^{n+1} − F_s^n`.
#[inline]
pub fn predictor(params: &SystemParams, v_n: f64, fs_n: f64, force_next: f64, dt: f64) -> f64 {
    params.mass() / dt * v_n + force_next - fs_n
}

/// Closed-form corrector for the Bingham law.
///
/// Slip: `F_d = [γ A sgn(F̃) τ + (Δt/m) F̃] / (γ A + Δt/m)`, written as
/// `sgn(F̃) τ + e` with the excess `e = (Δt/m)(F̃ − sgn(F̃) τ)/(γ A + Δt/m)`
/// so that `v = γ e` stays nonzero whenever `|F̃| > τ` in floating point.
pub fn corrector_bingham(params: &SystemParams, law: &Bingham, f_tilde: f64, dt: f64) -> Correction {
    if f_tilde.abs() <= law.threshold {
        return Correction { v: 0.0, fd: f_tilde, mode: StepMode::Stick };
    }
    let c = StepCoefficients::new(params, dt);
    let s = sgn(f_tilde);
    let excess = c.dt_over_m * (f_tilde - s * law.threshold) / c.bingham_denominator(law.gamma);
    Correction {
        v: law.gamma * excess,
        fd: s * law.threshold + excess,
        mode: StepMode::Slip,
    }
}

/// Corrector for any monotone law, by root finding in `F_d`.
///
/// Solves `h(F_d) = A g(F_d) − (Δt/m)(F̃ − F_d) = 0`. `h` is strictly
/// increasing, `h(0) ≤ 0 ≤ h(F̃)` for `F̃ ≥ 0` (mirrored otherwise), so the
/// root is unique and lies between `0` and `F̃`.
pub fn corrector_generic(
    params: &SystemParams,
    law: &DashpotLaw,
    f_tilde: f64,
    dt: f64,
) -> Result<Correction, RootError> {
    if f_tilde == 0.0 {
        return Ok(Correction { v: 0.0, fd: 0.0, mode: StepMode::Stick });
    }
    let c = StepCoefficients::new(params, dt);
    let h = |fd: f64| c.a * law.velocity(fd) - c.dt_over_m * (f_tilde - fd);
    let dh = |fd: f64| c.a * law.slope(fd) + c.dt_over_m;
    let options = RootOptions {
        tolerance: 1e-12 * f_tilde.abs().max(1.0),
        ..RootOptions::default()
    };
    let root = safeguarded_newton(h, dh, f_tilde.min(0.0), f_tilde.max(0.0), options)?;
    let fd = root.x;
    let v = law.velocity(fd);
    let mode = if v == 0.0 || v.abs() <= 1e-14 * law.velocity_scale() {
        StepMode::Stick
    } else {
        StepMode::Slip
    };
    Ok(Correction { v, fd, mode })
}
