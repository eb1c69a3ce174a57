//! Force–kinematics constitutive laws.
//!
//! The spring is linear, `x = F_s / k`. The dashpot is described the other
//! way around from the textbook viscous element: velocity is given as a
//! function of the dashpot force,
//!
//! ```text
//!          ⎧ 0                               |F_d| ≤ τ
//! v(F_d) = ⎨
//!          ⎩ γ (F_d − sgn(F_d) τ)            |F_d| > τ
//! ```
//!
//! which is single valued in `F_d` even though its inverse is set valued at
//! `v = 0`. `τ` is the yield force (friction coefficient times normal load)
//! and `γ` the post-yield slope.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Sign function with `sgn(0) = 0`.
///
/// `f64::signum` maps `+0.0` to `1.0`, which is not what the threshold laws
/// want.
#[inline]
pub fn sgn(value: f64) -> f64 {
    if value > 0.0 {
        1.0
    } else if value < 0.0 {
        -1.0
    } else {
        0.0
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConstitutiveError {
    #[error("mass must be > 0 (got {0})")]
    NonPositiveMass(f64),
    #[error("k must be > 0 (got {0})")]
    NonPositiveStiffness(f64),
    /// The dashpot force for `v = 0` is any value in `[-threshold, threshold]`.
    #[error("dashpot force is set-valued at zero velocity: any value in [-{threshold}, {threshold}]")]
    SetValuedAtZero { threshold: f64 },
    #[error("no dashpot force produces velocity {velocity}")]
    NoInverse { velocity: f64 },
    #[error("ill-formed dashpot law: {0}")]
    IllFormed(ValidationReport),
}

/// Mass and spring stiffness of the lumped system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    mass: f64,
    stiffness: f64,
}

impl SystemParams {
    pub fn new(mass: f64, stiffness: f64) -> Result<Self, ConstitutiveError> {
        // `!(x > 0)` also rejects NaN.
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(ConstitutiveError::NonPositiveMass(mass));
        }
        if !(stiffness > 0.0) || !stiffness.is_finite() {
            return Err(ConstitutiveError::NonPositiveStiffness(stiffness));
        }
        Ok(Self { mass, stiffness })
    }

    #[inline]
    pub fn mass(&self) -> f64 {
        self.mass
    }

    #[inline]
    pub fn stiffness(&self) -> f64 {
        self.stiffness
    }

    /// Spring elongation carrying force `spring_force`.
    #[inline]
    pub fn spring_displacement(&self, spring_force: f64) -> f64 {
        spring_force / self.stiffness
    }

    #[inline]
    pub fn spring_force(&self, displacement: f64) -> f64 {
        self.stiffness * displacement
    }
}

/// Bingham dashpot: rigid below the yield force, linear in the excess above it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bingham {
    /// Post-yield slope, velocity per unit force.
    pub gamma: f64,
    /// Yield force.
    pub threshold: f64,
}

impl Bingham {
    /// Builds a validated law.
    pub fn new(gamma: f64, threshold: f64) -> Result<Self, ConstitutiveError> {
        let law = Self { gamma, threshold };
        let report = law_wellformed(&DashpotLaw::Bingham(law));
        if report.is_valid() {
            Ok(law)
        } else {
            Err(ConstitutiveError::IllFormed(report))
        }
    }

    #[inline]
    pub fn velocity(&self, dashpot_force: f64) -> f64 {
        if dashpot_force.abs() <= self.threshold {
            0.0
        } else {
            self.gamma * (dashpot_force - sgn(dashpot_force) * self.threshold)
        }
    }

    /// Inverse of the slip branch. Fails at `v = 0`, where the stick branch
    /// admits every force in `[-threshold, threshold]`.
    pub fn force_from_velocity(&self, velocity: f64) -> Result<f64, ConstitutiveError> {
        if velocity == 0.0 {
            return Err(ConstitutiveError::SetValuedAtZero {
                threshold: self.threshold,
            });
        }
        Ok(velocity / self.gamma + sgn(velocity) * self.threshold)
    }
}

type ScalarMap = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Force range and resolution used to spot-check a user supplied law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplingGrid {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl SamplingGrid {
    pub const DEFAULT_POINTS: usize = 257;

    /// Symmetric grid `[-10 s, 10 s]` around a guessed threshold `s`.
    pub fn around_threshold(threshold_guess: f64) -> Self {
        let half_width = 10.0 * threshold_guess.abs().max(f64::MIN_POSITIVE);
        Self {
            lo: -half_width,
            hi: half_width,
            points: Self::DEFAULT_POINTS,
        }
    }

    pub fn samples(&self) -> impl Iterator<Item = f64> + '_ {
        let n = self.points.max(2);
        let step = (self.hi - self.lo) / (n - 1) as f64;
        (0..n).map(move |i| if i + 1 == n { self.hi } else { self.lo + step * i as f64 })
    }
}

impl Default for SamplingGrid {
    fn default() -> Self {
        Self::around_threshold(1.0)
    }
}

/// A user supplied velocity-from-force map `g`.
///
/// `g` must satisfy `g(0) = 0`, be nondecreasing, and dissipate
/// (`F g(F) ≥ 0`). None of this is decidable for an arbitrary closure;
/// [`law_wellformed`] samples it on [`GenericLaw::grid`].
#[derive(Clone)]
pub struct GenericLaw {
    name: String,
    map: ScalarMap,
    slope: Option<ScalarMap>,
    velocity_scale: f64,
    grid: SamplingGrid,
}

impl GenericLaw {
    pub fn new<G>(name: impl Into<String>, map: G) -> Self
    where
        G: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            map: Arc::new(map),
            slope: None,
            velocity_scale: 1.0,
            grid: SamplingGrid::default(),
        }
    }

    /// Analytic derivative `g'(F)`; without one the root finder falls back to
    /// a central difference.
    pub fn with_slope<D>(mut self, slope: D) -> Self
    where
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        self.slope = Some(Arc::new(slope));
        self
    }

    /// Velocity magnitude below which a solved velocity counts as zero,
    /// in units of `1e-14`.
    pub fn with_velocity_scale(mut self, scale: f64) -> Self {
        self.velocity_scale = scale;
        self
    }

    pub fn with_grid(mut self, grid: SamplingGrid) -> Self {
        self.grid = grid;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn grid(&self) -> SamplingGrid {
        self.grid
    }

    #[inline]
    pub fn velocity(&self, force: f64) -> f64 {
        (self.map)(force)
    }

    pub fn slope(&self, force: f64) -> f64 {
        match &self.slope {
            Some(d) => d(force),
            None => {
                let h = 1e-7 * force.abs().max(1.0);
                (self.velocity(force + h) - self.velocity(force - h)) / (2.0 * h)
            }
        }
    }
}

impl fmt::Debug for GenericLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GenericLaw")
            .field("name", &self.name)
            .field("has_slope", &self.slope.is_some())
            .field("velocity_scale", &self.velocity_scale)
            .field("grid", &self.grid)
            .finish()
    }
}

/// Velocity-as-function-of-force dashpot description.
#[derive(Debug, Clone)]
pub enum DashpotLaw {
    Bingham(Bingham),
    /// `v = F_d / c`.
    LinearViscous { c: f64 },
    GenericMonotone(GenericLaw),
}

impl DashpotLaw {
    pub fn bingham(gamma: f64, threshold: f64) -> Result<Self, ConstitutiveError> {
        Bingham::new(gamma, threshold).map(Self::Bingham)
    }

    pub fn linear_viscous(c: f64) -> Result<Self, ConstitutiveError> {
        Self::LinearViscous { c }.validated()
    }

    pub fn generic(law: GenericLaw) -> Result<Self, ConstitutiveError> {
        Self::GenericMonotone(law).validated()
    }

    /// Runs [`law_wellformed`] and returns the law only if it passes.
    pub fn validated(self) -> Result<Self, ConstitutiveError> {
        let report = law_wellformed(&self);
        if report.is_valid() {
            Ok(self)
        } else {
            Err(ConstitutiveError::IllFormed(report))
        }
    }

    /// Re-wraps a Bingham law as a generic one so it goes through the
    /// root-finding corrector instead of the closed form.
    pub fn bingham_as_generic(law: Bingham) -> Self {
        let Bingham { gamma, threshold } = law;
        let grid = SamplingGrid::around_threshold(threshold.max(1.0));
        Self::GenericMonotone(
            GenericLaw::new("bingham", move |f| law.velocity(f))
                .with_slope(move |f| if f.abs() > threshold { gamma } else { 0.0 })
                .with_velocity_scale(gamma * threshold)
                .with_grid(grid),
        )
    }

    pub fn as_bingham(&self) -> Option<&Bingham> {
        match self {
            Self::Bingham(b) => Some(b),
            _ => None,
        }
    }

    /// The law's velocity-from-force map.
    #[inline]
    pub fn velocity(&self, dashpot_force: f64) -> f64 {
        match self {
            Self::Bingham(b) => b.velocity(dashpot_force),
            Self::LinearViscous { c } => dashpot_force / c,
            Self::GenericMonotone(g) => g.velocity(dashpot_force),
        }
    }

    /// `dv/dF_d`, one-sided choices at kinks are irrelevant to callers.
    pub fn slope(&self, dashpot_force: f64) -> f64 {
        match self {
            Self::Bingham(b) => {
                if dashpot_force.abs() > b.threshold {
                    b.gamma
                } else {
                    0.0
                }
            }
            Self::LinearViscous { c } => 1.0 / c,
            Self::GenericMonotone(g) => g.slope(dashpot_force),
        }
    }

    /// Velocity scale used to call a numerically solved velocity zero.
    pub fn velocity_scale(&self) -> f64 {
        match self {
            Self::Bingham(b) => b.gamma * b.threshold,
            Self::LinearViscous { .. } => 1.0,
            Self::GenericMonotone(g) => g.velocity_scale,
        }
    }

    /// Algebraic constraint `v − g(F_d)`; zero iff the pair obeys the law.
    #[inline]
    pub fn residual(&self, velocity: f64, dashpot_force: f64) -> f64 {
        velocity - self.velocity(dashpot_force)
    }

    /// A dashpot force producing `velocity`.
    ///
    /// For laws with a stick band the answer at `v = 0` is a whole interval
    /// and this returns [`ConstitutiveError::SetValuedAtZero`]; callers pick a
    /// selection themselves.
    pub fn force_from_velocity(&self, velocity: f64) -> Result<f64, ConstitutiveError> {
        match self {
            Self::Bingham(b) => b.force_from_velocity(velocity),
            Self::LinearViscous { c } => Ok(c * velocity),
            Self::GenericMonotone(g) => invert_generic(g, velocity),
        }
    }
}

/// Solves `g(F) = v` by bracket expansion and bisection.
fn invert_generic(law: &GenericLaw, velocity: f64) -> Result<f64, ConstitutiveError> {
    if velocity == 0.0 {
        if law.velocity(0.0) == 0.0 {
            // g(0) = 0, but the stick band may be wider; report it if so.
            let probe = law.grid.hi.abs().max(law.grid.lo.abs()) * 1e-3;
            if law.velocity(probe) == 0.0 || law.velocity(-probe) == 0.0 {
                return Err(ConstitutiveError::SetValuedAtZero { threshold: probe });
            }
            return Ok(0.0);
        }
        return Err(ConstitutiveError::NoInverse { velocity });
    }
    let dir = sgn(velocity);
    let mut lo = 0.0_f64;
    let mut hi = dir;
    let mut expansions = 0;
    while (law.velocity(hi) - velocity) * dir < 0.0 {
        lo = hi;
        hi *= 2.0;
        expansions += 1;
        if expansions > 1100 || !hi.is_finite() {
            return Err(ConstitutiveError::NoInverse { velocity });
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if (law.velocity(mid) - velocity) * dir < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

/// One violated constructor invariant.
#[derive(Debug, Clone, PartialEq)]
pub enum LawViolation {
    NonPositiveGamma(f64),
    NegativeThreshold(f64),
    NonPositiveDamping(f64),
    NonFiniteParameter(&'static str),
    NonzeroAtOrigin(f64),
    NonFiniteSample { force: f64 },
    Decreasing { from: f64, to: f64 },
    Productive { force: f64 },
}

impl fmt::Display for LawViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NonPositiveGamma(g) => write!(f, "gamma must be > 0 (got {g})"),
            Self::NegativeThreshold(t) => write!(f, "threshold must be >= 0 (got {t})"),
            Self::NonPositiveDamping(c) => write!(f, "c must be > 0 (got {c})"),
            Self::NonFiniteParameter(name) => write!(f, "{name} must be finite"),
            Self::NonzeroAtOrigin(v) => write!(f, "g(0) must be 0 (got {v})"),
            Self::NonFiniteSample { force } => write!(f, "g({force}) is not finite"),
            Self::Decreasing { from, to } => {
                write!(f, "monotonicity: g decreases between {from} and {to}")
            }
            Self::Productive { force } => write!(f, "dissipation: F g(F) < 0 at F = {force}"),
        }
    }
}

/// Findings of [`law_wellformed`]. Empty means valid.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub violations: Vec<LawViolation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Reports every violated invariant of `law`.
///
/// Generic laws are only sampled, so a clean report for them is evidence,
/// not proof.
pub fn law_wellformed(law: &DashpotLaw) -> ValidationReport {
    let mut violations = Vec::new();
    match law {
        DashpotLaw::Bingham(Bingham { gamma, threshold }) => {
            if !gamma.is_finite() {
                violations.push(LawViolation::NonFiniteParameter("gamma"));
            } else if *gamma <= 0.0 {
                violations.push(LawViolation::NonPositiveGamma(*gamma));
            }
            if !threshold.is_finite() {
                violations.push(LawViolation::NonFiniteParameter("threshold"));
            } else if *threshold < 0.0 {
                violations.push(LawViolation::NegativeThreshold(*threshold));
            }
        }
        DashpotLaw::LinearViscous { c } => {
            if !c.is_finite() {
                violations.push(LawViolation::NonFiniteParameter("c"));
            } else if *c <= 0.0 {
                violations.push(LawViolation::NonPositiveDamping(*c));
            }
        }
        DashpotLaw::GenericMonotone(g) => {
            let at_origin = g.velocity(0.0);
            if at_origin != 0.0 {
                violations.push(LawViolation::NonzeroAtOrigin(at_origin));
            }
            let mut previous: Option<(f64, f64)> = None;
            let mut decreasing = false;
            let mut productive = false;
            for force in g.grid.samples() {
                let v = g.velocity(force);
                if !v.is_finite() {
                    violations.push(LawViolation::NonFiniteSample { force });
                    break;
                }
                if !productive && force * v < 0.0 {
                    violations.push(LawViolation::Productive { force });
                    productive = true;
                }
                if let Some((pf, pv)) = previous {
                    if !decreasing && v < pv {
                        violations.push(LawViolation::Decreasing { from: pf, to: force });
                        decreasing = true;
                    }
                }
                previous = Some((force, v));
            }
        }
    }
    ValidationReport { violations }
}
