//! External force signals `F(t)`.

use std::f64::consts::PI;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ForcingError {
    #[error("window end must be >= 0 (got {0})")]
    NegativeWindow(f64),
    #[error("tabulated forcing needs at least 2 samples (got {0})")]
    TooFewSamples(usize),
    #[error("tabulated sample times must be strictly increasing (at index {0})")]
    UnsortedSamples(usize),
    #[error("forcing parameter {0} must be finite")]
    NonFinite(&'static str),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Forcing {
    Zero,
    Constant { value: f64 },
    /// `amplitude · sin(omega · t)` on `[0, t_end]`, zero afterwards.
    WindowedSinusoid { amplitude: f64, omega: f64, t_end: f64 },
    /// Piecewise-linear through `(t, F)` samples, zero outside their span.
    Tabulated { samples: Vec<(f64, f64)> },
}

impl Forcing {
    pub fn windowed_sinusoid(amplitude: f64, omega: f64, t_end: f64) -> Result<Self, ForcingError> {
        if !amplitude.is_finite() {
            return Err(ForcingError::NonFinite("amplitude"));
        }
        if !omega.is_finite() {
            return Err(ForcingError::NonFinite("omega"));
        }
        if !(t_end >= 0.0) {
            return Err(ForcingError::NegativeWindow(t_end));
        }
        Ok(Self::WindowedSinusoid { amplitude, omega, t_end })
    }

    pub fn tabulated(samples: Vec<(f64, f64)>) -> Result<Self, ForcingError> {
        if samples.len() < 2 {
            return Err(ForcingError::TooFewSamples(samples.len()));
        }
        for (i, w) in samples.windows(2).enumerate() {
            if !(w[1].0 > w[0].0) {
                return Err(ForcingError::UnsortedSamples(i + 1));
            }
        }
        if samples.iter().any(|(t, f)| !t.is_finite() || !f.is_finite()) {
            return Err(ForcingError::NonFinite("samples"));
        }
        Ok(Self::Tabulated { samples })
    }

    /// `0.5 sin(5πt)` on `[0, 1]`: stays inside the unit stick band.
    pub fn f1() -> Self {
        Self::WindowedSinusoid { amplitude: 0.5, omega: 5.0 * PI, t_end: 1.0 }
    }

    /// `10 sin(5πt)` on `[0, 1]`: drives the unit-threshold dashpot into slip.
    pub fn f2() -> Self {
        Self::WindowedSinusoid { amplitude: 10.0, omega: 5.0 * PI, t_end: 1.0 }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Self::Zero => 0.0,
            Self::Constant { value } => *value,
            Self::WindowedSinusoid { amplitude, omega, t_end } => {
                if t <= *t_end {
                    amplitude * (omega * t).sin()
                } else {
                    0.0
                }
            }
            Self::Tabulated { samples } => interpolate(samples, t),
        }
    }

    /// Largest `|F|` over `n` uniform samples of `[t0, t1]`.
    pub fn max_abs_on_grid(&self, t0: f64, t1: f64, n: usize) -> f64 {
        assert!(n >= 2, "max_abs_on_grid needs at least 2 samples");
        let step = (t1 - t0) / (n - 1) as f64;
        (0..n)
            .map(|i| if i + 1 == n { t1 } else { t0 + step * i as f64 })
            .map(|t| self.eval(t).abs())
            .fold(0.0, f64::max)
    }
}

fn interpolate(samples: &[(f64, f64)], t: f64) -> f64 {
    let (first, last) = (samples[0], samples[samples.len() - 1]);
    if t < first.0 || t > last.0 {
        return 0.0;
    }
    // Index of the first sample with time > t.
    let upper = samples.partition_point(|(ts, _)| *ts <= t);
    if upper == 0 {
        return first.1;
    }
    let (t0, f0) = samples[upper - 1];
    if t == t0 || upper == samples.len() {
        return f0;
    }
    let (t1, f1) = samples[upper];
    f0 + (f1 - f0) * (t - t0) / (t1 - t0)
}
