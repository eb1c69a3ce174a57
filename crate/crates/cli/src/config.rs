//! Flat `key = value` run configuration.
//!
//! ```text
//! # reference parameters, super-threshold forcing
//! paper_defaults = true
//! scenario = f2
//! dt = 5e-5
//! forcing.amplitude = 12
//! ```
//!
//! Forcing is described by dotted keys: `forcing.type` is one of `zero`,
//! `constant`, `sinusoid` or `tabulated`; a sinusoid takes `forcing.amplitude`,
//! `forcing.t_end` and either `forcing.omega` (rad per time) or
//! `forcing.frequency` (cycles per time); `tabulated` takes
//! `forcing.samples = t:F, t:F, ...`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::PathBuf;

use bingham_dae::constitutive::{DashpotLaw, SystemParams};
use bingham_dae::forcing::Forcing;
use bingham_dae::scenarios::{ScenarioId, PAPER_DT, PAPER_GAMMA, PAPER_MASS, PAPER_STIFFNESS, PAPER_THRESHOLD};
use bingham_dae::system::{consistent_init, State};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: duplicate key `{key}`")]
    DuplicateKey { line: usize, key: String },
    #[error("key `{key}`: cannot parse `{value}` as {expected}")]
    BadValue { key: String, value: String, expected: &'static str },
    #[error("missing required key `{0}`")]
    Missing(&'static str),
    #[error("{0}")]
    Invalid(String),
}

impl ConfigError {
    /// Parse problems are usage errors; the rest are validation failures.
    pub fn is_parse(&self) -> bool {
        matches!(
            self,
            Self::Syntax { .. } | Self::UnknownKey { .. } | Self::DuplicateKey { .. } | Self::BadValue { .. }
        )
    }
}

pub const KNOWN_KEYS: &[&str] = &[
    "paper_defaults",
    "scenario",
    "m",
    "k",
    "law",
    "gamma",
    "threshold",
    "c",
    "x0",
    "fd0",
    "v0",
    "dt",
    "t_end",
    "forcing.type",
    "forcing.amplitude",
    "forcing.omega",
    "forcing.frequency",
    "forcing.t_end",
    "forcing.value",
    "forcing.samples",
    "output.csv",
    "output.report",
    "output.plots",
    "naive.pure_coulomb",
];

/// Raw key/value pairs with the line each came from.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigMap {
    entries: BTreeMap<String, (String, usize)>,
}

impl ConfigMap {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut entries = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(ConfigError::Syntax { line, message: format!("expected `key = value`, got `{content}`") });
            };
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if key.is_empty() {
                return Err(ConfigError::Syntax { line, message: "empty key".into() });
            }
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(ConfigError::UnknownKey { line, key });
            }
            if entries.contains_key(&key) {
                return Err(ConfigError::DuplicateKey { line, key });
            }
            entries.insert(key, (value, line));
        }
        Ok(Self { entries })
    }

    /// Sets or replaces a key, as a sweep does for each grid point.
    pub fn set(&mut self, key: &str, value: impl Into<String>) -> Result<(), ConfigError> {
        if !KNOWN_KEYS.contains(&key) {
            return Err(ConfigError::UnknownKey { line: 0, key: key.to_string() });
        }
        self.entries.insert(key.to_string(), (value.into(), 0));
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|(v, _)| v.as_str())
    }

    fn f64(&self, key: &'static str) -> Result<Option<f64>, ConfigError> {
        self.get(key)
            .map(|v| {
                v.parse::<f64>().map_err(|_| ConfigError::BadValue {
                    key: key.to_string(),
                    value: v.to_string(),
                    expected: "a number",
                })
            })
            .transpose()
    }

    fn bool(&self, key: &'static str) -> Result<Option<bool>, ConfigError> {
        self.get(key)
            .map(|v| match v {
                "true" | "yes" | "1" => Ok(true),
                "false" | "no" | "0" => Ok(false),
                _ => Err(ConfigError::BadValue { key: key.to_string(), value: v.to_string(), expected: "true or false" }),
            })
            .transpose()
    }
}

/// Dashpot law as written in the configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LawSpec {
    Bingham { gamma: f64, threshold: f64 },
    Linear { c: f64 },
}

impl LawSpec {
    pub fn build(&self) -> Result<DashpotLaw, ConfigError> {
        let law = match *self {
            Self::Bingham { gamma, threshold } => DashpotLaw::bingham(gamma, threshold),
            Self::Linear { c } => DashpotLaw::linear_viscous(c),
        };
        law.map_err(|e| ConfigError::Invalid(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct OutputPaths {
    pub csv: Option<PathBuf>,
    pub report: Option<PathBuf>,
    pub plots: Option<PathBuf>,
}

/// Fully validated run description.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub name: String,
    pub scenario: Option<ScenarioId>,
    pub params: SystemParams,
    pub law_spec: LawSpec,
    pub law: DashpotLaw,
    pub forcing: Forcing,
    pub x0: f64,
    pub fd0: Option<f64>,
    pub v0: Option<f64>,
    pub dt: f64,
    pub t_end: f64,
    pub pure_coulomb: bool,
    pub output: OutputPaths,
}

impl RunConfig {
    pub fn initial_state(&self) -> Result<State, ConfigError> {
        consistent_init(&self.params, &self.law, self.x0, self.fd0, self.v0)
            .map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    /// Reference configuration of one scenario.
    pub fn paper(id: ScenarioId) -> Self {
        let mut map = ConfigMap::default();
        map.set("paper_defaults", "true").expect("known key");
        map.set("scenario", id.name()).expect("known key");
        Self::from_map(&map).expect("reference configuration is valid")
    }

    pub fn from_map(map: &ConfigMap) -> Result<Self, ConfigError> {
        let paper = map.bool("paper_defaults")?.unwrap_or(false);
        let scenario = map
            .get("scenario")
            .map(|s| s.parse::<ScenarioId>().map_err(ConfigError::Invalid))
            .transpose()?;
        if scenario.is_some() && !paper {
            return Err(ConfigError::Invalid("`scenario` requires paper_defaults = true".into()));
        }

        let require = |key: &'static str, fallback: f64| -> Result<f64, ConfigError> {
            match map.f64(key)? {
                Some(v) => Ok(v),
                None if paper => Ok(fallback),
                None => Err(ConfigError::Missing(key)),
            }
        };

        let m = require("m", PAPER_MASS)?;
        let k = require("k", PAPER_STIFFNESS)?;
        let params = SystemParams::new(m, k).map_err(|e| ConfigError::Invalid(e.to_string()))?;

        let law_spec = match map.get("law").unwrap_or("bingham") {
            "bingham" => {
                if map.get("c").is_some() {
                    return Err(ConfigError::Invalid("`c` only applies to law = linear".into()));
                }
                LawSpec::Bingham { gamma: require("gamma", PAPER_GAMMA)?, threshold: require("threshold", PAPER_THRESHOLD)? }
            }
            "linear" => {
                if map.get("gamma").is_some() || map.get("threshold").is_some() {
                    return Err(ConfigError::Invalid("`gamma`/`threshold` only apply to law = bingham".into()));
                }
                LawSpec::Linear { c: map.f64("c")?.ok_or(ConfigError::Missing("c"))? }
            }
            other => {
                return Err(ConfigError::BadValue {
                    key: "law".into(),
                    value: other.into(),
                    expected: "bingham or linear",
                })
            }
        };
        let law = law_spec.build()?;

        let forcing = forcing_from_map(map, scenario)?;
        let x0 = match map.f64("x0")? {
            Some(v) => v,
            None => scenario.map_or(0.0, |s| s.initial_displacement()),
        };
        let v0 = map.f64("v0")?;
        let fd0 = match map.f64("fd0")? {
            Some(v) => Some(v),
            None if v0.is_none() => Some(0.0),
            None => None,
        };
        let dt = map.f64("dt")?.unwrap_or(PAPER_DT);
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(ConfigError::Invalid(format!("dt must be > 0 (got {dt})")));
        }
        let t_end = match map.f64("t_end")? {
            Some(v) => v,
            None => scenario.map_or(2.0, |s| s.default_t_end()),
        };
        if !(t_end >= 0.0) || !t_end.is_finite() {
            return Err(ConfigError::Invalid(format!("t_end must be >= 0 (got {t_end})")));
        }
        let output = OutputPaths {
            csv: map.get("output.csv").map(PathBuf::from),
            report: map.get("output.report").map(PathBuf::from),
            plots: map.get("output.plots").map(PathBuf::from),
        };

        let config = Self {
            name: scenario.map_or_else(|| "run".to_string(), |s| s.name().to_string()),
            scenario,
            params,
            law_spec,
            law,
            forcing,
            x0,
            fd0,
            v0,
            dt,
            t_end,
            pure_coulomb: map.bool("naive.pure_coulomb")?.unwrap_or(false),
            output,
        };
        config.initial_state()?;
        Ok(config)
    }
}

fn forcing_from_map(map: &ConfigMap, scenario: Option<ScenarioId>) -> Result<Forcing, ConfigError> {
    let invalid = |e: bingham_dae::forcing::ForcingError| ConfigError::Invalid(e.to_string());
    let kind = match map.get("forcing.type") {
        Some(k) => k.to_string(),
        None => match scenario.map(|s| s.forcing()) {
            // Scenario forcing, possibly with overridden parameters below.
            Some(Forcing::WindowedSinusoid { .. }) => "sinusoid".into(),
            Some(_) | None if map.get("forcing.amplitude").is_some() => "sinusoid".into(),
            _ => "zero".into(),
        },
    };
    let base = scenario.map(|s| s.forcing());
    match kind.as_str() {
        "zero" => Ok(Forcing::Zero),
        "constant" => Ok(Forcing::Constant {
            value: map.f64("forcing.value")?.ok_or(ConfigError::Missing("forcing.value"))?,
        }),
        "sinusoid" => {
            let (a0, w0, t0) = match base {
                Some(Forcing::WindowedSinusoid { amplitude, omega, t_end }) => (Some(amplitude), Some(omega), Some(t_end)),
                _ => (None, None, None),
            };
            let amplitude = map.f64("forcing.amplitude")?.or(a0).ok_or(ConfigError::Missing("forcing.amplitude"))?;
            let omega = match (map.f64("forcing.omega")?, map.f64("forcing.frequency")?) {
                (Some(_), Some(_)) => {
                    return Err(ConfigError::Invalid("give forcing.omega or forcing.frequency, not both".into()))
                }
                (Some(w), None) => w,
                (None, Some(f)) => 2.0 * PI * f,
                (None, None) => w0.ok_or(ConfigError::Missing("forcing.omega"))?,
            };
            let t_end = map.f64("forcing.t_end")?.or(t0).unwrap_or(f64::INFINITY);
            Forcing::windowed_sinusoid(amplitude, omega, t_end).map_err(invalid)
        }
        "tabulated" => {
            let raw = map.get("forcing.samples").ok_or(ConfigError::Missing("forcing.samples"))?;
            let samples = raw
                .split(',')
                .map(|pair| {
                    let bad = || ConfigError::BadValue {
                        key: "forcing.samples".into(),
                        value: pair.trim().into(),
                        expected: "t:F",
                    };
                    let (t, f) = pair.split_once(':').ok_or_else(bad)?;
                    Ok((t.trim().parse().map_err(|_| bad())?, f.trim().parse().map_err(|_| bad())?))
                })
                .collect::<Result<Vec<(f64, f64)>, ConfigError>>()?;
            Forcing::tabulated(samples).map_err(invalid)
        }
        other => Err(ConfigError::BadValue {
            key: "forcing.type".into(),
            value: other.into(),
            expected: "zero, constant, sinusoid or tabulated",
        }),
    }
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    RunConfig::from_map(&ConfigMap::parse(text)?)
}
