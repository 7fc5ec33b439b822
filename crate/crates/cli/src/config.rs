//! Scenario configuration: a flat TOML document, overlaid with command-line
//! flags, validated into a [`ScenarioConfig`].
//!
//! ```toml
//! model = "oun"              # oun | collective (required)
//! initial = "bell-psi-plus"  # bell-psi-plus | g1e2
//! measure = "entanglement"   # entanglement | discord
//! kappa = 1.0                # oun: coupling strength
//! lambda = 0.1               # oun: inverse correlation time
//! lambda_ratio = 0.1         # oun: lambda = lambda_ratio * kappa (excludes lambda)
//! Lambda = 1.0               # collective: emission rate
//! Lambda12 = 0.95            # collective: collective damping
//! M12 = 4.65                 # collective: dipole-dipole coupling
//! omega = 0.0                # collective: transition frequency
//! tau = 1.0                  # driving time
//! steps = 2000               # RK4 steps; default 2000 per unit of tau
//! sweep_param = "kappa"      # optional sweep stanza
//! sweep_from = 0.5
//! sweep_to = 10.0
//! sweep_count = 50
//! ```

use serde::Deserialize;

use qslcorr::channels::{Channel, CollectiveParams, OunParams};
use qslcorr::dynamics::default_steps;
use qslcorr::qsl::{Measure, Scenario};
use qslcorr::states::InitialState;

use crate::error::CliError;

/// Every key of the document; all optional until validation.
#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub model: Option<String>,
    pub initial: Option<String>,
    pub measure: Option<String>,
    pub kappa: Option<f64>,
    pub lambda: Option<f64>,
    pub lambda_ratio: Option<f64>,
    #[serde(rename = "Lambda")]
    pub emission: Option<f64>,
    #[serde(rename = "Lambda12")]
    pub collective_damping: Option<f64>,
    #[serde(rename = "M12")]
    pub dipole_coupling: Option<f64>,
    pub omega: Option<f64>,
    pub tau: Option<f64>,
    pub steps: Option<i64>,
    pub sweep_param: Option<String>,
    pub sweep_from: Option<f64>,
    pub sweep_to: Option<f64>,
    pub sweep_count: Option<i64>,
}

macro_rules! overlay_fields {
    ($dst:ident, $src:ident, $($f:ident),*) => {
        $( if $src.$f.is_some() { $dst.$f = $src.$f.clone(); } )*
    };
}

impl RawConfig {
    /// Fields set in `other` replace the ones in `self`.
    pub fn overlay(mut self, other: &RawConfig) -> RawConfig {
        overlay_fields!(
            self, other, model, initial, measure, kappa, lambda, lambda_ratio, emission,
            collective_damping, dipole_coupling, omega, tau, steps, sweep_param, sweep_from,
            sweep_to, sweep_count
        );
        self
    }
}

/// Parses a config document without validating it.
pub fn parse_raw(text: &str) -> Result<RawConfig, CliError> {
    toml::from_str(text).map_err(|e| {
        let line = e.span().map_or(1, |s| text[..s.start.min(text.len())].lines().count().max(1));
        let line = match e.span() {
            Some(s) if text[..s.start.min(text.len())].ends_with('\n') => line + 1,
            _ => line,
        };
        CliError::Parse { line, message: e.message().trim().to_string() }
    })
}

/// Parses and validates a config document, filling defaults.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, CliError> {
    ScenarioConfig::from_raw(&parse_raw(text)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Model {
    Oun,
    Collective,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepParam {
    Kappa,
    Lambda,
    Emission,
    CollectiveDamping,
    DipoleCoupling,
    Omega,
    Tau,
}

impl SweepParam {
    pub fn parse(name: &str) -> Result<Self, CliError> {
        Ok(match name {
            "kappa" => SweepParam::Kappa,
            "lambda" => SweepParam::Lambda,
            "Lambda" => SweepParam::Emission,
            "Lambda12" => SweepParam::CollectiveDamping,
            "M12" => SweepParam::DipoleCoupling,
            "omega" => SweepParam::Omega,
            "tau" => SweepParam::Tau,
            other => {
                return Err(CliError::Validation(format!(
                    "unknown sweep parameter '{other}' (expected kappa, lambda, Lambda, Lambda12, M12, omega or tau)"
                )))
            }
        })
    }

    fn applies_to(self, model: Model) -> bool {
        match self {
            SweepParam::Tau => true,
            SweepParam::Kappa | SweepParam::Lambda => model == Model::Oun,
            _ => model == Model::Collective,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sweep {
    pub param: SweepParam,
    pub from: f64,
    pub to: f64,
    pub count: usize,
}

impl Sweep {
    /// `count` evenly spaced values from `from` to `to`, both included.
    pub fn values(&self) -> Vec<f64> {
        let n = self.count - 1;
        (0..self.count)
            .map(|j| if j == n { self.to } else { self.from + (self.to - self.from) * j as f64 / n as f64 })
            .collect()
    }
}

/// The dephasing rate λ, given directly or as a multiple of κ.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LambdaSpec {
    Fixed(f64),
    RatioToKappa(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioConfig {
    pub model: Model,
    pub initial: InitialState,
    pub measure: Measure,
    pub kappa: f64,
    pub lambda: LambdaSpec,
    pub collective: CollectiveParams,
    pub tau: f64,
    /// Explicit step count; otherwise 2000 per unit of `tau`.
    pub steps: Option<usize>,
    pub sweep: Option<Sweep>,
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

fn finite(name: &str, v: f64) -> Result<f64, CliError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(invalid(format!("{name} must be finite, got {v}")))
    }
}

impl ScenarioConfig {
    pub fn from_raw(raw: &RawConfig) -> Result<Self, CliError> {
        let model = match raw.model.as_deref() {
            Some("oun") => Model::Oun,
            Some("collective") => Model::Collective,
            Some(other) => return Err(invalid(format!("model must be 'oun' or 'collective', got '{other}'"))),
            None => return Err(invalid("model is required")),
        };
        let initial = match raw.initial.as_deref().unwrap_or("bell-psi-plus") {
            "bell-psi-plus" => InitialState::BellPsiPlus,
            "g1e2" => InitialState::G1E2,
            other => return Err(invalid(format!("initial must be 'bell-psi-plus' or 'g1e2', got '{other}'"))),
        };
        let measure = match raw.measure.as_deref().unwrap_or("entanglement") {
            "entanglement" => Measure::Entanglement,
            "discord" => Measure::Discord,
            other => return Err(invalid(format!("measure must be 'entanglement' or 'discord', got '{other}'"))),
        };
        if model == Model::Collective && measure == Measure::Discord {
            return Err(invalid("UnsupportedScenario: the discord bound is not available for the collective model"));
        }
        if model == Model::Oun && initial == InitialState::G1E2 {
            return Err(invalid("UnsupportedScenario: the oun model needs initial = 'bell-psi-plus'"));
        }

        let lambda = match (raw.lambda, raw.lambda_ratio) {
            (Some(_), Some(_)) => return Err(invalid("set either lambda or lambda_ratio, not both")),
            (Some(l), None) => LambdaSpec::Fixed(finite("lambda", l)?),
            (None, Some(r)) => LambdaSpec::RatioToKappa(finite("lambda_ratio", r)?),
            (None, None) => LambdaSpec::Fixed(0.1),
        };
        let reference = CollectiveParams::reference();
        let collective = CollectiveParams {
            emission: finite("Lambda", raw.emission.unwrap_or(reference.emission))?,
            collective_damping: finite("Lambda12", raw.collective_damping.unwrap_or(reference.collective_damping))?,
            dipole_coupling: finite("M12", raw.dipole_coupling.unwrap_or(reference.dipole_coupling))?,
            frequency: finite("omega", raw.omega.unwrap_or(reference.frequency))?,
        };
        let tau = finite("tau", raw.tau.unwrap_or(1.0))?;
        if tau <= 0.0 {
            return Err(invalid(format!("tau must be positive, got {tau}")));
        }
        let steps = match raw.steps {
            None => None,
            Some(n) if n >= 10 && n % 2 == 0 => Some(n as usize),
            Some(n) => return Err(invalid(format!("steps must be an even integer >= 10, got {n}"))),
        };

        let sweep = match (&raw.sweep_param, raw.sweep_from, raw.sweep_to, raw.sweep_count) {
            (None, None, None, None) => None,
            (Some(p), Some(from), Some(to), Some(count)) => {
                let param = SweepParam::parse(p)?;
                if !param.applies_to(model) {
                    return Err(invalid(format!("sweep parameter '{p}' does not apply to this model")));
                }
                if count < 2 {
                    return Err(invalid(format!("sweep_count must be at least 2, got {count}")));
                }
                Some(Sweep {
                    param,
                    from: finite("sweep_from", from)?,
                    to: finite("sweep_to", to)?,
                    count: count as usize,
                })
            }
            _ => return Err(invalid("sweep needs all of sweep_param, sweep_from, sweep_to and sweep_count")),
        };

        let config = ScenarioConfig {
            model,
            initial,
            measure,
            kappa: finite("kappa", raw.kappa.unwrap_or(1.0))?,
            lambda,
            collective,
            tau,
            steps,
            sweep,
        };
        config.scenario()?;
        if let Some(s) = config.sweep {
            for v in s.values() {
                config.with_value(s.param, v).scenario()?;
            }
        }
        Ok(config)
    }

    pub fn lambda(&self) -> f64 {
        match self.lambda {
            LambdaSpec::Fixed(l) => l,
            LambdaSpec::RatioToKappa(r) => r * self.kappa,
        }
    }

    pub fn steps(&self) -> usize {
        self.steps.unwrap_or_else(|| default_steps(self.tau))
    }

    /// A copy with one parameter replaced.
    pub fn with_value(&self, param: SweepParam, value: f64) -> ScenarioConfig {
        let mut c = self.clone();
        match param {
            SweepParam::Kappa => c.kappa = value,
            SweepParam::Lambda => c.lambda = LambdaSpec::Fixed(value),
            SweepParam::Emission => c.collective.emission = value,
            SweepParam::CollectiveDamping => c.collective.collective_damping = value,
            SweepParam::DipoleCoupling => c.collective.dipole_coupling = value,
            SweepParam::Omega => c.collective.frequency = value,
            SweepParam::Tau => c.tau = value,
        }
        c
    }

    /// The core scenario, with channel parameters validated.
    pub fn scenario(&self) -> Result<Scenario, CliError> {
        let channel = match self.model {
            Model::Oun => Channel::Oun(OunParams::new(self.kappa, self.lambda()).map_err(|e| invalid(e.to_string()))?),
            Model::Collective => {
                let p = self.collective;
                Channel::Collective(
                    CollectiveParams::new(p.emission, p.collective_damping, p.dipole_coupling, p.frequency)
                        .map_err(|e| invalid(e.to_string()))?,
                )
            }
        };
        if !(self.tau.is_finite() && self.tau > 0.0) {
            return Err(invalid(format!("tau must be positive, got {}", self.tau)));
        }
        Ok(Scenario { channel, initial: self.initial, measure: self.measure, tau: self.tau, steps: self.steps() })
    }
}
