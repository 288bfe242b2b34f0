//! JSON experiment configuration.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objectives::{DiagonalQuadratic, LogSumExpObjective, Objective, SwitchingRegression};
use crate::optimizers::{AdagradConfig, AdamConfig};
use crate::params::{AnalysisParams, HtHyperParams, ParamSchedule, VectorSchedule};
use crate::vector::Vector;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ObjectiveSpec {
    LogSumExp {
        a: ParamSchedule,
        b: ParamSchedule,
        c: ParamSchedule,
    },
    Regression {
        data: VectorSchedule,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        optimum: Option<Vector>,
    },
    Quadratic {
        weights: Vector,
        center: VectorSchedule,
    },
}

impl ObjectiveSpec {
    pub fn build(&self) -> Result<Objective> {
        Ok(match self {
            ObjectiveSpec::LogSumExp { a, b, c } => {
                Objective::LogSumExp(LogSumExpObjective::new(a.clone(), b.clone(), c.clone())?)
            }
            ObjectiveSpec::Regression { data, optimum } => {
                Objective::Regression(SwitchingRegression::new(data.clone(), optimum.clone())?)
            }
            ObjectiveSpec::Quadratic { weights, center } => {
                Objective::Quadratic(DiagonalQuadratic::new(weights.clone(), center.clone())?)
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormalizerRule {
    /// Track the objective's smoothness bound at every step.
    Smoothness,
}

/// Either an explicit schedule or `"smoothness"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Normalizer {
    Schedule(ParamSchedule),
    Rule(NormalizerRule),
}

impl Normalizer {
    pub fn fixed(n: f64) -> Self {
        Normalizer::Schedule(ParamSchedule::constant(n))
    }

    pub fn at(&self, t: usize, smoothness: impl Fn(usize) -> f64) -> f64 {
        match self {
            Normalizer::Schedule(s) => s.value_at(t),
            Normalizer::Rule(NormalizerRule::Smoothness) => smoothness(t),
        }
    }

    fn validate(&self, who: &str) -> Result<()> {
        if let Normalizer::Schedule(s) = self {
            if s.values().any(|n| !(*n > 0.0 && n.is_finite())) {
                return Err(Error::Config(format!("{who}: normalizer values must be > 0")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OptimizerKind {
    Ht {
        gamma: ParamSchedule,
        mu: ParamSchedule,
        beta: ParamSchedule,
        normalizer: Normalizer,
        #[serde(default)]
        analysis: AnalysisParams,
    },
    /// Two-gradient step with constant `gamma, beta`.
    LegacyHt {
        gamma: f64,
        beta: f64,
        normalizer: Normalizer,
    },
    Gd {
        normalizer: Normalizer,
    },
    /// Nesterov schedule, `k = t + 1`.
    Nagd {
        normalizer: Normalizer,
        #[serde(default)]
        analysis: AnalysisParams,
    },
    Adagrad(AdagradConfig),
    Adam(AdamConfig),
}

impl OptimizerKind {
    pub fn label(&self) -> &'static str {
        match self {
            OptimizerKind::Ht { .. } => "ht",
            OptimizerKind::LegacyHt { .. } => "legacy_ht",
            OptimizerKind::Gd { .. } => "gd",
            OptimizerKind::Nagd { .. } => "nagd",
            OptimizerKind::Adagrad(_) => "adagrad",
            OptimizerKind::Adam(_) => "adam",
        }
    }

    /// Hyper-parameters at step `t` for the kinds that are tuner instances.
    pub fn hyper_at(&self, t: usize, smoothness: impl Fn(usize) -> f64) -> Option<HtHyperParams> {
        match self {
            OptimizerKind::Ht {
                gamma,
                mu,
                beta,
                normalizer,
                ..
            } => Some(HtHyperParams::new(
                gamma.value_at(t),
                mu.value_at(t),
                beta.value_at(t),
                normalizer.at(t, smoothness),
            )),
            OptimizerKind::Gd { normalizer } => Some(HtHyperParams::new(1.0, 1.0, 1.0, normalizer.at(t, smoothness))),
            OptimizerKind::Nagd { normalizer, .. } => {
                Some(crate::optimizers::nagd_hyper(t + 1, normalizer.at(t, smoothness)))
            }
            _ => None,
        }
    }

    pub fn analysis(&self) -> AnalysisParams {
        match self {
            OptimizerKind::Ht { analysis, .. } | OptimizerKind::Nagd { analysis, .. } => *analysis,
            _ => AnalysisParams::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerSpec {
    pub name: String,
    #[serde(flatten)]
    pub kind: OptimizerKind,
    /// `x_0`, and `y_0 = z_0 = x_0` for the tuner kinds unless `init_z` is given.
    pub init: Vector,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub init_z: Option<Vector>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Monitors {
    pub lyapunov: bool,
    pub certificate: bool,
    pub regret: bool,
}

impl Default for Monitors {
    fn default() -> Self {
        Monitors {
            lyapunov: true,
            certificate: true,
            regret: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub objective: ObjectiveSpec,
    pub optimizers: Vec<OptimizerSpec>,
    pub horizon: usize,
    #[serde(default)]
    pub monitors: Monitors,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Builds the objective and checks every optimizer against it.
    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        if self.horizon == 0 {
            return Err(Error::Config("horizon must be >= 1".into()));
        }
        if self.optimizers.is_empty() {
            return Err(Error::Config("no optimizers".into()));
        }
        let obj = self.objective.build().map_err(|e| Error::Config(e.to_string()))?;
        let dim = crate::objectives::TimeVaryingObjective::dim(&obj);
        let mut seen = HashSet::new();
        for o in &self.optimizers {
            if o.name.is_empty() || o.name.contains([',', '"', '\n']) {
                return Err(Error::Config(format!("bad optimizer name {:?}", o.name)));
            }
            if !seen.insert(o.name.as_str()) {
                return Err(Error::Config(format!("duplicate optimizer name `{}`", o.name)));
            }
            let who = o.name.as_str();
            let dims_ok = o.init.dim() == dim && o.init_z.as_ref().is_none_or(|z| z.dim() == dim);
            if !dims_ok {
                return Err(Error::Config(format!("{who}: init has the wrong dimension (objective is {dim}-d)")));
            }
            if !o.init.is_finite() || o.init_z.as_ref().is_some_and(|z| !z.is_finite()) {
                return Err(Error::Config(format!("{who}: non-finite init")));
            }
            validate_kind(who, &o.kind)?;
        }
        Ok(())
    }
}

fn validate_kind(who: &str, kind: &OptimizerKind) -> Result<()> {
    let bad = |msg: &str| Err(Error::Config(format!("{who}: {msg}")));
    match kind {
        OptimizerKind::Ht {
            gamma,
            mu,
            beta,
            normalizer,
            analysis,
        } => {
            normalizer.validate(who)?;
            if gamma.values().any(|g| !(*g >= 0.0 && g.is_finite())) {
                return bad("gamma must be >= 0");
            }
            if mu.values().any(|m| !(*m > 0.0 && *m <= 1.0)) {
                return bad("mu must lie in (0, 1]");
            }
            if beta.values().any(|b| !(0.0..=1.0).contains(b)) {
                return bad("beta must lie in [0, 1]");
            }
            analysis.validate().map_err(|e| Error::Config(format!("{who}: {e}")))?;
        }
        OptimizerKind::LegacyHt {
            gamma,
            beta,
            normalizer,
        } => {
            normalizer.validate(who)?;
            if !(*gamma > 0.0 && gamma.is_finite()) || !(0.0..=1.0).contains(beta) {
                return bad("legacy_ht needs gamma > 0 and beta in [0, 1]");
            }
        }
        OptimizerKind::Gd { normalizer } => normalizer.validate(who)?,
        OptimizerKind::Nagd { normalizer, analysis } => {
            normalizer.validate(who)?;
            analysis.validate().map_err(|e| Error::Config(format!("{who}: {e}")))?;
        }
        OptimizerKind::Adagrad(c) => {
            if !(c.alpha > 0.0 && c.eps > 0.0) {
                return bad("adagrad needs alpha > 0 and eps > 0");
            }
        }
        OptimizerKind::Adam(c) => {
            if !(c.alpha > 0.0 && c.eps >= 0.0) || !(0.0..1.0).contains(&c.beta1) || !(0.0..1.0).contains(&c.beta2) {
                return bad("adam needs alpha > 0, eps >= 0 and beta1, beta2 in [0, 1)");
            }
        }
    }
    Ok(())
}
