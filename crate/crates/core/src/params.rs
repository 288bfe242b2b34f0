//! Piecewise-constant schedules and hyper-parameter bookkeeping.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vector::Vector;

/// A value that changes at discrete steps. Segments are left-closed: the
/// value at `t` is the value of the last segment whose start is `<= t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(usize, T)>", into = "Vec<(usize, T)>")]
#[serde(bound(
    serialize = "T: Clone + Serialize",
    deserialize = "T: Deserialize<'de>"
))]
pub struct Schedule<T> {
    segments: Vec<(usize, T)>,
}

pub type ParamSchedule = Schedule<f64>;
pub type VectorSchedule = Schedule<Vector>;

impl<T> Schedule<T> {
    pub fn new(segments: Vec<(usize, T)>) -> Result<Self> {
        match segments.first() {
            None => return Err(Error::InvalidSchedule("no segments".into())),
            Some((start, _)) if *start != 0 => {
                return Err(Error::InvalidSchedule(format!(
                    "first segment starts at {start}, expected 0"
                )))
            }
            _ => {}
        }
        if let Some(w) = segments.windows(2).find(|w| w[0].0 >= w[1].0) {
            return Err(Error::InvalidSchedule(format!(
                "segment starts not strictly increasing ({} then {})",
                w[0].0, w[1].0
            )));
        }
        Ok(Schedule { segments })
    }

    pub fn constant(value: T) -> Self {
        Schedule {
            segments: vec![(0, value)],
        }
    }

    pub fn at(&self, t: usize) -> &T {
        // partition_point finds the first segment starting after t; the
        // invariant (first start = 0) makes idx >= 1.
        let idx = self.segments.partition_point(|(start, _)| *start <= t);
        &self.segments[idx - 1].1
    }

    pub fn segments(&self) -> &[(usize, T)] {
        &self.segments
    }

    /// Steps at which the value changes (all starts except 0).
    pub fn switch_times(&self) -> impl Iterator<Item = usize> + '_ {
        self.segments.iter().skip(1).map(|(s, _)| *s)
    }

    pub fn values(&self) -> impl Iterator<Item = &T> + '_ {
        self.segments.iter().map(|(_, v)| v)
    }
}

impl<T> TryFrom<Vec<(usize, T)>> for Schedule<T> {
    type Error = Error;
    fn try_from(segments: Vec<(usize, T)>) -> Result<Self> {
        Schedule::new(segments)
    }
}

impl<T: Clone> From<Schedule<T>> for Vec<(usize, T)> {
    fn from(s: Schedule<T>) -> Self {
        s.segments
    }
}

impl Schedule<f64> {
    pub fn value_at(&self, t: usize) -> f64 {
        *self.at(t)
    }

    pub fn min_value(&self) -> f64 {
        self.values().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Free design parameters of the tuner at a single step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HtHyperParams {
    pub gamma: f64,
    pub mu: f64,
    pub beta: f64,
    /// Upper bound on the smoothness of the objective at this step.
    pub normalizer: f64,
}

impl HtHyperParams {
    pub fn new(gamma: f64, mu: f64, beta: f64, normalizer: f64) -> Self {
        HtHyperParams {
            gamma,
            mu,
            beta,
            normalizer,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidHyperParameter(msg));
        if !(self.normalizer > 0.0 && self.normalizer.is_finite()) {
            return bad(format!("normalizer must be > 0, got {}", self.normalizer));
        }
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return bad(format!("gamma must be >= 0, got {}", self.gamma));
        }
        if !(self.mu > 0.0 && self.mu <= 1.0) {
            return bad(format!("mu must lie in (0, 1], got {}", self.mu));
        }
        if !(0.0..=1.0).contains(&self.beta) {
            return bad(format!("beta must lie in [0, 1], got {}", self.beta));
        }
        Ok(())
    }

    /// `(alpha, eta) = (mu / N, gamma / N)`.
    pub fn derived_rates(&self) -> Result<(f64, f64)> {
        derived_rates(self)
    }

    pub fn beta_bar(&self) -> f64 {
        1.0 - self.beta
    }

    pub fn mu_bar(&self) -> f64 {
        1.0 - self.mu
    }
}

pub fn derived_rates(h: &HtHyperParams) -> Result<(f64, f64)> {
    if !(h.normalizer > 0.0) {
        return Err(Error::InvalidHyperParameter(format!(
            "normalizer must be > 0, got {}",
            h.normalizer
        )));
    }
    Ok((h.mu / h.normalizer, h.gamma / h.normalizer))
}

pub fn schedule_at(schedule: &ParamSchedule, t: usize) -> f64 {
    schedule.value_at(t)
}

/// Parameters that appear only in the stability analysis, never in the
/// update itself.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalysisParams {
    pub lambda: f64,
    pub xi: f64,
    pub nu: f64,
    pub epsilon: f64,
}

impl AnalysisParams {
    /// `lambda = 1`, `xi = 1`: the boundedness-only setting used for the
    /// `gamma in [1, 1.5]` family.
    pub const BOUNDEDNESS: AnalysisParams = AnalysisParams {
        lambda: 1.0,
        xi: 1.0,
        nu: 0.5,
        epsilon: 1e-3,
    };

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidAnalysisParameter(msg));
        let eps = self.epsilon;
        if !(eps > 0.0 && eps < 0.5) {
            return bad(format!("epsilon must lie in (0, 0.5), got {eps}"));
        }
        // lambda = 1 is admitted: it still certifies boundedness, only the
        // convergence claim needs lambda <= 1 - epsilon.
        if !(0.0..=1.0).contains(&self.lambda) {
            return bad(format!("lambda must lie in [0, 1], got {}", self.lambda));
        }
        if !(self.xi >= eps && self.xi.is_finite()) {
            return bad(format!("xi must be >= epsilon, got {}", self.xi));
        }
        if !(self.nu >= eps && self.nu <= 1.0 - eps) {
            return bad(format!(
                "nu must lie in [epsilon, 1 - epsilon], got {}",
                self.nu
            ));
        }
        Ok(())
    }

    pub fn guarantees_convergence(&self) -> bool {
        self.lambda <= 1.0 - self.epsilon
    }
}

impl Default for AnalysisParams {
    fn default() -> Self {
        AnalysisParams::BOUNDEDNESS
    }
}
