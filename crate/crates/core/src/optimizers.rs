//! Step functions: the high-order tuner, its two-gradient predecessor, and
//! the GD / Nesterov / Adagrad / Adam baselines. Every step is a pure
//! transition from one state value to the next.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objectives::TimeVaryingObjective;
use crate::params::HtHyperParams;
use crate::vector::{check_dim, Vector};

/// Iterates whose sup-norm exceeds this are treated as diverged.
pub const DIVERGENCE_LIMIT: f64 = 1e8;

pub(crate) fn guard(t: usize, v: &Vector) -> Result<()> {
    if v.is_finite() && v.norm_inf() <= DIVERGENCE_LIMIT {
        Ok(())
    } else {
        Err(Error::Divergence {
            t,
            state: v.clone(),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HtState {
    pub y: Vector,
    pub z: Vector,
    /// The point emitted by the most recent step.
    pub last_x: Option<Vector>,
}

impl HtState {
    pub fn new(y: Vector, z: Vector) -> Result<Self> {
        check_dim(y.dim(), z.dim())?;
        Ok(HtState { y, z, last_x: None })
    }

    /// `y_0 = z_0 = x_0`.
    pub fn at(x0: Vector) -> Self {
        HtState {
            y: x0.clone(),
            z: x0,
            last_x: None,
        }
    }

    /// `x = beta z + (1 - beta) y`.
    pub fn query_point(&self, beta: f64) -> Vector {
        Vector::blend(beta, &self.z, &self.y)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HtStep {
    pub next: HtState,
    /// `x_t`, the point at which the gradient was taken.
    pub x: Vector,
    pub grad: Vector,
}

/// One tuner step at time `t`:
///
/// ```text
/// x_t     = beta z_t + (1 - beta) y_t
/// y_{t+1} = x_t - (mu / N) grad f_t(x_t)
/// z_{t+1} = z_t - (gamma / N) grad f_t(x_t)
/// ```
///
/// One gradient evaluation per call.
pub fn ht_step<O: TimeVaryingObjective + ?Sized>(
    state: &HtState,
    t: usize,
    obj: &O,
    h: &HtHyperParams,
) -> Result<HtStep> {
    h.validate()?;
    check_dim(obj.dim(), state.y.dim())?;
    check_dim(state.y.dim(), state.z.dim())?;
    let (alpha, eta) = h.derived_rates()?;
    let x = state.query_point(h.beta);
    guard(t, &x)?;
    let g = obj.grad(t, &x)?;
    if !g.is_finite() {
        return Err(Error::Divergence { t, state: x });
    }
    let y = x.step(alpha, &g);
    let z = state.z.step(eta, &g);
    guard(t, &y)?;
    guard(t, &z)?;
    Ok(HtStep {
        next: HtState {
            y,
            z,
            last_x: Some(x.clone()),
        },
        x,
        grad: g,
    })
}

/// The earlier discretization with constant `gamma, beta`, which queries the
/// gradient at two time indices:
///
/// ```text
/// y_{t+1} = x_t - (gamma beta / N_t) grad f_{t+1}(x_t)
/// z_{t+1} = z_t - (gamma / N_t) grad f_t(x_t)
/// ```
pub fn legacy_ht_step<O: TimeVaryingObjective + ?Sized>(
    state: &HtState,
    t: usize,
    obj: &O,
    gamma: f64,
    beta: f64,
    normalizer_t: f64,
) -> Result<HtStep> {
    if !(normalizer_t > 0.0) {
        return Err(Error::InvalidHyperParameter(format!(
            "normalizer must be > 0, got {normalizer_t}"
        )));
    }
    if !(gamma > 0.0) || !(0.0..=1.0).contains(&beta) {
        return Err(Error::InvalidHyperParameter(format!(
            "legacy step needs gamma > 0 and beta in [0, 1], got gamma={gamma}, beta={beta}"
        )));
    }
    check_dim(obj.dim(), state.y.dim())?;
    check_dim(state.y.dim(), state.z.dim())?;
    let x = state.query_point(beta);
    guard(t, &x)?;
    let g_next = obj.grad(t + 1, &x)?;
    let g_now = obj.grad(t, &x)?;
    if !g_next.is_finite() || !g_now.is_finite() {
        return Err(Error::Divergence { t, state: x });
    }
    let y = x.step(gamma * beta / normalizer_t, &g_next);
    let z = state.z.step(gamma / normalizer_t, &g_now);
    guard(t, &y)?;
    guard(t, &z)?;
    Ok(HtStep {
        next: HtState {
            y,
            z,
            last_x: Some(x.clone()),
        },
        x,
        grad: g_now,
    })
}

/// Largest admissible `gamma` for the legacy step: `beta(2 - beta) / (16 + beta^2)`.
pub fn legacy_gamma_cap(beta: f64) -> f64 {
    beta * (2.0 - beta) / (16.0 + beta * beta)
}

/// Lyapunov function paired with the legacy step:
/// `(|z - x*|^2 + |z - x|^2) / gamma`.
pub fn legacy_lyapunov(z: &[f64], x: &[f64], xstar: &[f64], gamma: f64) -> f64 {
    let z = Vector::from(z);
    (z.dist_sq(xstar) + z.dist_sq(x)) / gamma
}

/// `x - grad f_t(x) / N`. Returns the next iterate and the gradient used.
pub fn gd_step<O: TimeVaryingObjective + ?Sized>(
    x: &Vector,
    t: usize,
    obj: &O,
    normalizer: f64,
) -> Result<(Vector, Vector)> {
    if !(normalizer > 0.0) {
        return Err(Error::InvalidHyperParameter(format!(
            "normalizer must be > 0, got {normalizer}"
        )));
    }
    check_dim(obj.dim(), x.dim())?;
    let g = obj.grad(t, x)?;
    // Same arithmetic as the tuner's y-update with mu = 1, so the two agree
    // bit for bit when beta = 1.
    let next = x.step(1.0 / normalizer, &g);
    guard(t, &next)?;
    Ok((next, g))
}

/// GD with the normalizer tracking the objective's current smoothness bound.
pub fn tn_gd_step<O: TimeVaryingObjective + ?Sized>(
    x: &Vector,
    t: usize,
    obj: &O,
) -> Result<(Vector, Vector)> {
    gd_step(x, t, obj, obj.smoothness_bound(t))
}

/// Nesterov parameters at index `k >= 1`: `mu = 1, gamma = k/2, beta = 2/(k+1)`.
pub fn nagd_hyper(k: usize, normalizer: f64) -> HtHyperParams {
    assert!(k >= 1, "the Nesterov schedule is singular at k = 0");
    let k = k as f64;
    HtHyperParams {
        gamma: k / 2.0,
        mu: 1.0,
        beta: 2.0 / (k + 1.0),
        normalizer,
    }
}

/// `nagd_hyper` for `k = 1..=horizon`.
pub fn nagd_schedule(horizon: usize, normalizer: f64) -> Vec<HtHyperParams> {
    (1..=horizon).map(|k| nagd_hyper(k, normalizer)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct AccumulatorState {
    pub x: Vector,
    /// Adagrad running sum of squared gradients.
    pub grad_sq_sum: Vector,
    /// Adam first moment.
    pub m: Vector,
    /// Adam second moment.
    pub v: Vector,
    pub step_count: usize,
}

impl AccumulatorState {
    pub fn new(x: Vector) -> Self {
        let d = x.dim();
        AccumulatorState {
            x,
            grad_sq_sum: Vector::zeros(d),
            m: Vector::zeros(d),
            v: Vector::zeros(d),
            step_count: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdagradConfig {
    pub alpha: f64,
    #[serde(default = "default_eps")]
    pub eps: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdamConfig {
    pub alpha: f64,
    #[serde(default = "default_beta1")]
    pub beta1: f64,
    #[serde(default = "default_beta2")]
    pub beta2: f64,
    #[serde(default = "default_eps")]
    pub eps: f64,
}

fn default_eps() -> f64 {
    1e-8
}
fn default_beta1() -> f64 {
    0.9
}
fn default_beta2() -> f64 {
    0.999
}

impl AdamConfig {
    pub fn with_alpha(alpha: f64) -> Self {
        AdamConfig {
            alpha,
            beta1: default_beta1(),
            beta2: default_beta2(),
            eps: default_eps(),
        }
    }
}

impl AdagradConfig {
    pub fn with_alpha(alpha: f64) -> Self {
        AdagradConfig {
            alpha,
            eps: default_eps(),
        }
    }
}

/// Adagrad: `x' = x - alpha g / (sqrt(sum g^2) + eps)`, componentwise, with
/// the current gradient included in the sum.
pub fn adagrad_step<O: TimeVaryingObjective + ?Sized>(
    s: &AccumulatorState,
    t: usize,
    obj: &O,
    cfg: &AdagradConfig,
) -> Result<(AccumulatorState, Vector)> {
    if !(cfg.alpha > 0.0 && cfg.eps > 0.0) {
        return Err(Error::InvalidHyperParameter(format!(
            "adagrad needs alpha, eps > 0, got {cfg:?}"
        )));
    }
    check_dim(obj.dim(), s.x.dim())?;
    let g = obj.grad(t, &s.x)?;
    let sum: Vector = s
        .grad_sq_sum
        .iter()
        .zip(g.iter())
        .map(|(acc, gi)| acc + gi * gi)
        .collect::<Vec<_>>()
        .into();
    let x: Vector = s
        .x
        .iter()
        .zip(g.iter().zip(sum.iter()))
        .map(|(xi, (gi, si))| xi - cfg.alpha * gi / (si.sqrt() + cfg.eps))
        .collect::<Vec<_>>()
        .into();
    guard(t, &x)?;
    Ok((
        AccumulatorState {
            x,
            grad_sq_sum: sum,
            m: s.m.clone(),
            v: s.v.clone(),
            step_count: s.step_count + 1,
        },
        g,
    ))
}

/// Adam with bias-corrected moments and the step size decayed as
/// `alpha / sqrt(k)`, where `k = step_count + 1` counts Adam steps from 1.
pub fn adam_step<O: TimeVaryingObjective + ?Sized>(
    s: &AccumulatorState,
    t: usize,
    obj: &O,
    cfg: &AdamConfig,
) -> Result<(AccumulatorState, Vector)> {
    if !(cfg.alpha > 0.0 && cfg.eps >= 0.0)
        || !(0.0..1.0).contains(&cfg.beta1)
        || !(0.0..1.0).contains(&cfg.beta2)
    {
        return Err(Error::InvalidHyperParameter(format!(
            "adam needs alpha > 0, eps >= 0 and betas in [0, 1), got {cfg:?}"
        )));
    }
    check_dim(obj.dim(), s.x.dim())?;
    let k = s.step_count + 1;
    let g = obj.grad(t, &s.x)?;
    let (b1, b2) = (cfg.beta1, cfg.beta2);
    let m: Vec<f64> = s.m.iter().zip(g.iter()).map(|(m, gi)| b1 * m + (1.0 - b1) * gi).collect();
    let v: Vec<f64> = s
        .v
        .iter()
        .zip(g.iter())
        .map(|(v, gi)| b2 * v + (1.0 - b2) * gi * gi)
        .collect();
    let c1 = 1.0 - b1.powi(k as i32);
    let c2 = 1.0 - b2.powi(k as i32);
    let rate = cfg.alpha / (k as f64).sqrt();
    let x: Vector = s
        .x
        .iter()
        .zip(m.iter().zip(v.iter()))
        .map(|(xi, (mi, vi))| {
            let m_hat = mi / c1;
            let v_hat = vi / c2;
            if m_hat == 0.0 {
                *xi
            } else {
                xi - rate * m_hat / (v_hat.sqrt() + cfg.eps)
            }
        })
        .collect::<Vec<_>>()
        .into();
    guard(t, &x)?;
    Ok((
        AccumulatorState {
            x,
            grad_sq_sum: s.grad_sq_sum.clone(),
            m: m.into(),
            v: v.into(),
            step_count: k,
        },
        g,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::{fd_gradient, DiagonalQuadratic, LogSumExpObjective, FD_STEP};

    fn lse(c: f64) -> LogSumExpObjective {
        LogSumExpObjective::constant(5.0, 7.0, c).unwrap()
    }

    #[test]
    fn ht_fixed_point_at_optimum() {
        let s = HtState::at(Vector::scalar(0.0));
        let h = HtHyperParams::new(1.5, 1.0, 2.0 / 3.0, 49.0);
        let out = ht_step(&s, 0, &lse(0.0), &h).unwrap();
        assert_eq!(out.x.as_slice(), &[0.0]);
        assert_eq!(out.next.y.as_slice(), &[0.0]);
        assert_eq!(out.next.z.as_slice(), &[0.0]);
    }

    #[test]
    fn ht_unit_gamma_collapses_to_gd() {
        let s = HtState::new(Vector::scalar(1.0), Vector::scalar(2.0)).unwrap();
        let h = HtHyperParams::new(1.0, 1.0, 1.0, 49.0);
        let out = ht_step(&s, 0, &lse(0.0), &h).unwrap();
        assert_eq!(out.x.as_slice(), &[2.0]);
        assert_eq!(out.next.y, out.next.z);
        let (gd, _) = gd_step(&Vector::scalar(2.0), 0, &lse(0.0), 49.0).unwrap();
        assert_eq!(out.next.z, gd);
    }

    #[test]
    fn ht_hand_evaluated_step() {
        let s = HtState::new(Vector::scalar(1.0), Vector::scalar(2.0)).unwrap();
        let h = HtHyperParams::new(1.5, 1.0, 2.0 / 3.0, 49.0);
        let obj = lse(0.0);
        let out = ht_step(&s, 0, &obj, &h).unwrap();
        assert!((out.x[0] - 5.0 / 3.0).abs() < 1e-12);
        assert!((out.grad[0] - 7.0).abs() < 1e-7);
        let fd = fd_gradient(&obj, 0, &out.x, FD_STEP).unwrap();
        assert!((fd[0] - out.grad[0]).abs() < 1e-6);
        assert!((out.next.y[0] - 1.523810).abs() < 1e-6);
        assert!((out.next.z[0] - 1.785714).abs() < 1e-6);
        assert_eq!(out.next.last_x.as_ref(), Some(&out.x));
    }

    #[test]
    fn ht_reports_divergence() {
        let s = HtState::at(Vector::scalar(f64::NAN));
        let h = HtHyperParams::new(1.0, 1.0, 1.0, 1.0);
        assert!(matches!(ht_step(&s, 4, &lse(0.0), &h), Err(Error::Divergence { t: 4, .. })));
        let s = HtState::at(Vector::scalar(2e8));
        assert!(matches!(ht_step(&s, 0, &lse(0.0), &h), Err(Error::Divergence { .. })));
    }

    #[test]
    fn ht_rejects_shape_mismatch() {
        let s = HtState::at(Vector::new(vec![1.0, 2.0]));
        let h = HtHyperParams::new(1.0, 1.0, 1.0, 1.0);
        assert!(matches!(ht_step(&s, 0, &lse(0.0), &h), Err(Error::Shape { .. })));
    }

    #[test]
    fn legacy_matches_ht_when_time_invariant() {
        let obj = lse(0.3);
        let (gamma, beta) = (0.04, 0.5);
        let mut a = HtState::new(Vector::scalar(1.0), Vector::scalar(-2.0)).unwrap();
        let mut b = a.clone();
        for t in 0..50 {
            let l = legacy_ht_step(&a, t, &obj, gamma, beta, 49.0).unwrap();
            let h = HtHyperParams::new(gamma, gamma * beta, beta, 49.0);
            let n = ht_step(&b, t, &obj, &h).unwrap();
            assert!((l.x[0] - n.x[0]).abs() < 1e-12);
            a = l.next;
            b = n.next;
        }
    }

    #[test]
    fn legacy_fixed_point() {
        let s = HtState::at(Vector::scalar(0.3));
        let out = legacy_ht_step(&s, 0, &lse(0.3), 0.04, 0.5, 49.0).unwrap();
        assert_eq!(out.next.y, s.y);
        assert_eq!(out.next.z, s.z);
    }

    #[test]
    fn legacy_cap_value() {
        assert!((legacy_gamma_cap(0.5) - 0.75 / 16.25).abs() < 1e-12);
        assert!((legacy_gamma_cap(0.5) - 0.046154).abs() < 1e-6);
    }

    #[test]
    fn gd_examples() {
        let (x, _) = gd_step(&Vector::scalar(0.0), 0, &lse(0.0), 49.0).unwrap();
        assert_eq!(x.as_slice(), &[0.0]);
        let q = DiagonalQuadratic::fixed(vec![49.0], vec![0.0]).unwrap();
        let (x, _) = gd_step(&Vector::scalar(1.0), 0, &q, 49.0).unwrap();
        assert!(x[0].abs() <= 1e-15);
        let (x, _) = gd_step(&Vector::scalar(5.0), 0, &lse(0.0), 49.0).unwrap();
        assert!((x[0] - 4.857143).abs() < 1e-6);
        assert!(gd_step(&Vector::scalar(5.0), 0, &lse(0.0), 0.0).is_err());
    }

    #[test]
    fn nagd_schedule_values() {
        let s = nagd_schedule(100, 49.0);
        assert_eq!((s[0].mu, s[0].gamma, s[0].beta), (1.0, 0.5, 1.0));
        assert_eq!((s[2].mu, s[2].gamma, s[2].beta), (1.0, 1.5, 0.5));
        assert_eq!(s[99].gamma, 50.0);
    }

    #[test]
    fn adagrad_first_step() {
        let q = DiagonalQuadratic::fixed(vec![1.0], vec![-2.0]).unwrap();
        let s = AccumulatorState::new(Vector::scalar(0.0));
        let (n, g) = adagrad_step(&s, 0, &q, &AdagradConfig::with_alpha(1.0)).unwrap();
        assert_eq!(g[0], 2.0);
        assert!((n.x[0] + 1.0).abs() < 1e-8);
        assert_eq!(n.grad_sq_sum[0], 4.0);
    }

    /// Constant-gradient objective.
    struct Slope(f64);
    impl TimeVaryingObjective for Slope {
        fn dim(&self) -> usize {
            1
        }
        fn value(&self, _t: usize, x: &[f64]) -> Result<f64> {
            Ok(self.0 * x[0])
        }
        fn grad(&self, _t: usize, _x: &[f64]) -> Result<Vector> {
            Ok(Vector::scalar(self.0))
        }
        fn smoothness_bound(&self, _t: usize) -> f64 {
            0.0
        }
    }

    #[test]
    fn adagrad_decays_as_inverse_sqrt() {
        let cfg = AdagradConfig { alpha: 1.0, eps: 0.0 + 1e-12 };
        let mut s = AccumulatorState::new(Vector::scalar(0.0));
        for k in 1..=100usize {
            let (n, _) = adagrad_step(&s, k, &Slope(3.0), &cfg).unwrap();
            let step = s.x[0] - n.x[0];
            assert!((step - 1.0 / (k as f64).sqrt()).abs() < 1e-9);
            s = n;
        }
    }

    #[test]
    fn zero_gradient_keeps_accumulator_methods_still() {
        let mut a = AccumulatorState::new(Vector::scalar(4.0));
        let mut b = a.clone();
        for t in 0..20 {
            a = adagrad_step(&a, t, &Slope(0.0), &AdagradConfig::with_alpha(1.0)).unwrap().0;
            b = adam_step(&b, t, &Slope(0.0), &AdamConfig::with_alpha(1.0)).unwrap().0;
        }
        assert_eq!(a.x[0], 4.0);
        assert_eq!(b.x[0], 4.0);
    }

    #[test]
    fn adam_first_step_is_alpha_sign() {
        let cfg = AdamConfig { eps: 0.0, ..AdamConfig::with_alpha(0.7) };
        let s = AccumulatorState::new(Vector::scalar(0.0));
        let (n, _) = adam_step(&s, 0, &Slope(-3.0), &cfg).unwrap();
        assert!((n.x[0] - 0.7).abs() < 1e-12);
        assert_eq!(n.step_count, 1);
    }

    #[test]
    fn adam_constant_gradient_step_tends_to_alpha_over_sqrt_k() {
        let cfg = AdamConfig { eps: 0.0, ..AdamConfig::with_alpha(1.0) };
        let mut s = AccumulatorState::new(Vector::scalar(0.0));
        for k in 1..=200usize {
            let (n, _) = adam_step(&s, k, &Slope(2.0), &cfg).unwrap();
            let step = s.x[0] - n.x[0];
            // Bias correction makes m_hat = g and v_hat = g^2 exactly for a
            // constant gradient.
            assert!((step - 1.0 / (k as f64).sqrt()).abs() < 1e-9, "k={k}");
            s = n;
        }
    }

    #[test]
    fn steps_are_deterministic() {
        let obj = lse(1.0);
        let s = HtState::new(Vector::scalar(3.0), Vector::scalar(-1.0)).unwrap();
        let h = HtHyperParams::new(1.3, 1.0, 1.0 / 1.3, 49.0);
        assert_eq!(ht_step(&s, 2, &obj, &h).unwrap(), ht_step(&s, 2, &obj, &h).unwrap());
        let a = AccumulatorState::new(Vector::scalar(3.0));
        let cfg = AdamConfig::with_alpha(1.0);
        assert_eq!(adam_step(&a, 0, &obj, &cfg).unwrap(), adam_step(&a, 0, &obj, &cfg).unwrap());
    }
}
