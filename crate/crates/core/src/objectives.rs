//! Time-varying objectives with exact gradients and smoothness bounds, plus
//! the finite-difference and convexity oracles used to check them.

use std::sync::atomic::{AtomicUsize, Ordering};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::{ParamSchedule, VectorSchedule};
use crate::vector::{check_dim, Vector};

/// Default step for the central-difference oracles.
pub const FD_STEP: f64 = 1e-6;

/// An inequality violated by less than this is still reported as a pass.
pub const PROBE_TOL: f64 = 1e-9;

pub trait TimeVaryingObjective: Send + Sync {
    fn dim(&self) -> usize;

    fn value(&self, t: usize, x: &[f64]) -> Result<f64>;

    fn grad(&self, t: usize, x: &[f64]) -> Result<Vector>;

    /// An upper bound `N_t >= L_t` on the gradient's Lipschitz constant.
    fn smoothness_bound(&self, t: usize) -> f64;

    fn strong_convexity(&self, _t: usize) -> Option<f64> {
        None
    }

    fn optimum(&self, _t: usize) -> Option<Vector> {
        None
    }

    fn min_value(&self, t: usize) -> Option<f64> {
        let x = self.optimum(t)?;
        self.value(t, &x).ok()
    }

    /// Steps at which the objective changes. Empty for time-invariant ones.
    fn switch_times(&self) -> Vec<usize> {
        Vec::new()
    }
}

/// `log(e^{-u} + e^{u})` with `u = b(x - c)` and the `log a` offset,
/// written as `log(2a) + log cosh(u)` so large `|u|` never overflows.
pub fn log_cosh(u: f64) -> f64 {
    let m = u.abs();
    m + (-2.0 * m).exp().ln_1p() - std::f64::consts::LN_2
}

/// `f_t(x) = log(a e^{-b(x-c)} + a e^{b(x-c)})`, one-dimensional.
#[derive(Debug, Clone, PartialEq)]
pub struct LogSumExpObjective {
    pub a: ParamSchedule,
    pub b: ParamSchedule,
    pub c: ParamSchedule,
}

impl LogSumExpObjective {
    pub fn new(a: ParamSchedule, b: ParamSchedule, c: ParamSchedule) -> Result<Self> {
        for (name, s) in [("a", &a), ("b", &b)] {
            if let Some((t, v)) = s.segments().iter().find(|(_, v)| !(*v > 0.0 && v.is_finite())) {
                return Err(Error::InvalidObjective {
                    t: *t,
                    reason: format!("{name} must be positive, got {v}"),
                });
            }
        }
        Ok(LogSumExpObjective { a, b, c })
    }

    pub fn constant(a: f64, b: f64, c: f64) -> Result<Self> {
        Self::new(
            ParamSchedule::constant(a),
            ParamSchedule::constant(b),
            ParamSchedule::constant(c),
        )
    }

    fn coeffs(&self, t: usize) -> Result<(f64, f64, f64)> {
        let (a, b, c) = (self.a.value_at(t), self.b.value_at(t), self.c.value_at(t));
        if !(a > 0.0) || !(b > 0.0) {
            return Err(Error::InvalidObjective {
                t,
                reason: format!("a and b must be positive, got a={a}, b={b}"),
            });
        }
        Ok((a, b, c))
    }

    pub fn value_scalar(&self, t: usize, x: f64) -> Result<f64> {
        let (a, b, c) = self.coeffs(t)?;
        Ok((2.0 * a).ln() + log_cosh(b * (x - c)))
    }

    pub fn grad_scalar(&self, t: usize, x: f64) -> Result<f64> {
        let (_, b, c) = self.coeffs(t)?;
        Ok(b * (b * (x - c)).tanh())
    }
}

pub fn lse_value(obj: &LogSumExpObjective, t: usize, x: f64) -> Result<f64> {
    obj.value_scalar(t, x)
}

pub fn lse_grad(obj: &LogSumExpObjective, t: usize, x: f64) -> Result<f64> {
    obj.grad_scalar(t, x)
}

impl TimeVaryingObjective for LogSumExpObjective {
    fn dim(&self) -> usize {
        1
    }

    fn value(&self, t: usize, x: &[f64]) -> Result<f64> {
        check_dim(1, x.len())?;
        self.value_scalar(t, x[0])
    }

    fn grad(&self, t: usize, x: &[f64]) -> Result<Vector> {
        check_dim(1, x.len())?;
        Ok(Vector::scalar(self.grad_scalar(t, x[0])?))
    }

    fn smoothness_bound(&self, t: usize) -> f64 {
        let b = self.b.value_at(t);
        b * b
    }

    fn optimum(&self, t: usize) -> Option<Vector> {
        Some(Vector::scalar(self.c.value_at(t)))
    }

    fn min_value(&self, t: usize) -> Option<f64> {
        Some((2.0 * self.a.value_at(t)).ln())
    }

    fn switch_times(&self) -> Vec<usize> {
        merged_switches([self.a.switch_times(), self.b.switch_times(), self.c.switch_times()])
    }
}

fn merged_switches<I: Iterator<Item = usize>>(parts: impl IntoIterator<Item = I>) -> Vec<usize> {
    let mut all: Vec<usize> = parts.into_iter().flatten().collect();
    all.sort_unstable();
    all.dedup();
    all
}

/// Streaming least squares `f_t(x) = (1 - D_t^T x)^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct SwitchingRegression {
    pub data: VectorSchedule,
    /// A point that minimizes every `f_t`, when one is known.
    common_optimum: Option<Vector>,
}

impl SwitchingRegression {
    pub fn new(data: VectorSchedule, common_optimum: Option<Vector>) -> Result<Self> {
        let dim = data.at(0).dim();
        if dim == 0 {
            return Err(Error::InvalidObjective {
                t: 0,
                reason: "data vectors must be non-empty".into(),
            });
        }
        for (t, d) in data.segments() {
            check_dim(dim, d.dim())?;
            if !d.is_finite() {
                return Err(Error::InvalidObjective {
                    t: *t,
                    reason: "non-finite data".into(),
                });
            }
            if let Some(x) = &common_optimum {
                check_dim(dim, x.dim())?;
                if (1.0 - d.dot(x)).abs() > 1e-12 {
                    return Err(Error::InvalidObjective {
                        t: *t,
                        reason: "declared optimum does not zero the residual".into(),
                    });
                }
            }
        }
        Ok(SwitchingRegression {
            data,
            common_optimum,
        })
    }

    /// Data `[1, 0]` before `tau`, `[0, 1]` from `tau` on; `[1, 1]` is
    /// optimal throughout.
    pub fn delayed_switch(tau: usize) -> Self {
        let e1 = Vector::new(vec![1.0, 0.0]);
        let e2 = Vector::new(vec![0.0, 1.0]);
        let data = if tau == 0 {
            VectorSchedule::constant(e2)
        } else {
            VectorSchedule::new(vec![(0, e1), (tau, e2)]).expect("tau > 0")
        };
        SwitchingRegression::new(data, Some(Vector::new(vec![1.0, 1.0])))
            .expect("[1, 1] solves both data rows")
    }

    fn residual(&self, t: usize, x: &[f64]) -> Result<(f64, &Vector)> {
        let d = self.data.at(t);
        check_dim(d.dim(), x.len())?;
        Ok((1.0 - d.dot(x), d))
    }
}

pub fn regression_grad(obj: &SwitchingRegression, t: usize, x: &[f64]) -> Result<Vector> {
    obj.grad(t, x)
}

impl TimeVaryingObjective for SwitchingRegression {
    fn dim(&self) -> usize {
        self.data.at(0).dim()
    }

    fn value(&self, t: usize, x: &[f64]) -> Result<f64> {
        let (r, _) = self.residual(t, x)?;
        Ok(r * r)
    }

    fn grad(&self, t: usize, x: &[f64]) -> Result<Vector> {
        let (r, d) = self.residual(t, x)?;
        Ok(d.scale(-2.0 * r))
    }

    fn smoothness_bound(&self, t: usize) -> f64 {
        2.0 * self.data.at(t).norm_sq()
    }

    fn optimum(&self, _t: usize) -> Option<Vector> {
        self.common_optimum.clone()
    }

    fn min_value(&self, _t: usize) -> Option<f64> {
        self.common_optimum.as_ref().map(|_| 0.0)
    }

    fn switch_times(&self) -> Vec<usize> {
        self.data.switch_times().collect()
    }
}

/// `f_t(x) = 1/2 sum_i d_i (x_i - c_{t,i})^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalQuadratic {
    pub weights: Vector,
    pub center: VectorSchedule,
}

impl DiagonalQuadratic {
    pub fn new(weights: Vector, center: VectorSchedule) -> Result<Self> {
        if weights.dim() == 0 || weights.iter().any(|d| !(*d > 0.0 && d.is_finite())) {
            return Err(Error::InvalidObjective {
                t: 0,
                reason: "weights must be non-empty and positive".into(),
            });
        }
        for (_, c) in center.segments() {
            check_dim(weights.dim(), c.dim())?;
        }
        Ok(DiagonalQuadratic { weights, center })
    }

    pub fn fixed(weights: Vec<f64>, center: Vec<f64>) -> Result<Self> {
        Self::new(Vector::new(weights), VectorSchedule::constant(Vector::new(center)))
    }
}

impl TimeVaryingObjective for DiagonalQuadratic {
    fn dim(&self) -> usize {
        self.weights.dim()
    }

    fn value(&self, t: usize, x: &[f64]) -> Result<f64> {
        check_dim(self.dim(), x.len())?;
        let c = self.center.at(t);
        Ok(0.5
            * self
                .weights
                .iter()
                .zip(x.iter().zip(c.iter()))
                .map(|(d, (xi, ci))| d * (xi - ci) * (xi - ci))
                .sum::<f64>())
    }

    fn grad(&self, t: usize, x: &[f64]) -> Result<Vector> {
        check_dim(self.dim(), x.len())?;
        let c = self.center.at(t);
        Ok(self
            .weights
            .iter()
            .zip(x.iter().zip(c.iter()))
            .map(|(d, (xi, ci))| d * (xi - ci))
            .collect::<Vec<_>>()
            .into())
    }

    fn smoothness_bound(&self, _t: usize) -> f64 {
        self.weights.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    fn strong_convexity(&self, _t: usize) -> Option<f64> {
        Some(self.weights.iter().copied().fold(f64::INFINITY, f64::min))
    }

    fn optimum(&self, t: usize) -> Option<Vector> {
        Some(self.center.at(t).clone())
    }

    fn min_value(&self, _t: usize) -> Option<f64> {
        Some(0.0)
    }

    fn switch_times(&self) -> Vec<usize> {
        self.center.switch_times().collect()
    }
}

/// The bundled objectives behind one type, as built from a config file.
#[derive(Debug, Clone, PartialEq)]
pub enum Objective {
    LogSumExp(LogSumExpObjective),
    Regression(SwitchingRegression),
    Quadratic(DiagonalQuadratic),
}

impl Objective {
    fn inner(&self) -> &dyn TimeVaryingObjective {
        match self {
            Objective::LogSumExp(o) => o,
            Objective::Regression(o) => o,
            Objective::Quadratic(o) => o,
        }
    }
}

impl TimeVaryingObjective for Objective {
    fn dim(&self) -> usize {
        self.inner().dim()
    }
    fn value(&self, t: usize, x: &[f64]) -> Result<f64> {
        self.inner().value(t, x)
    }
    fn grad(&self, t: usize, x: &[f64]) -> Result<Vector> {
        self.inner().grad(t, x)
    }
    fn smoothness_bound(&self, t: usize) -> f64 {
        self.inner().smoothness_bound(t)
    }
    fn strong_convexity(&self, t: usize) -> Option<f64> {
        self.inner().strong_convexity(t)
    }
    fn optimum(&self, t: usize) -> Option<Vector> {
        self.inner().optimum(t)
    }
    fn min_value(&self, t: usize) -> Option<f64> {
        self.inner().min_value(t)
    }
    fn switch_times(&self) -> Vec<usize> {
        self.inner().switch_times()
    }
}

/// Counts gradient calls per time index; used to check how many
/// evaluations each step function makes.
pub struct CountingObjective<O> {
    inner: O,
    grads: AtomicUsize,
    last_grad_t: AtomicUsize,
}

impl<O> CountingObjective<O> {
    pub fn new(inner: O) -> Self {
        CountingObjective {
            inner,
            grads: AtomicUsize::new(0),
            last_grad_t: AtomicUsize::new(usize::MAX),
        }
    }

    pub fn grad_calls(&self) -> usize {
        self.grads.load(Ordering::SeqCst)
    }

    pub fn last_grad_time(&self) -> Option<usize> {
        match self.last_grad_t.load(Ordering::SeqCst) {
            usize::MAX => None,
            t => Some(t),
        }
    }

    pub fn reset(&self) {
        self.grads.store(0, Ordering::SeqCst);
        self.last_grad_t.store(usize::MAX, Ordering::SeqCst);
    }
}

impl<O: TimeVaryingObjective> TimeVaryingObjective for CountingObjective<O> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn value(&self, t: usize, x: &[f64]) -> Result<f64> {
        self.inner.value(t, x)
    }
    fn grad(&self, t: usize, x: &[f64]) -> Result<Vector> {
        self.grads.fetch_add(1, Ordering::SeqCst);
        self.last_grad_t.store(t, Ordering::SeqCst);
        self.inner.grad(t, x)
    }
    fn smoothness_bound(&self, t: usize) -> f64 {
        self.inner.smoothness_bound(t)
    }
    fn strong_convexity(&self, t: usize) -> Option<f64> {
        self.inner.strong_convexity(t)
    }
    fn optimum(&self, t: usize) -> Option<Vector> {
        self.inner.optimum(t)
    }
    fn min_value(&self, t: usize) -> Option<f64> {
        self.inner.min_value(t)
    }
    fn switch_times(&self) -> Vec<usize> {
        self.inner.switch_times()
    }
}

/// Central-difference gradient, `(f(x + h e_i) - f(x - h e_i)) / 2h`.
pub fn fd_gradient<O: TimeVaryingObjective + ?Sized>(
    obj: &O,
    t: usize,
    x: &[f64],
    h: f64,
) -> Result<Vector> {
    check_dim(obj.dim(), x.len())?;
    let mut probe = x.to_vec();
    let mut out = Vec::with_capacity(x.len());
    for i in 0..x.len() {
        probe[i] = x[i] + h;
        let up = obj.value(t, &probe)?;
        probe[i] = x[i] - h;
        let down = obj.value(t, &probe)?;
        probe[i] = x[i];
        out.push((up - down) / (2.0 * h));
    }
    Ok(out.into())
}

/// Trace of the Hessian from central differences of the analytic gradient.
/// For a convex function this upper-bounds the largest eigenvalue, so it is
/// a usable local smoothness estimate.
pub fn hessian_trace_bound<O: TimeVaryingObjective + ?Sized>(
    obj: &O,
    t: usize,
    x: &[f64],
    h: f64,
) -> Result<f64> {
    check_dim(obj.dim(), x.len())?;
    let mut probe = x.to_vec();
    let mut trace = 0.0;
    for i in 0..x.len() {
        probe[i] = x[i] + h;
        let up = obj.grad(t, &probe)?[i];
        probe[i] = x[i] - h;
        let down = obj.grad(t, &probe)?[i];
        probe[i] = x[i];
        trace += (up - down) / (2.0 * h);
    }
    if trace.is_finite() {
        Ok(trace)
    } else {
        Err(Error::EstimationFailure { t })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeCheck {
    pub name: &'static str,
    /// `rhs - lhs` for an inequality of the form `lhs <= rhs`.
    pub slack: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeReport {
    pub checks: Vec<ProbeCheck>,
    /// The `lambda = 0` interpolated bound and the minimizer corollary are
    /// the same expression; `None` when no optimum is known.
    pub lambda_zero_matches_corollary: Option<bool>,
}

impl ProbeReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed) && self.lambda_zero_matches_corollary != Some(false)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ProbeCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&ProbeCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    fn push_le(&mut self, name: &'static str, lhs: f64, rhs: f64) {
        let slack = rhs - lhs;
        self.checks.push(ProbeCheck {
            name,
            slack,
            passed: slack >= -PROBE_TOL,
        });
    }
}

/// The `lambda`-interpolated minimizer bound
/// `g^T (x* - x) <= (1 - lambda)(f* - f(x)) - (1 + lambda)/(2L) |g|^2`,
/// returned as its right-hand side.
pub fn interpolated_minimizer_bound(lambda: f64, f_x: f64, f_star: f64, grad_sq: f64, l: f64) -> f64 {
    (1.0 - lambda) * (f_star - f_x) - (1.0 + lambda) / (2.0 * l) * grad_sq
}

/// Evaluate the standard smooth/strongly-convex inequalities at `(x, y)`.
/// Failures are data in the report, never errors.
pub fn convexity_probe<O: TimeVaryingObjective + ?Sized>(
    obj: &O,
    t: usize,
    x: &[f64],
    y: &[f64],
) -> Result<ProbeReport> {
    let l = obj.smoothness_bound(t);
    let fx = obj.value(t, x)?;
    let fy = obj.value(t, y)?;
    let gx = obj.grad(t, x)?;
    let gy = obj.grad(t, y)?;
    let xv = Vector::from(x);
    let dxy = xv.sub(y);
    let dg = gx.sub(&gy);
    let dist_sq = dxy.norm_sq();
    let dg_sq = dg.norm_sq();
    let inner = dg.dot(&dxy);
    let lin = gx.dot(&Vector::from(y).sub(x));

    let mut r = ProbeReport {
        checks: Vec::new(),
        lambda_zero_matches_corollary: None,
    };
    r.push_le("first_order_convexity", fx + lin, fy);
    r.push_le("smoothness_upper", fy, fx + lin + 0.5 * l * dist_sq);
    r.push_le("cocoercivity", dg_sq / l, inner);
    r.push_le("smooth_gap_descent", fx - fy, gx.dot(&dxy) - dg_sq / (2.0 * l));

    if let Some(sigma) = obj.strong_convexity(t) {
        r.push_le("strong_monotonicity", sigma * dist_sq, inner);
        r.push_le(
            "strong_cocoercivity",
            sigma * l / (sigma + l) * dist_sq + dg_sq / (sigma + l),
            inner,
        );
    }

    if let Some(xs) = obj.optimum(t) {
        let fs = obj.value(t, &xs)?;
        let gap = fx - fs;
        let g_sq = gx.norm_sq();
        let d_star = xv.dist_sq(&xs);
        r.push_le("minimizer_gap_lower", g_sq / (2.0 * l), gap);
        r.push_le("minimizer_gap_upper", gap, 0.5 * l * d_star);
        if let Some(sigma) = obj.strong_convexity(t) {
            r.push_le("strong_gap_upper", gap, g_sq / (2.0 * sigma));
            r.push_le("strong_gap_lower", 0.5 * sigma * d_star, gap);
        }
        let lhs = gx.dot(&xs.sub(x));
        let corollary = fs - fx - g_sq / (2.0 * l);
        r.push_le("minimizer_corollary", lhs, corollary);
        let names = ["interpolated_lambda_0", "interpolated_lambda_half", "interpolated_lambda_1"];
        for (name, lambda) in names.into_iter().zip([0.0, 0.5, 1.0]) {
            r.push_le(name, lhs, interpolated_minimizer_bound(lambda, fx, fs, g_sq, l));
        }
        let at_zero = interpolated_minimizer_bound(0.0, fx, fs, g_sq, l);
        r.lambda_zero_matches_corollary =
            Some((at_zero - corollary).abs() <= 1e-12 * (1.0 + corollary.abs()));
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lse(a: f64, b: f64, c: f64) -> LogSumExpObjective {
        LogSumExpObjective::constant(a, b, c).unwrap()
    }

    /// Naive two-exponential evaluation, fine for moderate arguments.
    fn naive_lse(a: f64, b: f64, c: f64, x: f64) -> f64 {
        (a * (-b * (x - c)).exp() + a * (b * (x - c)).exp()).ln()
    }

    #[test]
    fn lse_value_examples() {
        let ln10 = 10f64.ln();
        assert!((lse_value(&lse(5.0, 7.0, 0.0), 0, 0.0).unwrap() - ln10).abs() < 1e-12);
        assert!((lse_value(&lse(5.0, 7.0, 5.0), 0, 5.0).unwrap() - ln10).abs() < 1e-12);
        let v = lse_value(&lse(5.0, 7.0, 0.0), 0, 1.0).unwrap();
        assert!((v - naive_lse(5.0, 7.0, 0.0, 1.0)).abs() < 1e-12);
        assert!((v - 8.6094387).abs() < 1e-6);
    }

    #[test]
    fn lse_value_survives_huge_arguments() {
        let obj = lse(5.0, 50.0, 0.0);
        let v = lse_value(&obj, 0, 100.0).unwrap();
        assert!(v.is_finite());
        assert!((v - (5f64.ln() + 5000.0)).abs() < 1e-9);
    }

    #[test]
    fn lse_grad_examples() {
        assert_eq!(lse_grad(&lse(5.0, 7.0, 0.0), 0, 0.0).unwrap(), 0.0);
        let g = lse_grad(&lse(5.0, 7.0, 0.0), 0, 1.0).unwrap();
        assert!((g - 6.9999884).abs() < 1e-7);
        let fd = fd_gradient(&lse(5.0, 7.0, 0.0), 0, &[1.0], FD_STEP).unwrap()[0];
        assert!((g - fd).abs() <= 1e-6 * g.abs());
        let g = lse_grad(&lse(5.0, 7.0, 5.0), 0, 0.0).unwrap();
        assert!((g + 7.0).abs() < 1e-12);
    }

    #[test]
    fn lse_rejects_nonpositive_coefficients() {
        assert!(LogSumExpObjective::constant(0.0, 7.0, 0.0).is_err());
        assert!(LogSumExpObjective::constant(5.0, -1.0, 0.0).is_err());
    }

    #[test]
    fn regression_grad_examples() {
        let pre = SwitchingRegression::delayed_switch(10);
        assert_eq!(regression_grad(&pre, 0, &[1.0, 3.0]).unwrap().as_slice(), &[0.0, 0.0]);
        assert_eq!(regression_grad(&pre, 0, &[0.0, 0.0]).unwrap().as_slice(), &[-2.0, 0.0]);
        assert_eq!(regression_grad(&pre, 10, &[1.0, 0.0]).unwrap().as_slice(), &[0.0, -2.0]);
        assert!(matches!(
            regression_grad(&pre, 0, &[1.0]),
            Err(Error::Shape { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn hessian_trace_examples() {
        let t = hessian_trace_bound(&lse(5.0, 7.0, 2.0), 0, &[2.0], FD_STEP).unwrap();
        assert!((t - 49.0).abs() < 1e-4, "{t}");
        let q = DiagonalQuadratic::fixed(vec![2.0, 3.0], vec![0.5, -1.0]).unwrap();
        let t = hessian_trace_bound(&q, 0, &[4.0, -7.0], FD_STEP).unwrap();
        assert!((t - 5.0).abs() < 1e-6);
        let r = SwitchingRegression::delayed_switch(10);
        let t = hessian_trace_bound(&r, 0, &[0.3, -2.0], FD_STEP).unwrap();
        assert!((t - 2.0).abs() < 1e-6);
    }

    #[test]
    fn fd_gradient_examples() {
        let q = DiagonalQuadratic::fixed(vec![1.0], vec![0.0]).unwrap();
        assert!((fd_gradient(&q, 0, &[3.0], FD_STEP).unwrap()[0] - 3.0).abs() < 1e-8);
        let r = SwitchingRegression::delayed_switch(10);
        let g = fd_gradient(&r, 0, &[0.0, 0.0], FD_STEP).unwrap();
        assert!((g[0] + 2.0).abs() < 1e-8 && g[1].abs() < 1e-8);
    }

    #[test]
    fn probe_lse_passes() {
        let r = convexity_probe(&lse(5.0, 7.0, 0.0), 0, &[0.3], &[-0.2]).unwrap();
        assert!(r.passed(), "{:?}", r.failures().collect::<Vec<_>>());
        assert_eq!(r.lambda_zero_matches_corollary, Some(true));
        for c in &r.checks {
            assert!(c.slack >= 0.0, "{}: {}", c.name, c.slack);
        }
    }

    #[test]
    fn probe_quadratic_cocoercivity_is_tight() {
        let q = DiagonalQuadratic::fixed(vec![2.0], vec![0.0]).unwrap();
        let r = convexity_probe(&q, 0, &[1.0], &[0.0]).unwrap();
        assert!(r.passed());
        assert_eq!(r.get("cocoercivity").unwrap().slack, 0.0);
        assert!(r.get("strong_monotonicity").is_some());
    }

    #[test]
    fn probe_reports_violation_for_understated_smoothness() {
        // Claim L = 1 for a curvature-4 quadratic.
        struct Liar(DiagonalQuadratic);
        impl TimeVaryingObjective for Liar {
            fn dim(&self) -> usize {
                1
            }
            fn value(&self, t: usize, x: &[f64]) -> Result<f64> {
                self.0.value(t, x)
            }
            fn grad(&self, t: usize, x: &[f64]) -> Result<Vector> {
                self.0.grad(t, x)
            }
            fn smoothness_bound(&self, _t: usize) -> f64 {
                1.0
            }
        }
        let q = Liar(DiagonalQuadratic::fixed(vec![4.0], vec![0.0]).unwrap());
        let r = convexity_probe(&q, 0, &[1.0], &[0.0]).unwrap();
        assert!(!r.passed());
        assert!(!r.get("cocoercivity").unwrap().passed);
    }

    #[test]
    fn counting_wrapper_counts() {
        let c = CountingObjective::new(lse(5.0, 7.0, 0.0));
        c.grad(3, &[1.0]).unwrap();
        c.grad(4, &[1.0]).unwrap();
        assert_eq!(c.grad_calls(), 2);
        assert_eq!(c.last_grad_time(), Some(4));
    }

    #[test]
    fn switch_times_merge() {
        let o = LogSumExpObjective::new(
            ParamSchedule::constant(5.0),
            ParamSchedule::new(vec![(0, 7.0), (50, 21.0)]).unwrap(),
            ParamSchedule::new(vec![(0, 0.0), (50, 5.0), (150, -4.0)]).unwrap(),
        )
        .unwrap();
        assert_eq!(o.switch_times(), vec![50, 150]);
    }
}
