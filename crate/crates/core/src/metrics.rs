//! Regret against the best fixed point in hindsight, pointwise-optimal
//! baselines, and per-switch convergence times.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::objectives::TimeVaryingObjective;
use crate::vector::Vector;

/// Iteration budget for the hindsight solver.
pub const SOLVER_MAX_ITER: usize = 500_000;

/// Default suboptimality threshold for `time_to_epsilon`.
pub const DEFAULT_EPSILON: f64 = 1e-2;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegretReport {
    #[serde(rename = "T")]
    pub horizon: usize,
    pub x_bar: Vector,
    pub cumulative_cost: f64,
    pub comparator_cost: f64,
    pub regret: f64,
    pub average_regret: f64,
    /// Average gap to the per-step optimum, `sum_t [f_t(x_t) - f_t(x*_t)] / T`.
    pub pointwise_lower_bound: Option<f64>,
    /// Average regret of the per-step optima themselves,
    /// `(sum_t f_t(x*_t) - sum_t f_t(x_bar)) / T`. No method can do better.
    pub pointwise_regret: Option<f64>,
}

fn summed_grad<O: TimeVaryingObjective + ?Sized>(obj: &O, horizon: usize, x: &[f64]) -> Result<Vector> {
    let mut acc = Vector::zeros(obj.dim());
    for t in 0..horizon {
        let g = obj.grad(t, x)?;
        for (a, gi) in acc.iter_mut().zip(g.iter()) {
            *a += gi;
        }
    }
    Ok(acc)
}

pub fn summed_cost<O: TimeVaryingObjective + ?Sized>(obj: &O, horizon: usize, x: &[f64]) -> Result<f64> {
    (0..horizon).map(|t| obj.value(t, x)).sum()
}

/// Minimizer of `sum_{t < T} f_t`, started from the origin.
pub fn best_fixed_in_hindsight<O: TimeVaryingObjective + ?Sized>(
    obj: &O,
    horizon: usize,
    tol: f64,
) -> Result<Vector> {
    best_fixed_from(obj, horizon, tol, Vector::zeros(obj.dim()))
}

/// Minimizer of the summed objective, certified by `|sum_t grad f_t(x)| <= tol`.
///
/// In several dimensions: gradient descent with step `1 / sum_t L_t`.
/// In one dimension the summed derivative is monotone, so the root is
/// bracketed and bisected instead, and the midpoint of the tol-stationary
/// interval is returned so that flat sums resolve to their centre instead
/// of wherever the search happened to stop.
pub fn best_fixed_from<O: TimeVaryingObjective + ?Sized>(
    obj: &O,
    horizon: usize,
    tol: f64,
    start: Vector,
) -> Result<Vector> {
    if horizon == 0 {
        return Err(Error::Config("hindsight comparator needs T >= 1".into()));
    }
    let total_l: f64 = (0..horizon).map(|t| obj.smoothness_bound(t)).sum();
    if !(total_l > 0.0) {
        return Err(Error::InvalidObjective {
            t: 0,
            reason: "summed smoothness bound must be positive".into(),
        });
    }
    if obj.dim() == 1 {
        let x = bisect_derivative(obj, horizon, tol, start[0])?;
        return centre_of_stationary_interval(obj, horizon, tol, x);
    }
    let step = 1.0 / total_l;
    let mut x = start;
    let mut g = summed_grad(obj, horizon, &x)?;
    let mut iterations = 0;
    while g.norm() > tol {
        if iterations == SOLVER_MAX_ITER || !x.is_finite() {
            return Err(Error::SolverFailure {
                tol,
                iterations,
                grad_norm: g.norm(),
                best: x,
            });
        }
        x = x.step(step, &g);
        g = summed_grad(obj, horizon, &x)?;
        iterations += 1;
    }
    Ok(x)
}

/// The summed derivative is monotone in one dimension: bracket a sign
/// change by doubling outward from `x0`, then bisect.
fn bisect_derivative<O: TimeVaryingObjective + ?Sized>(obj: &O, horizon: usize, tol: f64, x0: f64) -> Result<f64> {
    let deriv = |x: f64| -> Result<f64> { Ok(summed_grad(obj, horizon, &[x])?[0]) };
    let fail = |x: f64, d: f64, iterations: usize| Error::SolverFailure {
        tol,
        iterations,
        grad_norm: d.abs(),
        best: Vector::scalar(x),
    };
    let d0 = deriv(x0)?;
    if d0.abs() <= tol {
        return Ok(x0);
    }
    let dir = -d0.signum();
    let mut inside = x0;
    let mut width = 1.0;
    let mut iterations = 0;
    let mut outside = loop {
        let probe = x0 + dir * width;
        let d = deriv(probe)?;
        iterations += 1;
        if !probe.is_finite() || iterations > 2100 {
            return Err(fail(inside, d, iterations));
        }
        if d.abs() <= tol {
            return Ok(probe);
        }
        if d.signum() == d0.signum() {
            inside = probe;
            width *= 2.0;
        } else {
            break probe;
        }
    };
    // `inside` has the sign of d0, `outside` the opposite.
    loop {
        let mid = 0.5 * (inside + outside);
        let d = deriv(mid)?;
        iterations += 1;
        if d.abs() <= tol {
            return Ok(mid);
        }
        if mid == inside || mid == outside {
            return Err(fail(mid, d, iterations));
        }
        if d.signum() == d0.signum() {
            inside = mid;
        } else {
            outside = mid;
        }
    }
}

fn centre_of_stationary_interval<O: TimeVaryingObjective + ?Sized>(
    obj: &O,
    horizon: usize,
    tol: f64,
    x0: f64,
) -> Result<Vector> {
    let deriv = |x: f64| -> Result<f64> { Ok(summed_grad(obj, horizon, &[x])?[0]) };
    // Walk outward until the derivative leaves [-tol, tol], then bisect.
    let edge = |dir: f64| -> Result<f64> {
        let mut inside = x0;
        let mut width = 1e-6;
        let mut outside = None;
        for _ in 0..80 {
            let probe = x0 + dir * width;
            if deriv(probe)?.abs() > tol {
                outside = Some(probe);
                break;
            }
            inside = probe;
            width *= 2.0;
        }
        let Some(mut outside) = outside else {
            return Ok(inside);
        };
        for _ in 0..200 {
            let mid = 0.5 * (inside + outside);
            if mid == inside || mid == outside {
                break;
            }
            if deriv(mid)?.abs() > tol {
                outside = mid;
            } else {
                inside = mid;
            }
        }
        Ok(inside)
    };
    let lo = edge(-1.0)?;
    let hi = edge(1.0)?;
    Ok(Vector::scalar(0.5 * (lo + hi)))
}

/// Golden-section minimization of `sum_{t < T} f_t` over `[lo, hi]`.
/// One-dimensional cross-check for the descent solver.
pub fn golden_section_1d<O: TimeVaryingObjective + ?Sized>(
    obj: &O,
    horizon: usize,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
) -> Result<f64> {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let cost = |x: f64| summed_cost(obj, horizon, &[x]);
    let mut a = hi - inv_phi * (hi - lo);
    let mut b = lo + inv_phi * (hi - lo);
    let (mut fa, mut fb) = (cost(a)?, cost(b)?);
    while hi - lo > tol {
        if fa <= fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - inv_phi * (hi - lo);
            fa = cost(a)?;
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + inv_phi * (hi - lo);
            fb = cost(b)?;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Regret of a cost sequence `costs[t] = f_t(x_t)` over its first `T`
/// entries. The trace is indexed from `t = 0`, so the sums run over
/// `t = 0..T`.
pub fn regret<O: TimeVaryingObjective + ?Sized>(
    costs: &[f64],
    obj: &O,
    horizon: usize,
    tol: f64,
) -> Result<RegretReport> {
    let x_bar = best_fixed_in_hindsight(obj, horizon, tol)?;
    regret_against(costs, obj, horizon, x_bar)
}

pub fn regret_against<O: TimeVaryingObjective + ?Sized>(
    costs: &[f64],
    obj: &O,
    horizon: usize,
    x_bar: Vector,
) -> Result<RegretReport> {
    if costs.len() < horizon || horizon == 0 {
        return Err(Error::Config(format!(
            "regret over T={horizon} needs at least that many costs, got {}",
            costs.len()
        )));
    }
    let cumulative_cost: f64 = costs[..horizon].iter().sum();
    let comparator_cost = summed_cost(obj, horizon, &x_bar)?;
    let regret = cumulative_cost - comparator_cost;
    let t = horizon as f64;
    let optimal_sum: Option<f64> = (0..horizon).map(|s| obj.min_value(s)).sum();
    Ok(RegretReport {
        horizon,
        x_bar,
        cumulative_cost,
        comparator_cost,
        regret,
        average_regret: regret / t,
        pointwise_lower_bound: optimal_sum.map(|s| (cumulative_cost - s) / t),
        pointwise_regret: optimal_sum.map(|s| (s - comparator_cost) / t),
    })
}

/// `x_bar_T` for every prefix `T = 1..=horizon`, each solve warm-started
/// from the previous one.
pub fn comparator_series<O: TimeVaryingObjective + ?Sized>(
    obj: &O,
    horizon: usize,
    tol: f64,
) -> Result<Vec<Vector>> {
    let mut out = Vec::with_capacity(horizon);
    let mut warm = Vector::zeros(obj.dim());
    for t in 1..=horizon {
        let x = best_fixed_from(obj, t, tol, warm)?;
        warm = x.clone();
        out.push(x);
    }
    Ok(out)
}

/// Regret at every prefix of `costs` against precomputed comparators.
pub fn regret_series<O: TimeVaryingObjective + ?Sized>(
    costs: &[f64],
    obj: &O,
    comparators: &[Vector],
) -> Result<Vec<RegretReport>> {
    comparators
        .iter()
        .take(costs.len())
        .enumerate()
        .map(|(i, x_bar)| regret_against(costs, obj, i + 1, x_bar.clone()))
        .collect()
}

/// For each switch time `s`, the smallest `k` such that
/// `f_t(x_t) - f_t(x*_t) <= eps` for every `t` in `[s + k, next switch)`.
/// `None` when the window never settles.
pub fn time_to_epsilon<O: TimeVaryingObjective + ?Sized>(
    costs: &[f64],
    obj: &O,
    switch_times: &[usize],
    eps: f64,
) -> Result<Vec<Option<usize>>> {
    let gaps: Vec<f64> = costs
        .iter()
        .enumerate()
        .map(|(t, f)| {
            obj.min_value(t)
                .map(|fs| f - fs)
                .ok_or(Error::UnsupportedMetric("time_to_epsilon"))
        })
        .collect::<Result<_>>()?;
    Ok(settling_times(&gaps, switch_times, eps))
}

/// `time_to_epsilon` over precomputed suboptimality gaps.
pub fn settling_times(gaps: &[f64], switch_times: &[usize], eps: f64) -> Vec<Option<usize>> {
    switch_times
        .iter()
        .enumerate()
        .map(|(i, &s)| {
            let end = switch_times
                .get(i + 1)
                .copied()
                .unwrap_or(gaps.len())
                .min(gaps.len());
            if s >= end {
                return None;
            }
            let window = &gaps[s..end];
            // first index after the last violation
            match window.iter().rposition(|g| !(*g <= eps)) {
                None => Some(0),
                Some(last_bad) if last_bad + 1 < window.len() => Some(last_bad + 1),
                Some(_) => None,
            }
        })
        .collect()
}
