//! Stepping every optimizer of a config over the horizon and collecting
//! per-step telemetry.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::metrics::{comparator_series, regret_series, RegretReport};
use crate::objectives::{Objective, TimeVaryingObjective};
use crate::optimizers::{adagrad_step, adam_step, ht_step, legacy_ht_step, AccumulatorState, HtState};
use crate::params::HtHyperParams;
use crate::stability::{check_prop1, check_thm2, lyapunov_w, monitor_decrease};
use crate::vector::Vector;

use super::config::{ExperimentConfig, OptimizerKind, OptimizerSpec};

/// Tolerance of the hindsight comparator used for regret columns.
pub const COMPARATOR_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRow {
    pub t: usize,
    pub optimizer: String,
    /// The point at which `f_t` and its gradient were evaluated.
    pub x: Vector,
    pub f: f64,
    pub grad_norm: f64,
    pub v: Option<f64>,
    pub w: Option<f64>,
    /// Increment of the monitored Lyapunov function over this step, with
    /// the optimum held at its value for step `t`.
    pub delta_v: Option<f64>,
    pub decrease_bound: Option<f64>,
    pub certified: bool,
    pub diverged: bool,
}

/// A certified step whose Lyapunov increment exceeded its bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub optimizer: String,
    pub t: usize,
    pub delta: f64,
    pub bound: f64,
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegretRow {
    pub optimizer: String,
    pub report: RegretReport,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct RunTrace {
    pub dim: usize,
    /// Ordered by optimizer (config order), then by `t`.
    pub rows: Vec<TraceRow>,
    pub violations: Vec<Violation>,
    /// Prefix regret, one row per optimizer and prefix length; empty unless
    /// the regret monitor is on.
    pub regret: Vec<RegretRow>,
    /// Pointwise optima `x*_t` for `t < horizon`, when the objective has them.
    pub optima: Vec<Vector>,
}

impl RunTrace {
    pub fn rows_for<'a>(&'a self, optimizer: &'a str) -> impl Iterator<Item = &'a TraceRow> + 'a {
        self.rows.iter().filter(move |r| r.optimizer == optimizer)
    }

    pub fn optimizer_names(&self) -> Vec<&str> {
        let mut names: Vec<&str> = Vec::new();
        for r in &self.rows {
            if names.last() != Some(&r.optimizer.as_str()) {
                names.push(&r.optimizer);
            }
        }
        names
    }

    /// `f_t(x_t) - f_t(x*_t)` per row of one optimizer, when the optimum is known.
    pub fn gaps(&self, optimizer: &str, obj: &Objective) -> Vec<f64> {
        self.rows_for(optimizer)
            .map(|r| obj.min_value(r.t).map_or(f64::NAN, |m| r.f - m))
            .collect()
    }

    pub fn diverged(&self, optimizer: &str) -> bool {
        self.rows_for(optimizer).any(|r| r.diverged)
    }
}

/// Steps every optimizer of `cfg` over its horizon. Divergence ends that
/// optimizer's rows with a flagged row instead of failing the run.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunTrace> {
    cfg.validate()?;
    let obj = cfg.objective.build()?;
    let per_optimizer: Vec<Result<(Vec<TraceRow>, Vec<Violation>)>> = std::thread::scope(|scope| {
        let handles: Vec<_> = cfg
            .optimizers
            .iter()
            .map(|spec| {
                let obj = &obj;
                scope.spawn(move || run_one(cfg, obj, spec))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("optimizer thread panicked"))
            .collect()
    });
    let mut trace = RunTrace {
        dim: obj.dim(),
        ..RunTrace::default()
    };
    for result in per_optimizer {
        let (rows, violations) = result?;
        trace.rows.extend(rows);
        trace.violations.extend(violations);
    }
    trace.optima = (0..cfg.horizon).map_while(|t| obj.optimum(t)).collect();
    if cfg.monitors.regret {
        trace.regret = regret_rows(&trace, &obj, cfg.horizon)?;
    }
    Ok(trace)
}

fn regret_rows(trace: &RunTrace, obj: &Objective, horizon: usize) -> Result<Vec<RegretRow>> {
    let comparators = comparator_series(obj, horizon, COMPARATOR_TOL)?;
    let mut out = Vec::new();
    for name in trace.optimizer_names() {
        let costs: Vec<f64> = trace.rows_for(name).filter(|r| !r.diverged).map(|r| r.f).collect();
        for report in regret_series(&costs, obj, &comparators)? {
            out.push(RegretRow {
                optimizer: name.to_string(),
                report,
            });
        }
    }
    Ok(out)
}

enum Runner {
    Tuner(HtState),
    Legacy(HtState),
    Accumulator(AccumulatorState),
}

/// Everything one step produced, before monitors.
struct Stepped {
    x: Vector,
    grad: Vector,
    /// `(y, z)` before and after the step; for single-iterate methods both
    /// equal the iterate.
    before: (Vector, Vector),
    after: (Vector, Vector),
    hyper: Option<HtHyperParams>,
}

fn run_one(cfg: &ExperimentConfig, obj: &Objective, spec: &OptimizerSpec) -> Result<(Vec<TraceRow>, Vec<Violation>)> {
    let smoothness = |t: usize| obj.smoothness_bound(t);
    let analysis = spec.kind.analysis();
    let mut runner = match &spec.kind {
        OptimizerKind::Ht { .. } | OptimizerKind::Gd { .. } | OptimizerKind::Nagd { .. } => {
            let z = spec.init_z.clone().unwrap_or_else(|| spec.init.clone());
            Runner::Tuner(HtState::new(spec.init.clone(), z)?)
        }
        OptimizerKind::LegacyHt { .. } => {
            let z = spec.init_z.clone().unwrap_or_else(|| spec.init.clone());
            Runner::Legacy(HtState::new(spec.init.clone(), z)?)
        }
        OptimizerKind::Adagrad(_) | OptimizerKind::Adam(_) => {
            Runner::Accumulator(AccumulatorState::new(spec.init.clone()))
        }
    };
    let mut rows = Vec::with_capacity(cfg.horizon);
    let mut violations = Vec::new();

    for t in 0..cfg.horizon {
        let stepped = match step(&mut runner, &spec.kind, t, obj, &smoothness) {
            Ok(s) => s,
            Err(Error::Divergence { t, state }) => {
                rows.push(diverged_row(t, &spec.name, obj, state));
                break;
            }
            Err(e) => return Err(e),
        };
        let f = obj.value(t, &stepped.x)?;
        let mut row = TraceRow {
            t,
            optimizer: spec.name.clone(),
            x: stepped.x.clone(),
            f,
            grad_norm: stepped.grad.norm(),
            v: None,
            w: None,
            delta_v: None,
            decrease_bound: None,
            certified: false,
            diverged: false,
        };

        let hyper = stepped.hyper;
        let prop1 = hyper.is_some_and(|h| check_prop1(h.beta, h.mu, h.gamma, analysis.epsilon));
        if cfg.monitors.certificate {
            if let Some(h) = hyper {
                let normalizer_ok = h.normalizer >= smoothness(t);
                let thm2 = check_thm2(h.gamma, h.mu, h.beta, analysis.lambda, analysis.xi, analysis.xi);
                row.certified = normalizer_ok && (prop1 || thm2.thm2_ok());
            }
        }

        if cfg.monitors.lyapunov {
            if let Some(xstar) = obj.optimum(t) {
                let (y0, z0) = &stepped.before;
                let (y1, z1) = &stepped.after;
                let v = lyapunov_w(y0, z0, &xstar, 1.0)?;
                let xi = if prop1 { 1.0 } else { analysis.xi };
                let w = lyapunov_w(y0, z0, &xstar, analysis.xi)?;
                row.v = Some(v);
                row.w = Some(w);
                let before = lyapunov_w(y0, z0, &xstar, xi)?;
                let after = lyapunov_w(y1, z1, &xstar, xi)?;
                row.delta_v = Some(after - before);
                if let (Some(h), Some(f_star)) = (hyper, obj.min_value(t)) {
                    let lambda = if prop1 { 0.0 } else { analysis.lambda };
                    let verdict = monitor_decrease(before, after, h.gamma, h.normalizer, f, f_star, lambda);
                    row.decrease_bound = Some(verdict.bound);
                    if row.certified && !verdict.holds {
                        violations.push(Violation {
                            optimizer: spec.name.clone(),
                            t,
                            delta: verdict.delta,
                            bound: verdict.bound,
                            tol: verdict.tol,
                        });
                    }
                }
            }
        }
        rows.push(row);
    }
    Ok((rows, violations))
}

fn step(
    runner: &mut Runner,
    kind: &OptimizerKind,
    t: usize,
    obj: &Objective,
    smoothness: &impl Fn(usize) -> f64,
) -> Result<Stepped> {
    match runner {
        Runner::Tuner(state) => {
            let h = kind.hyper_at(t, smoothness).expect("tuner kinds have hyper-parameters");
            let s = ht_step(state, t, obj, &h)?;
            let before = (state.y.clone(), state.z.clone());
            let after = (s.next.y.clone(), s.next.z.clone());
            *state = s.next;
            Ok(Stepped {
                x: s.x,
                grad: s.grad,
                before,
                after,
                hyper: Some(h),
            })
        }
        Runner::Legacy(state) => {
            let OptimizerKind::LegacyHt {
                gamma,
                beta,
                normalizer,
            } = kind
            else {
                unreachable!("legacy runner only built for legacy_ht")
            };
            let s = legacy_ht_step(state, t, obj, *gamma, *beta, normalizer.at(t, smoothness))?;
            let before = (state.y.clone(), state.z.clone());
            let after = (s.next.y.clone(), s.next.z.clone());
            *state = s.next;
            Ok(Stepped {
                x: s.x,
                grad: s.grad,
                before,
                after,
                hyper: None,
            })
        }
        Runner::Accumulator(state) => {
            let (next, grad) = match kind {
                OptimizerKind::Adagrad(c) => adagrad_step(state, t, obj, c)?,
                OptimizerKind::Adam(c) => adam_step(state, t, obj, c)?,
                _ => unreachable!("accumulator runner only built for adagrad/adam"),
            };
            let x = state.x.clone();
            let before = (x.clone(), x.clone());
            let after = (next.x.clone(), next.x.clone());
            *state = next;
            Ok(Stepped {
                x,
                grad,
                before,
                after,
                hyper: None,
            })
        }
    }
}

fn diverged_row(t: usize, name: &str, obj: &Objective, state: Vector) -> TraceRow {
    let f = obj.value(t, &state).unwrap_or(f64::NAN);
    let grad_norm = obj.grad(t, &state).map_or(f64::NAN, |g| g.norm());
    TraceRow {
        t,
        optimizer: name.to_string(),
        x: state,
        f,
        grad_norm,
        v: None,
        w: None,
        delta_v: None,
        decrease_bound: None,
        certified: false,
        diverged: true,
    }
}
