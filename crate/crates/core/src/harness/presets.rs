//! Built-in experiment configurations.

use crate::error::{Error, Result};
use crate::optimizers::{AdagradConfig, AdamConfig};
use crate::params::{AnalysisParams, ParamSchedule, VectorSchedule};
use crate::vector::Vector;

use super::config::{
    ExperimentConfig, Monitors, Normalizer, NormalizerRule, ObjectiveSpec, OptimizerKind, OptimizerSpec,
    SCHEMA_VERSION,
};

pub const PRESETS: [&str; 4] = ["fig1", "fig2", "fig3", "example1"];

/// Default switch time for `example1`.
pub const EXAMPLE1_TAU: usize = 100;

/// Steps after the switch in `example1`.
pub const EXAMPLE1_TAIL: usize = 200;

fn sched(points: &[(usize, f64)]) -> ParamSchedule {
    ParamSchedule::new(points.to_vec()).expect("preset schedules are well formed")
}

fn constant(v: f64) -> ParamSchedule {
    ParamSchedule::constant(v)
}

fn lse(a: ParamSchedule, b: ParamSchedule, c: ParamSchedule) -> ObjectiveSpec {
    ObjectiveSpec::LogSumExp { a, b, c }
}

fn opt(name: &str, kind: OptimizerKind, init: &[f64]) -> OptimizerSpec {
    OptimizerSpec {
        name: name.to_string(),
        kind,
        init: Vector::new(init.to_vec()),
        init_z: None,
    }
}

pub fn gd(normalizer: Normalizer) -> OptimizerKind {
    OptimizerKind::Gd { normalizer }
}

pub fn nagd(normalizer: Normalizer) -> OptimizerKind {
    OptimizerKind::Nagd {
        normalizer,
        analysis: AnalysisParams::default(),
    }
}

/// The `mu = 1, beta = 1/gamma` family.
pub fn ht_family(gamma: f64, normalizer: Normalizer) -> OptimizerKind {
    OptimizerKind::Ht {
        gamma: constant(gamma),
        mu: constant(1.0),
        beta: constant(1.0 / gamma),
        normalizer,
        analysis: AnalysisParams::BOUNDEDNESS,
    }
}

fn config(name: &str, objective: ObjectiveSpec, optimizers: Vec<OptimizerSpec>, horizon: usize) -> ExperimentConfig {
    ExperimentConfig {
        schema_version: SCHEMA_VERSION,
        name: Some(name.to_string()),
        objective,
        optimizers,
        horizon,
        monitors: Monitors::default(),
        seed: 0,
        output: None,
    }
}

/// Abrupt shift of the minimizer: `c` jumps 0 -> 5 at t = 50. GD, NAGD and
/// the tuner at `gamma = 1..=10` and `1.5`, all at N = 49 from x = 5.
pub fn fig1() -> ExperimentConfig {
    let n = || Normalizer::fixed(49.0);
    let init = [5.0];
    let mut opts = vec![opt("gd", gd(n()), &init), opt("nagd", nagd(n()), &init)];
    for g in 1..=10 {
        opts.push(opt(&format!("ht_g{g}"), ht_family(g as f64, n()), &init));
    }
    opts.push(opt("ht_g1.5", ht_family(1.5, n()), &init));
    config(
        "fig1",
        lse(constant(5.0), constant(7.0), sched(&[(0, 0.0), (50, 5.0)])),
        opts,
        100,
    )
}

/// Abrupt change of curvature: `b` jumps 7 -> 21 at t = 50. GD and NAGD keep
/// N = 49; their smoothness-tracking variants and the tuner switch to 441.
pub fn fig2() -> ExperimentConfig {
    let fixed = || Normalizer::fixed(49.0);
    let tracked = || Normalizer::Rule(NormalizerRule::Smoothness);
    let init = [7.0];
    let opts = vec![
        opt("gd", gd(fixed()), &init),
        opt("nagd", nagd(fixed()), &init),
        opt("tn_gd", gd(tracked()), &init),
        opt("tn_nagd", nagd(tracked()), &init),
        opt(
            "ht",
            ht_family(1.5, Normalizer::Schedule(sched(&[(0, 49.0), (50, 441.0)]))),
            &init,
        ),
    ];
    config(
        "fig2",
        lse(constant(5.0), sched(&[(0, 7.0), (50, 21.0)]), constant(0.0)),
        opts,
        201,
    )
}

/// Three switches of the minimizer (0 -> 5 -> -4 -> 0) over 400 steps;
/// Adam and Adagrad at alpha = 1 against the tuner, with regret tracked.
pub fn fig3() -> ExperimentConfig {
    let init = [5.0];
    let opts = vec![
        opt("ht", ht_family(1.5, Normalizer::fixed(49.0)), &init),
        opt("adam", OptimizerKind::Adam(AdamConfig::with_alpha(1.0)), &init),
        opt("adagrad", OptimizerKind::Adagrad(AdagradConfig::with_alpha(1.0)), &init),
    ];
    let mut cfg = config(
        "fig3",
        lse(
            constant(5.0),
            constant(7.0),
            sched(&[(0, 0.0), (50, 5.0), (150, -4.0), (300, 0.0)]),
        ),
        opts,
        400,
    );
    cfg.monitors.regret = true;
    cfg
}

/// Two-dimensional streaming regression whose data only excites the second
/// coordinate from `tau` on.
pub fn example1(tau: usize) -> ExperimentConfig {
    let n = || Normalizer::fixed(2.0);
    let init = [0.0, 0.0];
    let opts = vec![
        opt("gd", gd(n()), &init),
        opt("nagd", nagd(n()), &init),
        opt("ht", ht_family(1.5, n()), &init),
        opt("adam", OptimizerKind::Adam(AdamConfig::with_alpha(1.0)), &init),
        opt("adagrad", OptimizerKind::Adagrad(AdagradConfig::with_alpha(1.0)), &init),
    ];
    let e1 = Vector::new(vec![1.0, 0.0]);
    let e2 = Vector::new(vec![0.0, 1.0]);
    let data = if tau == 0 {
        VectorSchedule::constant(e2)
    } else {
        VectorSchedule::new(vec![(0, e1), (tau, e2)]).expect("tau > 0")
    };
    config(
        "example1",
        ObjectiveSpec::Regression {
            data,
            optimum: Some(Vector::new(vec![1.0, 1.0])),
        },
        opts,
        tau + EXAMPLE1_TAIL,
    )
}

/// `tau` only applies to `example1`.
pub fn preset(name: &str, tau: Option<usize>) -> Result<ExperimentConfig> {
    match name {
        "fig1" => Ok(fig1()),
        "fig2" => Ok(fig2()),
        "fig3" => Ok(fig3()),
        "example1" => Ok(example1(tau.unwrap_or(EXAMPLE1_TAU))),
        other => Err(Error::UnknownPreset(other.to_string())),
    }
}
