#![allow(dead_code)]

use hightuner::objectives::{DiagonalQuadratic, LogSumExpObjective, Objective, SwitchingRegression};
use hightuner::params::{ParamSchedule, VectorSchedule};
use hightuner::Vector;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

/// Piecewise-constant schedule over `[0, horizon)` with up to `max_switches`
/// switches and values drawn from `[lo, hi)`.
pub fn random_schedule(r: &mut ChaCha8Rng, horizon: usize, max_switches: usize, lo: f64, hi: f64) -> ParamSchedule {
    let switches = r.gen_range(0..=max_switches);
    let mut starts: Vec<usize> = (0..switches).map(|_| r.gen_range(1..horizon)).collect();
    starts.sort_unstable();
    starts.dedup();
    let mut segs = vec![(0, r.gen_range(lo..hi))];
    segs.extend(starts.into_iter().map(|s| (s, r.gen_range(lo..hi))));
    ParamSchedule::new(segs).unwrap()
}

pub fn random_lse(r: &mut ChaCha8Rng, horizon: usize) -> LogSumExpObjective {
    LogSumExpObjective::new(
        random_schedule(r, horizon, 2, 1.0, 5.0),
        random_schedule(r, horizon, 2, 0.5, 7.0),
        random_schedule(r, horizon, 3, -5.0, 5.0),
    )
    .unwrap()
}

pub fn random_vector(r: &mut ChaCha8Rng, dim: usize, lo: f64, hi: f64) -> Vector {
    Vector::new((0..dim).map(|_| r.gen_range(lo..hi)).collect())
}

/// Uniform in the ball of the given radius.
pub fn random_in_ball(r: &mut ChaCha8Rng, dim: usize, radius: f64) -> Vector {
    loop {
        let v = random_vector(r, dim, -radius, radius);
        if v.norm() <= radius {
            return v;
        }
    }
}

pub fn random_quadratic(r: &mut ChaCha8Rng, dim: usize, horizon: usize) -> DiagonalQuadratic {
    let weights = random_vector(r, dim, 0.1, 10.0);
    let switch = r.gen_range(1..horizon);
    let center = VectorSchedule::new(vec![
        (0, random_vector(r, dim, -5.0, 5.0)),
        (switch, random_vector(r, dim, -5.0, 5.0)),
    ])
    .unwrap();
    DiagonalQuadratic::new(weights, center).unwrap()
}

pub fn random_regression(r: &mut ChaCha8Rng, dim: usize, horizon: usize) -> SwitchingRegression {
    let switch = r.gen_range(1..horizon);
    let data = VectorSchedule::new(vec![
        (0, random_vector(r, dim, -2.0, 2.0)),
        (switch, random_vector(r, dim, -2.0, 2.0)),
    ])
    .unwrap();
    SwitchingRegression::new(data, None).unwrap()
}

/// One of each bundled objective kind, plus the example-1 regression with
/// its known optimum.
pub fn bundled(r: &mut ChaCha8Rng, horizon: usize) -> Vec<(&'static str, Objective)> {
    vec![
        ("log_sum_exp", Objective::LogSumExp(random_lse(r, horizon))),
        ("quadratic", Objective::Quadratic(random_quadratic(r, 3, horizon))),
        ("regression", Objective::Regression(random_regression(r, 3, horizon))),
        ("delayed_switch", Objective::Regression(SwitchingRegression::delayed_switch(horizon / 2))),
    ]
}
