use std::process::Command;

use hightuner::harness::{self, output, presets, ExperimentConfig, Normalizer, ObjectiveSpec, OptimizerKind, OptimizerSpec};
use hightuner::params::ParamSchedule;
use hightuner::{TimeVaryingObjective, Vector};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hightuner"))
}

fn single_gd(horizon: usize, init: f64) -> ExperimentConfig {
    ExperimentConfig {
        schema_version: 1,
        name: None,
        objective: ObjectiveSpec::LogSumExp {
            a: ParamSchedule::constant(5.0),
            b: ParamSchedule::constant(7.0),
            c: ParamSchedule::constant(0.0),
        },
        optimizers: vec![OptimizerSpec {
            name: "gd".into(),
            kind: OptimizerKind::Gd {
                normalizer: Normalizer::fixed(49.0),
            },
            init: Vector::scalar(init),
            init_z: None,
        }],
        horizon,
        monitors: Default::default(),
        seed: 0,
        output: None,
    }
}

#[test]
fn gd_at_the_optimum_for_one_step() {
    let trace = harness::run_experiment(&single_gd(1, 0.0)).unwrap();
    assert_eq!(trace.rows.len(), 1);
    let r = &trace.rows[0];
    assert!((r.f - 10f64.ln()).abs() < 1e-12);
    assert_eq!(r.delta_v, Some(0.0));
    assert_eq!(r.decrease_bound.map(f64::abs), Some(0.0));
    assert!(r.certified && !r.diverged);
}

#[test]
fn fig1_tuner_at_gamma_one_matches_gd_rows() {
    let trace = harness::repro("fig1", None).unwrap();
    let gd: Vec<_> = trace.rows_for("gd").map(|r| r.x.clone()).collect();
    let ht: Vec<_> = trace.rows_for("ht_g1").map(|r| r.x.clone()).collect();
    assert_eq!(gd.len(), 100);
    assert_eq!(gd, ht);
    // Uncertified family members are still traced.
    assert!(trace.rows_for("ht_g2").all(|r| !r.certified));
    assert!(trace.rows_for("ht_g1.5").all(|r| r.certified));
    assert!(trace.violations.is_empty());
}

#[test]
fn fig3_shape_and_regret_table() {
    let trace = harness::repro("fig3", None).unwrap();
    assert_eq!(trace.rows.len(), 400 * 3);
    assert_eq!(trace.regret.len(), 400 * 3);
    for name in ["ht", "adam", "adagrad"] {
        let ts: Vec<usize> = trace.rows_for(name).map(|r| r.t).collect();
        assert_eq!(ts, (0..400).collect::<Vec<_>>());
    }
    // The comparator is shared across optimizers.
    let xbar = |name: &str| {
        trace
            .regret
            .iter()
            .filter(|r| r.optimizer == name)
            .map(|r| r.report.x_bar.clone())
            .collect::<Vec<_>>()
    };
    assert_eq!(xbar("ht"), xbar("adam"));
}

#[test]
fn example1_second_coordinate_waits_for_excitation() {
    let tau = 100;
    let trace = harness::repro("example1", Some(tau)).unwrap();
    for name in trace.optimizer_names() {
        for r in trace.rows_for(name).filter(|r| r.t < tau) {
            assert_eq!(r.x[1], 0.0, "{name} t={}", r.t);
        }
    }
}

#[test]
fn traces_are_byte_reproducible() {
    for name in presets::PRESETS {
        let a = output::trace_to_string(&harness::repro(name, None).unwrap());
        let b = output::trace_to_string(&harness::repro(name, None).unwrap());
        assert_eq!(a, b, "{name}");
    }
}

#[test]
fn divergence_is_flagged_and_isolated() {
    // GD at N = 0.01 on a 49-smooth objective blows up.
    let mut cfg = single_gd(200, 5.0);
    let mut wild = cfg.optimizers[0].clone();
    wild.name = "wild".into();
    wild.kind = OptimizerKind::Gd {
        normalizer: Normalizer::fixed(0.01),
    };
    cfg.optimizers.push(wild);
    cfg.objective = ObjectiveSpec::Quadratic {
        weights: Vector::scalar(49.0),
        center: hightuner::params::VectorSchedule::constant(Vector::scalar(0.0)),
    };
    let trace = harness::run_experiment(&cfg).unwrap();
    let wild: Vec<_> = trace.rows_for("wild").collect();
    let last = wild.last().unwrap();
    assert!(last.diverged);
    assert!(wild[..wild.len() - 1].iter().all(|r| !r.diverged));
    assert!(wild.len() < 200);

    let alone = harness::run_experiment(&ExperimentConfig {
        optimizers: cfg.optimizers[..1].to_vec(),
        ..cfg.clone()
    })
    .unwrap();
    let together: Vec<_> = trace.rows_for("gd").cloned().collect();
    assert_eq!(together, alone.rows);
}

#[test]
fn fig2_fixed_normalizer_group_stays_uncertified_after_the_switch() {
    let trace = harness::repro("fig2", None).unwrap();
    assert!(trace.rows_for("gd").filter(|r| r.t >= 50).all(|r| !r.certified));
    assert!(trace.rows_for("ht").all(|r| r.certified));
    assert!(trace.rows_for("tn_gd").all(|r| r.certified));
    assert!(trace.violations.is_empty());
}

#[test]
fn v_columns_empty_without_optimum() {
    let mut cfg = single_gd(5, 1.0);
    cfg.objective = ObjectiveSpec::Regression {
        data: hightuner::params::VectorSchedule::constant(Vector::scalar(2.0)),
        optimum: None,
    };
    let csv = output::trace_to_string(&harness::run_experiment(&cfg).unwrap());
    let line = csv.lines().nth(1).unwrap();
    let fields: Vec<&str> = line.split(',').collect();
    assert_eq!(fields.len(), 11);
    assert_eq!(&fields[5..9], &["", "", "", ""]);
    let obj = cfg.objective.build().unwrap();
    assert!(obj.optimum(0).is_none());
}

#[test]
fn cli_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fig1.csv");
    let status = bin().args(["repro", "fig1", "--out"]).arg(&out).status().unwrap();
    assert_eq!(status.code(), Some(0));
    assert!(out.exists() && dir.path().join("fig1.sweep.csv").exists());

    let cfg_path = dir.path().join("cfg.json");
    std::fs::write(&cfg_path, single_gd(10, 3.0).to_json()).unwrap();
    let run = bin().args(["run", "--config"]).arg(&cfg_path).arg("--out").arg(dir.path().join("run.csv")).status().unwrap();
    assert_eq!(run.code(), Some(0));

    std::fs::write(&cfg_path, single_gd(0, 3.0).to_json()).unwrap();
    let bad = bin().args(["run", "--config"]).arg(&cfg_path).status().unwrap();
    assert_eq!(bad.code(), Some(2));

    let missing = bin().args(["run", "--config"]).arg(dir.path().join("nope.json")).status().unwrap();
    assert_eq!(missing.code(), Some(3));

    let sweep = bin()
        .args(["sweep", "--gamma-min", "1", "--gamma-max", "2", "--steps", "5"])
        .output()
        .unwrap();
    assert_eq!(sweep.status.code(), Some(0));
    let text = String::from_utf8(sweep.stdout).unwrap();
    assert_eq!(text.lines().count(), 6);
    assert!(text.lines().nth(3).unwrap().ends_with(",true"));

    let bad_sweep = bin().args(["sweep", "--gamma-min", "0.5", "--gamma-max", "2", "--steps", "5"]).status().unwrap();
    assert_eq!(bad_sweep.code(), Some(2));

    std::fs::write(&cfg_path, presets::fig1().to_json()).unwrap();
    let cert = bin().args(["certify", "--config"]).arg(&cfg_path).output().unwrap();
    assert_eq!(cert.status.code(), Some(0));
    assert!(String::from_utf8(cert.stdout).unwrap().contains("ht_g1.5 [ht] t=0..99"));
}
