//! High-order tuner for online optimization of time-varying convex
//! objectives, with stability certificates, Lyapunov monitors, baseline
//! optimizers, regret metrics and an experiment harness.

// Negated comparisons are how NaN gets rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod harness;
pub mod metrics;
pub mod objectives;
pub mod optimizers;
pub mod params;
pub mod stability;
pub mod vector;

pub use error::{Error, Result};
pub use objectives::{LogSumExpObjective, Objective, SwitchingRegression, TimeVaryingObjective};
pub use params::{AnalysisParams, HtHyperParams, ParamSchedule, Schedule, VectorSchedule};
pub use stability::{StabilityCertificate, Verdict};
pub use vector::Vector;
