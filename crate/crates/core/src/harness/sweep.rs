//! Stability coefficients across the `gamma in [1, 1.5]` family.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::stability::check_thm2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub gamma: f64,
    pub c5: f64,
    pub c6: f64,
    pub c7: f64,
    pub discriminant: f64,
    pub verdict: bool,
}

/// `steps` grid points from `gamma_min` to `gamma_max` inclusive, each
/// evaluated at `mu = 1`, `beta = 1/gamma`, `lambda = 1`, `xi = 1`.
///
/// Points are interpolated from both endpoints so decimal grids hit values
/// such as 1.5 exactly.
pub fn sweep_gamma(gamma_min: f64, gamma_max: f64, steps: usize) -> Result<Vec<SweepRow>> {
    if !(gamma_min >= 1.0 && gamma_min < gamma_max && gamma_max.is_finite()) {
        return Err(Error::Config(format!(
            "sweep needs 1 <= gamma_min < gamma_max, got [{gamma_min}, {gamma_max}]"
        )));
    }
    if steps < 2 {
        return Err(Error::Config(format!("sweep needs steps >= 2, got {steps}")));
    }
    let last = (steps - 1) as f64;
    Ok((0..steps)
        .map(|i| {
            let i = i as f64;
            let gamma = (gamma_min * (last - i) + gamma_max * i) / last;
            let cert = check_thm2(gamma, 1.0, 1.0 / gamma, 1.0, 1.0, 1.0);
            SweepRow {
                gamma,
                c5: cert.c5,
                c6: cert.c6,
                c7: cert.c7,
                discriminant: cert.discriminant,
                verdict: cert.thm2_ok(),
            }
        })
        .collect())
}

/// Number of grid points at spacing `step` over `[gamma_min, gamma_max]`.
pub fn steps_for_spacing(gamma_min: f64, gamma_max: f64, step: f64) -> usize {
    ((gamma_max - gamma_min) / step).round() as usize + 1
}
