//! Sufficient stability conditions for the tuner and the Lyapunov monitors
//! that check them along a run.
//!
//! Two Lyapunov candidates are used:
//!
//! ```text
//! V_t = |z_t - x*|^2 + |y_t - z_t|^2
//! W_t = |z_t - x*|^2 + xi_t |y_t - z_t|^2
//! ```
//!
//! The general condition set asks for `c5 < 0` and `c7 - c6^2 / (4 c5) <= 0`
//! with
//!
//! ```text
//! c5 = gamma^2 + xi'(gamma - mu)^2 - (1 + lambda) gamma
//! c6 = 2 [xi'(gamma - mu) + gamma]
//! c7 = xi' - xi (1 - beta)^-2
//! ```
//!
//! where `xi'` is the weight at the next step. The second inequality is
//! evaluated as `4 c5 c7 - c6^2 >= 0` so nothing is divided by a small `c5`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::vector::{check_dim, Vector};

/// Tolerance for the `gamma = mu / 2` equality and for the sign of the
/// discriminant.
pub const EQUALITY_TOL: f64 = 1e-12;

/// Relative tolerance of the decrease monitors: `1e-9 (1 + V_t)`.
pub const MONITOR_REL_TOL: f64 = 1e-9;

/// Relative tolerance for the exponential-rate check.
pub const EXP_REL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Stable,
    Unstable,
    /// `beta = 1`: `c7` is undefined, but `x_t = z_t` so the cross term
    /// vanishes and the iteration is plain GD on `z`.
    DegenerateStable,
}

impl Verdict {
    pub fn is_stable(self) -> bool {
        !matches!(self, Verdict::Unstable)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Stable => "stable",
            Verdict::Unstable => "unstable",
            Verdict::DegenerateStable => "degenerate_stable",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StabilityCertificate {
    /// `NaN` when `beta = 1`.
    pub c5: f64,
    pub c6: f64,
    pub c7: f64,
    pub c5_negative: bool,
    /// `4 c5 c7 - c6^2`.
    pub discriminant: f64,
    pub discriminant_ok: bool,
    pub verdict: Verdict,
    pub prop1_ok: bool,
    /// The `gamma in [1, 1.5], mu = 1, beta = 1/gamma` family.
    pub cor1_ok: bool,
    pub legacy_ok: bool,
}

impl StabilityCertificate {
    pub fn thm2_ok(&self) -> bool {
        self.verdict.is_stable()
    }
}

pub fn c_coeffs(
    gamma: f64,
    mu: f64,
    beta: f64,
    lambda: f64,
    xi_t: f64,
    xi_next: f64,
) -> Result<(f64, f64, f64)> {
    let beta_bar = 1.0 - beta;
    if beta_bar == 0.0 {
        return Err(Error::DegenerateBeta);
    }
    let gm = gamma - mu;
    let c5 = gamma * gamma + xi_next * gm * gm - (1.0 + lambda) * gamma;
    let c6 = 2.0 * (xi_next * gm + gamma);
    let c7 = xi_next - xi_t / (beta_bar * beta_bar);
    Ok((c5, c6, c7))
}

/// `beta in [0, 1]`, `mu in [epsilon, 1]`, `gamma = mu / 2`.
pub fn check_prop1(beta: f64, mu: f64, gamma: f64, epsilon: f64) -> bool {
    epsilon > 0.0
        && (0.0..=1.0).contains(&beta)
        && mu >= epsilon
        && mu <= 1.0
        && (gamma - 0.5 * mu).abs() <= EQUALITY_TOL
}

/// Membership in the simplified family: `gamma in [1, 1.5]`, `mu = 1`,
/// `beta = 1/gamma`.
pub fn check_cor1(gamma: f64, mu: f64, beta: f64) -> bool {
    (1.0..=1.5).contains(&gamma)
        && (mu - 1.0).abs() <= EQUALITY_TOL
        && (beta - 1.0 / gamma).abs() <= EQUALITY_TOL
}

/// Constraint of the two-gradient legacy step:
/// `beta in (0, 1)`, `gamma in (0, beta(2 - beta)/(16 + beta^2)]`.
pub fn check_legacy(gamma: f64, beta: f64) -> bool {
    beta > 0.0 && beta < 1.0 && gamma > 0.0 && gamma <= crate::optimizers::legacy_gamma_cap(beta)
}

pub fn check_thm2(
    gamma: f64,
    mu: f64,
    beta: f64,
    lambda: f64,
    xi_t: f64,
    xi_next: f64,
) -> StabilityCertificate {
    let prop1_ok = check_prop1(beta, mu, gamma, f64::MIN_POSITIVE);
    let cor1_ok = check_cor1(gamma, mu, beta);
    let legacy_ok = check_legacy(gamma, beta);
    match c_coeffs(gamma, mu, beta, lambda, xi_t, xi_next) {
        Ok((c5, c6, c7)) => {
            let discriminant = 4.0 * c5 * c7 - c6 * c6;
            let c5_negative = c5 < 0.0;
            // The boundary gamma = 1.5 evaluates to a few ulps below zero.
            let discriminant_ok = discriminant >= -EQUALITY_TOL;
            StabilityCertificate {
                c5,
                c6,
                c7,
                c5_negative,
                discriminant,
                discriminant_ok,
                verdict: if c5_negative && discriminant_ok {
                    Verdict::Stable
                } else {
                    Verdict::Unstable
                },
                prop1_ok,
                cor1_ok,
                legacy_ok,
            }
        }
        Err(_) => StabilityCertificate {
            c5: f64::NAN,
            c6: f64::NAN,
            c7: f64::NAN,
            c5_negative: false,
            discriminant: f64::NAN,
            discriminant_ok: false,
            verdict: Verdict::DegenerateStable,
            prop1_ok,
            cor1_ok,
            legacy_ok,
        },
    }
}

/// Contraction factor for strongly convex objectives under the simple
/// condition set. Returns `(rho, omega)` with `rho = (mu/2)(sigma/N)` and
///
/// ```text
/// omega = min{ (1 - nu)(1 - bb^2),  rho nu (1 - bb^2) / (rho bb^2 + nu (1 - bb^2)) }
/// ```
///
/// where `bb = 1 - beta`. `beta = 0` gives `omega = 0`.
pub fn omega(mu: f64, sigma: f64, normalizer: f64, beta: f64, nu: f64) -> Result<(f64, f64)> {
    if !(sigma > 0.0) || !(normalizer >= sigma) {
        return Err(Error::InvalidHyperParameter(format!(
            "need 0 < sigma <= N, got sigma={sigma}, N={normalizer}"
        )));
    }
    if !(nu > 0.0 && nu < 1.0) || !(0.0..=1.0).contains(&beta) {
        return Err(Error::InvalidAnalysisParameter(format!(
            "need nu in (0, 1) and beta in [0, 1], got nu={nu}, beta={beta}"
        )));
    }
    let rho = 0.5 * mu * sigma / normalizer;
    let bb2 = (1.0 - beta) * (1.0 - beta);
    let spread = 1.0 - bb2;
    let first = (1.0 - nu) * spread;
    let second = rho * nu * spread / (rho * bb2 + nu * spread);
    Ok((rho, first.min(second)))
}

pub fn lyapunov_v(y: &[f64], z: &[f64], xstar: &[f64]) -> Result<f64> {
    lyapunov_w(y, z, xstar, 1.0)
}

pub fn lyapunov_w(y: &[f64], z: &[f64], xstar: &[f64], xi: f64) -> Result<f64> {
    check_dim(z.len(), y.len())?;
    check_dim(z.len(), xstar.len())?;
    let z = Vector::from(z);
    Ok(z.dist_sq(xstar) + xi * z.dist_sq(y))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonitorVerdict {
    pub delta: f64,
    /// `2 (1 - lambda)(gamma / N)(f* - f(x_t))`; never positive.
    pub bound: f64,
    pub tol: f64,
    pub holds: bool,
}

/// The certified per-step decrease `2 (1 - lambda)(gamma/N)(f* - f)`.
/// `lambda = 0` is the simple-condition bound on `V`.
pub fn decrease_bound(gamma: f64, normalizer: f64, f_at_x: f64, f_at_xstar: f64, lambda: f64) -> f64 {
    2.0 * (1.0 - lambda) * (gamma / normalizer) * (f_at_xstar - f_at_x)
}

/// Check `L_{t+1} - L_t <= bound + 1e-9 (1 + L_t)` for a Lyapunov value `L`
/// (`V` with `lambda = 0`, `W` otherwise).
pub fn monitor_decrease(
    v_t: f64,
    v_next: f64,
    gamma: f64,
    normalizer: f64,
    f_at_x: f64,
    f_at_xstar: f64,
    lambda: f64,
) -> MonitorVerdict {
    let delta = v_next - v_t;
    let bound = decrease_bound(gamma, normalizer, f_at_x, f_at_xstar, lambda);
    let tol = MONITOR_REL_TOL * (1.0 + v_t.abs());
    MonitorVerdict {
        delta,
        bound,
        tol,
        holds: delta <= bound + tol,
    }
}

/// `V_{t+1} <= (1 - omega_t) V_t` at every step, to a relative tolerance.
pub fn check_exponential(v: &[f64], omegas: &[f64]) -> bool {
    first_exponential_violation(v, omegas).is_none()
}

/// Index `t` of the first step with `V_{t+1} > (1 - omega_t) V_t (1 + tol)`.
pub fn first_exponential_violation(v: &[f64], omegas: &[f64]) -> Option<usize> {
    v.windows(2)
        .zip(omegas)
        .position(|(w, om)| w[1] > (1.0 - om) * w[0] * (1.0 + EXP_REL_TOL))
}
