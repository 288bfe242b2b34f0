//! Per-step stability certificates of a config, without running it.

use serde::Serialize;

use crate::error::Result;
use crate::objectives::TimeVaryingObjective;
use crate::stability::{check_legacy, check_prop1, check_thm2};

use super::config::{ExperimentConfig, OptimizerKind};

/// A maximal run of steps `[start, end]` with the same certificate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificateSpan {
    pub optimizer: String,
    pub kind: &'static str,
    pub start: usize,
    pub end: usize,
    pub gamma: Option<f64>,
    pub mu: Option<f64>,
    pub beta: Option<f64>,
    pub normalizer: Option<f64>,
    pub smoothness: f64,
    /// `stable`, `unstable`, `degenerate_stable`, `legacy_ok`,
    /// `legacy_violated` or `none`.
    pub verdict: &'static str,
    pub prop1: bool,
    pub cor1: bool,
    pub discriminant: Option<f64>,
    pub certified: bool,
}

impl CertificateSpan {
    fn same_certificate(&self, other: &CertificateSpan) -> bool {
        let key = |s: &CertificateSpan| {
            (
                s.gamma.map(f64::to_bits),
                s.mu.map(f64::to_bits),
                s.beta.map(f64::to_bits),
                s.normalizer.map(f64::to_bits),
                s.smoothness.to_bits(),
                s.verdict,
                s.prop1,
                s.cor1,
                s.certified,
            )
        };
        key(self) == key(other)
    }

    pub fn describe(&self) -> String {
        let num = |v: Option<f64>| v.map_or("-".to_string(), |v| format!("{v}"));
        format!(
            "{} [{}] t={}..{} gamma={} mu={} beta={} N={} L={} verdict={} prop1={} cor1={} disc={} certified={}",
            self.optimizer,
            self.kind,
            self.start,
            self.end,
            num(self.gamma),
            num(self.mu),
            num(self.beta),
            num(self.normalizer),
            self.smoothness,
            self.verdict,
            self.prop1,
            self.cor1,
            self.discriminant.filter(|d| d.is_finite()).map_or("-".to_string(), |d| format!("{d:.6e}")),
            self.certified,
        )
    }
}

pub fn certify(cfg: &ExperimentConfig) -> Result<Vec<CertificateSpan>> {
    cfg.validate()?;
    let obj = cfg.objective.build()?;
    let smoothness = |t: usize| obj.smoothness_bound(t);
    let mut spans: Vec<CertificateSpan> = Vec::new();
    for spec in &cfg.optimizers {
        let analysis = spec.kind.analysis();
        let mut current: Option<CertificateSpan> = None;
        for t in 0..cfg.horizon {
            let l = smoothness(t);
            let mut span = CertificateSpan {
                optimizer: spec.name.clone(),
                kind: spec.kind.label(),
                start: t,
                end: t,
                gamma: None,
                mu: None,
                beta: None,
                normalizer: None,
                smoothness: l,
                verdict: "none",
                prop1: false,
                cor1: false,
                discriminant: None,
                certified: false,
            };
            if let Some(h) = spec.kind.hyper_at(t, smoothness) {
                let cert = check_thm2(h.gamma, h.mu, h.beta, analysis.lambda, analysis.xi, analysis.xi);
                let prop1 = check_prop1(h.beta, h.mu, h.gamma, analysis.epsilon);
                span.gamma = Some(h.gamma);
                span.mu = Some(h.mu);
                span.beta = Some(h.beta);
                span.normalizer = Some(h.normalizer);
                span.verdict = cert.verdict.as_str();
                span.prop1 = prop1;
                span.cor1 = cert.cor1_ok;
                span.discriminant = Some(cert.discriminant);
                span.certified = h.normalizer >= l && (prop1 || cert.thm2_ok());
            } else if let OptimizerKind::LegacyHt {
                gamma,
                beta,
                normalizer,
            } = &spec.kind
            {
                let n = normalizer.at(t, smoothness);
                span.gamma = Some(*gamma);
                span.beta = Some(*beta);
                span.normalizer = Some(n);
                span.verdict = if check_legacy(*gamma, *beta) {
                    "legacy_ok"
                } else {
                    "legacy_violated"
                };
            }
            match current.as_mut() {
                Some(c) if c.same_certificate(&span) => c.end = t,
                _ => {
                    if let Some(done) = current.replace(span) {
                        spans.push(done);
                    }
                }
            }
        }
        spans.extend(current);
    }
    Ok(spans)
}
