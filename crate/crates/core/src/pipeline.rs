//! The full analysis: diff, severity, taxonomy, patterns, resilience.

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::config::{AnalysisConfig, SigmaMaxPolicy};
use crate::diff::{diff, severity, stage_mismatch, BlindSpot, SeverityReport};
use crate::error::Result;
use crate::ontology::{DimensionId, Ontology};
use crate::patterns::{
    detect_chain_break, detect_lockin, detect_mono, detect_resonance, detect_window_closure,
    dominant_dimension, switch_cost, InvestmentHistory, PatternFinding, PatternKind, Shock,
};
use crate::resilience::{resilience, ResilienceReport};
use crate::taxonomy::{classify, TaxonomyReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StageMismatch {
    pub ideal: u32,
    pub actual: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SkippedPattern {
    pub pattern: PatternKind,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SwitchCostReport {
    /// Dimension being left; `None` when `actual` has no weighted dimension.
    pub from_dimension: Option<DimensionId>,
    pub stage: u32,
    pub cost: f64,
}

/// Optional inputs that some patterns need.
#[derive(Debug, Clone, Copy, Default)]
pub struct Context<'a> {
    pub shock: Option<&'a Shock>,
    pub investments: Option<&'a InvestmentHistory>,
    pub tau_now: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatternScan {
    pub findings: Vec<PatternFinding>,
    pub skipped: Vec<SkippedPattern>,
    pub switch_cost: SwitchCostReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisReport {
    pub config: AnalysisConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stage_mismatch: Option<StageMismatch>,
    pub blind_spot: BlindSpot,
    pub severity: SeverityReport,
    pub taxonomy: TaxonomyReport,
    pub patterns: PatternScan,
    pub resilience: ResilienceReport,
}

/// Severity with the configured `sigma_max` policy applied.
pub fn severity_with_policy(
    bs: &BlindSpot,
    ideal: &Ontology,
    cfg: &AnalysisConfig,
) -> Result<SeverityReport> {
    let mut s = severity(bs, ideal)?;
    if let SigmaMaxPolicy::Override(v) = cfg.sigma_max {
        s.sigma_max = v;
    }
    Ok(s)
}

/// Switch cost out of the dominant dimension of `actual` at its own stage.
pub fn dominant_switch_cost(
    actual: &Ontology,
    investments: Option<&InvestmentHistory>,
    cfg: &AnalysisConfig,
) -> Result<SwitchCostReport> {
    let empty = InvestmentHistory::default();
    let hist = investments.unwrap_or(&empty);
    let from = dominant_dimension(actual)?;
    let cost = match &from {
        Some(d) => switch_cost(hist, actual, d, actual.stage, &cfg.patterns)?,
        None => 0.0,
    };
    Ok(SwitchCostReport {
        from_dimension: from,
        stage: actual.stage,
        cost,
    })
}

/// Runs every pattern detector whose inputs are available.
pub fn scan_patterns(
    ideal: &Ontology,
    actual: &Ontology,
    bs: &BlindSpot,
    sigma: f64,
    ctx: &Context<'_>,
    cfg: &AnalysisConfig,
) -> Result<PatternScan> {
    cfg.check()?;
    let p = &cfg.patterns;
    let mut findings = Vec::new();
    let mut skipped = Vec::new();

    findings.push(detect_mono(actual, p)?);
    match ctx.tau_now {
        Some(tau) => findings.push(detect_window_closure(actual, tau, p)?),
        None => skipped.push(SkippedPattern {
            pattern: PatternKind::WindowClosure,
            reason: "no current time available".into(),
        }),
    }
    findings.push(detect_chain_break(ideal, actual, p));
    match ctx.shock {
        Some(shock) => findings.push(detect_resonance(shock, bs, ideal, sigma, &cfg.taxonomy, p)?),
        None => skipped.push(SkippedPattern {
            pattern: PatternKind::Resonance,
            reason: "no shock supplied".into(),
        }),
    }
    let sc = dominant_switch_cost(actual, ctx.investments, cfg)?;
    findings.push(detect_lockin(sc.cost, p));

    Ok(PatternScan {
        findings,
        skipped,
        switch_cost: sc,
    })
}

pub fn analyze(
    ideal: &Ontology,
    actual: &Ontology,
    ctx: &Context<'_>,
    cfg: &AnalysisConfig,
) -> Result<AnalysisReport> {
    cfg.check()?;
    let blind_spot = diff(ideal, actual)?;
    let severity = severity_with_policy(&blind_spot, ideal, cfg)?;
    let taxonomy = classify(ideal, actual, &cfg.taxonomy)?;
    let patterns = scan_patterns(ideal, actual, &blind_spot, severity.sigma, ctx, cfg)?;
    let resilience = resilience(
        severity.sigma,
        severity.sigma_max,
        actual,
        patterns.switch_cost.cost,
        cfg.patterns.omega_budget,
        cfg.epsilon,
    )?;
    Ok(AnalysisReport {
        config: *cfg,
        stage_mismatch: stage_mismatch(ideal, actual)
            .map(|(ideal, actual)| StageMismatch { ideal, actual }),
        blind_spot,
        severity,
        taxonomy,
        patterns,
        resilience,
    })
}
