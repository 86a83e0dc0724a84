//! Four-way blind-spot classification and the temporal remediation cost.
//!
//! Every predicate uses a strict inequality; values sitting exactly on a
//! threshold never fire.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::ToString;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ontology::{ConceptNode, DimensionId, EdgeRef, NodeRef, Ontology};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TaxonomyThresholds {
    /// Sparsity ratio below which a dimension counts as absent.
    pub eps_dom: f64,
    /// Minimum criticality for a severed edge to count.
    pub eps_str: f64,
    /// Minimum weight deficit.
    pub eps_wt: f64,
    /// Activation threshold on actual weight.
    pub eps_act: f64,
}

impl Default for TaxonomyThresholds {
    fn default() -> Self {
        TaxonomyThresholds {
            eps_dom: 0.15,
            eps_str: 0.5,
            eps_wt: 0.3,
            eps_act: 0.1,
        }
    }
}

impl TaxonomyThresholds {
    pub fn check(&self) -> Result<()> {
        for (name, v) in [
            ("eps_dom", self.eps_dom),
            ("eps_str", self.eps_str),
            ("eps_wt", self.eps_wt),
            ("eps_act", self.eps_act),
        ] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::Config(format!("{name} must lie in (0,1), got {v}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaxonomyReport {
    pub type1_dimensions: BTreeSet<DimensionId>,
    pub type2_edges: BTreeSet<EdgeRef>,
    pub type3_nodes: BTreeSet<NodeRef>,
    pub type4_nodes: BTreeSet<NodeRef>,
    /// Actual nodes skipped by the temporal check for lack of metadata.
    pub unevaluated_temporal: BTreeSet<NodeRef>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TemporalClassification {
    pub flagged: BTreeSet<NodeRef>,
    pub unevaluated: BTreeSet<NodeRef>,
}

/// Type I: dimensions whose actual/ideal node-count ratio is below `eps_dom`.
pub fn classify_domain_blindness(
    ideal: &Ontology,
    actual: &Ontology,
    eps_dom: f64,
) -> Result<BTreeSet<DimensionId>> {
    let mut out = BTreeSet::new();
    for (dim, ig) in &ideal.dimensions {
        if ig.nodes.is_empty() {
            return Err(Error::DegenerateIdeal(dim.clone()));
        }
        let present = actual.dimension(dim).map_or(0, |g| g.nodes.len());
        let ratio = present as f64 / ig.nodes.len() as f64;
        if ratio < eps_dom {
            out.insert(dim.clone());
        }
    }
    Ok(out)
}

/// Type II: ideal edges whose endpoints are both present in `actual` but
/// whose connection is missing, with criticality above `eps_str`.
pub fn classify_structural_blindness(
    ideal: &Ontology,
    actual: &Ontology,
    eps_str: f64,
) -> Result<BTreeSet<EdgeRef>> {
    let mut out = BTreeSet::new();
    for (dim, ig) in &ideal.dimensions {
        let Some(ag) = actual.dimension(dim) else {
            continue;
        };
        let present = ag.weights();
        let edges = ag.edge_set();
        for e in &ig.edges {
            let severed = present.contains_key(e.source.as_str())
                && present.contains_key(e.target.as_str())
                && !edges.contains(&(e.source.as_str(), e.target.as_str()));
            if !severed {
                continue;
            }
            let r = EdgeRef::new(dim.clone(), e.source.clone(), e.target.clone());
            let rho = e.rho.ok_or_else(|| Error::IncompleteIdeal {
                element: r.to_string(),
                field: "rho",
            })?;
            if rho > eps_str {
                out.insert(r);
            }
        }
    }
    Ok(out)
}

/// Type III: shared nodes with deficit above `eps_wt` and actual weight
/// below `eps_act`.
pub fn classify_weight_blindness(
    ideal: &Ontology,
    actual: &Ontology,
    eps_wt: f64,
    eps_act: f64,
) -> BTreeSet<NodeRef> {
    let mut out = BTreeSet::new();
    for (dim, ig) in &ideal.dimensions {
        let Some(ag) = actual.dimension(dim) else {
            continue;
        };
        let present = ag.weights();
        for n in &ig.nodes {
            if let Some(&w) = present.get(n.id.as_str()) {
                let delta = libm::fmax(0.0, n.weight - w);
                if delta > eps_wt && w < eps_act {
                    out.insert(NodeRef::new(dim.clone(), n.id.clone()));
                }
            }
        }
    }
    out
}

/// Type IV: nodes acquired after their optimal window closed.
pub fn classify_temporal_blindness(actual: &Ontology) -> TemporalClassification {
    let mut out = TemporalClassification::default();
    for (r, n) in actual.node_refs() {
        match (n.tau_acquire, n.tau_optimal, n.delta_tau_max) {
            (Some(acq), Some(opt), Some(max_delay)) => {
                if acq > opt + max_delay {
                    out.flagged.insert(r);
                }
            }
            _ => {
                out.unevaluated.insert(r);
            }
        }
    }
    out
}

pub fn classify(
    ideal: &Ontology,
    actual: &Ontology,
    t: &TaxonomyThresholds,
) -> Result<TaxonomyReport> {
    t.check()?;
    let temporal = classify_temporal_blindness(actual);
    Ok(TaxonomyReport {
        type1_dimensions: classify_domain_blindness(ideal, actual, t.eps_dom)?,
        type2_edges: classify_structural_blindness(ideal, actual, t.eps_str)?,
        type3_nodes: classify_weight_blindness(ideal, actual, t.eps_wt, t.eps_act),
        type4_nodes: temporal.flagged,
        unevaluated_temporal: temporal.unevaluated,
    })
}

/// `c0 · exp(λ · max(0, τ − τ_optimal))`.
pub fn remediation_cost(v: &ConceptNode, tau: f64) -> Result<f64> {
    let need = |value: Option<f64>, field: &'static str| {
        value.ok_or_else(|| Error::IncompleteNode {
            node: v.id.clone(),
            field,
        })
    };
    let c0 = need(v.c0, "c0")?;
    let lambda = need(v.lambda, "lambda")?;
    let tau_optimal = need(v.tau_optimal, "tau_optimal")?;
    Ok(c0 * libm::exp(lambda * libm::fmax(0.0, tau - tau_optimal)))
}
