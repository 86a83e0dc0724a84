//! Ontological difference and blind-spot severity.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::ToString;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ontology::{validate, EdgeRef, NodeRef, Ontology};
use crate::serde_util;

/// Output of `ideal ⊖ actual`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlindSpot {
    pub missing_nodes: BTreeSet<NodeRef>,
    pub missing_edges: BTreeSet<EdgeRef>,
    /// Positive weight deficits on shared nodes.
    #[serde(with = "serde_util::node_values")]
    pub delta_w: BTreeMap<NodeRef, f64>,
}

impl BlindSpot {
    pub fn is_empty(&self) -> bool {
        self.missing_nodes.is_empty() && self.missing_edges.is_empty() && self.delta_w.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeverityReport {
    pub sigma: f64,
    pub node_absence_term: f64,
    pub causal_absence_term: f64,
    pub weight_suppression_term: f64,
    pub sigma_max: f64,
}

/// Computes the blind spot of `actual` relative to `ideal`. Nodes are
/// matched by `(dimension, id)`. Both ontologies must validate; a stage
/// mismatch is not an error (see [`stage_mismatch`]).
pub fn diff(ideal: &Ontology, actual: &Ontology) -> Result<BlindSpot> {
    validate(ideal).into_result()?;
    validate(actual).into_result()?;
    Ok(diff_unchecked(ideal, actual))
}

pub(crate) fn diff_unchecked(ideal: &Ontology, actual: &Ontology) -> BlindSpot {
    let mut bs = BlindSpot::default();
    for (dim, ig) in &ideal.dimensions {
        let ag = actual.dimension(dim);
        let actual_weights = ag.map(|g| g.weights()).unwrap_or_default();
        let actual_edges = ag.map(|g| g.edge_set()).unwrap_or_default();

        for n in &ig.nodes {
            match actual_weights.get(n.id.as_str()) {
                None => {
                    bs.missing_nodes
                        .insert(NodeRef::new(dim.clone(), n.id.clone()));
                }
                Some(&w) => {
                    let delta = n.weight - w;
                    if delta > 0.0 {
                        bs.delta_w
                            .insert(NodeRef::new(dim.clone(), n.id.clone()), delta);
                    }
                }
            }
        }
        for e in &ig.edges {
            if !actual_edges.contains(&(e.source.as_str(), e.target.as_str())) {
                bs.missing_edges.insert(EdgeRef::new(
                    dim.clone(),
                    e.source.clone(),
                    e.target.clone(),
                ));
            }
        }
    }
    bs
}

/// `Some((ideal_stage, actual_stage))` when the ontologies describe
/// different stages.
pub fn stage_mismatch(ideal: &Ontology, actual: &Ontology) -> Option<(u32, u32)> {
    (ideal.stage != actual.stage).then_some((ideal.stage, actual.stage))
}

/// Severity of `bs` against `ideal`, together with the severity of an
/// empty actual ontology as the upper bound.
pub fn severity(bs: &BlindSpot, ideal: &Ontology) -> Result<SeverityReport> {
    let mut node_absence_term = 0.0;
    for r in &bs.missing_nodes {
        let n = ideal
            .node(r)
            .ok_or_else(|| incomplete(r.to_string(), "node"))?;
        node_absence_term += n.importance();
    }

    let mut causal_absence_term = 0.0;
    for r in &bs.missing_edges {
        let e = ideal
            .edge(r)
            .ok_or_else(|| incomplete(r.to_string(), "edge"))?;
        let w = e
            .weight
            .ok_or_else(|| incomplete(r.to_string(), "weight"))?;
        let rho = e.rho.ok_or_else(|| incomplete(r.to_string(), "rho"))?;
        causal_absence_term += w * rho;
    }

    let mut weight_suppression_term = 0.0;
    for (r, &delta) in &bs.delta_w {
        let n = ideal
            .node(r)
            .ok_or_else(|| incomplete(r.to_string(), "node"))?;
        let phi = n.phi.ok_or_else(|| incomplete(r.to_string(), "phi"))?;
        weight_suppression_term += delta * phi;
    }

    let sigma_max = max_severity(ideal)?;
    Ok(SeverityReport {
        sigma: node_absence_term + causal_absence_term + weight_suppression_term,
        node_absence_term,
        causal_absence_term,
        weight_suppression_term,
        sigma_max,
    })
}

/// `Σ ω(v) + Σ ω(e)·ρ(e)` over the whole ideal ontology.
///
/// Terms are summed in key order, as `severity` does, so an empty actual
/// ontology reaches this bound exactly.
pub fn max_severity(ideal: &Ontology) -> Result<f64> {
    let nodes: BTreeMap<NodeRef, f64> = ideal
        .node_refs()
        .map(|(r, n)| (r, n.importance()))
        .collect();
    let mut edges = BTreeMap::new();
    for (r, e) in ideal.edge_refs() {
        let w = e
            .weight
            .ok_or_else(|| incomplete(r.to_string(), "weight"))?;
        let rho = e.rho.ok_or_else(|| incomplete(r.to_string(), "rho"))?;
        edges.insert(r, w * rho);
    }
    let mut node_sum = 0.0;
    for v in nodes.values() {
        node_sum += v;
    }
    let mut edge_sum = 0.0;
    for v in edges.values() {
        edge_sum += v;
    }
    let total = node_sum + edge_sum + 0.0;
    if total > 0.0 {
        Ok(total)
    } else {
        Err(Error::ZeroSeverityBound)
    }
}

fn incomplete(element: alloc::string::String, field: &'static str) -> Error {
    Error::IncompleteIdeal { element, field }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ontology::{CausalEdge, ConceptNode, DimensionGraph};
    use alloc::vec;

    fn ideal_ab() -> Ontology {
        Ontology::new("ideal", 0, "s").with_dimension(
            "prof",
            DimensionGraph::new(
                vec![
                    ConceptNode::new("a", 0.6).with_phi(1.0),
                    ConceptNode::new("b", 0.4),
                ],
                vec![CausalEdge::ideal("a", "b", 1.0, 0.9)],
            ),
        )
    }

    fn actual(nodes: &[(&str, f64)], edges: &[(&str, &str)]) -> Ontology {
        Ontology::new("i", 0, "s").with_dimension(
            "prof",
            DimensionGraph::new(
                nodes
                    .iter()
                    .map(|&(id, w)| ConceptNode::new(id, w))
                    .collect(),
                edges.iter().map(|&(s, t)| CausalEdge::new(s, t)).collect(),
            ),
        )
    }

    #[test]
    fn identity_is_empty() {
        let o = ideal_ab();
        assert!(diff(&o, &o).unwrap().is_empty());
    }

    #[test]
    fn missing_node_and_edge() {
        let bs = diff(&ideal_ab(), &actual(&[("a", 1.0)], &[])).unwrap();
        assert_eq!(bs.missing_nodes, [NodeRef::new("prof", "b")].into());
        assert_eq!(bs.missing_edges, [EdgeRef::new("prof", "a", "b")].into());
        assert!(bs.delta_w.is_empty());
    }

    #[test]
    fn weight_deviation_only() {
        let bs = diff(
            &ideal_ab(),
            &actual(&[("a", 0.2), ("b", 0.8)], &[("a", "b")]),
        )
        .unwrap();
        assert!(bs.missing_nodes.is_empty() && bs.missing_edges.is_empty());
        assert_eq!(bs.delta_w.len(), 1);
        let d = bs.delta_w[&NodeRef::new("prof", "a")];
        assert!((d - 0.4).abs() < 1e-15);
    }

    #[test]
    fn invalid_input_carries_report() {
        let err = diff(&ideal_ab(), &actual(&[("a", 0.5)], &[])).unwrap_err();
        match err {
            Error::Validation(r) => assert_eq!(r.violations.len(), 1),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn empty_blind_spot_has_zero_severity() {
        let s = severity(&BlindSpot::default(), &ideal_ab()).unwrap();
        assert_eq!(s.sigma, 0.0);
        assert_eq!(s.node_absence_term, 0.0);
        assert_eq!(s.causal_absence_term, 0.0);
        assert_eq!(s.weight_suppression_term, 0.0);
    }

    #[test]
    fn empty_actual_reaches_bound() {
        let ideal = ideal_ab();
        let empty = Ontology::new("i", 0, "s");
        let s = severity(&diff(&ideal, &empty).unwrap(), &ideal).unwrap();
        // (0.6 + 0.4) + 1.0 * 0.9
        assert!((s.sigma - 1.9).abs() < 1e-12);
        assert_eq!(s.sigma, s.sigma_max);
    }

    #[test]
    fn suppression_only_severity() {
        let ideal = ideal_ab();
        let bs = diff(&ideal, &actual(&[("a", 0.1), ("b", 0.9)], &[("a", "b")])).unwrap();
        let s = severity(&bs, &ideal).unwrap();
        assert!((s.sigma - 0.5).abs() < 1e-12);
        assert_eq!(s.node_absence_term, 0.0);
        assert_eq!(s.causal_absence_term, 0.0);
    }

    #[test]
    fn missing_phi_names_element() {
        let ideal = ideal_ab();
        let mut bs = BlindSpot::default();
        bs.delta_w.insert(NodeRef::new("prof", "b"), 0.1);
        assert_eq!(
            severity(&bs, &ideal),
            Err(Error::IncompleteIdeal {
                element: "prof:b".into(),
                field: "phi"
            })
        );
    }

    #[test]
    fn stage_mismatch_reported() {
        let mut a = ideal_ab();
        assert_eq!(stage_mismatch(&ideal_ab(), &a), None);
        a.stage = 3;
        assert_eq!(stage_mismatch(&ideal_ab(), &a), Some((0, 3)));
    }
}
