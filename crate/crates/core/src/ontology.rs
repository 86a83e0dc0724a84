//! Multidimensional ontology model.
//!
//! An [`Ontology`] is a stage-indexed, individual-tagged collection of
//! per-dimension weighted digraphs. Dimensions are disjoint: edges never
//! cross from one dimension graph into another, and nodes are identified by
//! `(dimension, id)`.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on per-dimension weight sums.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

/// Label of a life dimension. The four canonical labels have constructors,
/// but any string is accepted.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DimensionId(pub String);

impl DimensionId {
    pub fn new(label: impl Into<String>) -> Self {
        DimensionId(label.into())
    }
    pub fn prof() -> Self {
        Self::new("prof")
    }
    pub fn health() -> Self {
        Self::new("health")
    }
    pub fn family() -> Self {
        Self::new("family")
    }
    pub fn spirit() -> Self {
        Self::new("spirit")
    }
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for DimensionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for DimensionId {
    fn from(s: &str) -> Self {
        DimensionId::new(s)
    }
}

/// Dimension-qualified node identity.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeRef {
    pub dimension: DimensionId,
    pub id: String,
}

impl NodeRef {
    pub fn new(dimension: impl Into<DimensionId>, id: impl Into<String>) -> Self {
        NodeRef {
            dimension: dimension.into(),
            id: id.into(),
        }
    }
}

impl fmt::Display for NodeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.dimension, self.id)
    }
}

/// Dimension-qualified directed edge identity.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeRef {
    pub dimension: DimensionId,
    pub source: String,
    pub target: String,
}

impl EdgeRef {
    pub fn new(
        dimension: impl Into<DimensionId>,
        source: impl Into<String>,
        target: impl Into<String>,
    ) -> Self {
        EdgeRef {
            dimension: dimension.into(),
            source: source.into(),
            target: target.into(),
        }
    }

    pub fn source_ref(&self) -> NodeRef {
        NodeRef::new(self.dimension.clone(), self.source.clone())
    }

    pub fn target_ref(&self) -> NodeRef {
        NodeRef::new(self.dimension.clone(), self.target.clone())
    }
}

impl fmt::Display for EdgeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}->{}", self.dimension, self.source, self.target)
    }
}

/// A concept node. Ideal-side and actual-side nodes share this type; the
/// optional fields are populated according to the role the ontology plays.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConceptNode {
    pub id: String,
    pub weight: f64,
    /// Ideal importance. When present it must equal `weight`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    /// Activation sensitivity (ideal side).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_optimal: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_tau_max: Option<f64>,
    /// Base remediation cost.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c0: Option<f64>,
    /// Decay rate per year.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_acquire: Option<f64>,
    /// Share of this node's weight that survives a switch out of its
    /// dimension. Defaults to [`DEFAULT_TRANSFERABILITY`].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transferability: Option<f64>,
}

pub const DEFAULT_TRANSFERABILITY: f64 = 0.5;

impl ConceptNode {
    pub fn new(id: impl Into<String>, weight: f64) -> Self {
        ConceptNode {
            id: id.into(),
            weight,
            omega: None,
            phi: None,
            tau_optimal: None,
            delta_tau_max: None,
            c0: None,
            lambda: None,
            tau_acquire: None,
            transferability: None,
        }
    }

    pub fn with_phi(mut self, phi: f64) -> Self {
        self.phi = Some(phi);
        self
    }

    pub fn with_temporal(mut self, tau_optimal: f64, delta_tau_max: f64, tau_acquire: f64) -> Self {
        self.tau_optimal = Some(tau_optimal);
        self.delta_tau_max = Some(delta_tau_max);
        self.tau_acquire = Some(tau_acquire);
        self
    }

    pub fn with_cost(mut self, c0: f64, lambda: f64) -> Self {
        self.c0 = Some(c0);
        self.lambda = Some(lambda);
        self
    }

    /// Importance in the ideal role. This is the node weight.
    pub fn importance(&self) -> f64 {
        self.weight
    }

    pub fn transferability_or_default(&self) -> f64 {
        self.transferability.unwrap_or(DEFAULT_TRANSFERABILITY)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CausalEdge {
    pub source: String,
    pub target: String,
    /// Edge importance (ideal side).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<f64>,
    /// Causal criticality (ideal side).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
}

impl CausalEdge {
    pub fn new(source: impl Into<String>, target: impl Into<String>) -> Self {
        CausalEdge {
            source: source.into(),
            target: target.into(),
            weight: None,
            rho: None,
        }
    }

    pub fn ideal(
        source: impl Into<String>,
        target: impl Into<String>,
        weight: f64,
        rho: f64,
    ) -> Self {
        CausalEdge {
            source: source.into(),
            target: target.into(),
            weight: Some(weight),
            rho: Some(rho),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DimensionGraph {
    pub nodes: Vec<ConceptNode>,
    #[serde(default)]
    pub edges: Vec<CausalEdge>,
}

impl DimensionGraph {
    pub fn new(nodes: Vec<ConceptNode>, edges: Vec<CausalEdge>) -> Self {
        DimensionGraph { nodes, edges }
    }

    pub fn node(&self, id: &str) -> Option<&ConceptNode> {
        self.nodes.iter().find(|n| n.id == id)
    }

    pub fn edge(&self, source: &str, target: &str) -> Option<&CausalEdge> {
        self.edges
            .iter()
            .find(|e| e.source == source && e.target == target)
    }

    pub fn node_weight_sum(&self) -> f64 {
        self.nodes.iter().map(|n| n.weight).sum()
    }

    pub fn mean_weight(&self) -> Option<f64> {
        if self.nodes.is_empty() {
            None
        } else {
            Some(self.node_weight_sum() / self.nodes.len() as f64)
        }
    }

    /// Node weights keyed by id.
    pub fn weights(&self) -> BTreeMap<&str, f64> {
        self.nodes
            .iter()
            .map(|n| (n.id.as_str(), n.weight))
            .collect()
    }

    pub fn edge_set(&self) -> BTreeSet<(&str, &str)> {
        self.edges
            .iter()
            .map(|e| (e.source.as_str(), e.target.as_str()))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Ontology {
    pub individual: String,
    pub stage: u32,
    pub stage_label: String,
    #[serde(default)]
    pub background: BTreeMap<String, f64>,
    pub dimensions: BTreeMap<DimensionId, DimensionGraph>,
}

impl Ontology {
    pub fn new(individual: impl Into<String>, stage: u32, stage_label: impl Into<String>) -> Self {
        Ontology {
            individual: individual.into(),
            stage,
            stage_label: stage_label.into(),
            background: BTreeMap::new(),
            dimensions: BTreeMap::new(),
        }
    }

    pub fn with_dimension(
        mut self,
        dimension: impl Into<DimensionId>,
        graph: DimensionGraph,
    ) -> Self {
        self.dimensions.insert(dimension.into(), graph);
        self
    }

    pub fn dimension(&self, d: &DimensionId) -> Option<&DimensionGraph> {
        self.dimensions.get(d)
    }

    pub fn node(&self, r: &NodeRef) -> Option<&ConceptNode> {
        self.dimensions.get(&r.dimension)?.node(&r.id)
    }

    pub fn edge(&self, r: &EdgeRef) -> Option<&CausalEdge> {
        self.dimensions
            .get(&r.dimension)?
            .edge(&r.source, &r.target)
    }

    pub fn node_refs(&self) -> impl Iterator<Item = (NodeRef, &ConceptNode)> + '_ {
        self.dimensions.iter().flat_map(|(d, g)| {
            g.nodes
                .iter()
                .map(move |n| (NodeRef::new(d.clone(), n.id.clone()), n))
        })
    }

    pub fn edge_refs(&self) -> impl Iterator<Item = (EdgeRef, &CausalEdge)> + '_ {
        self.dimensions.iter().flat_map(|(d, g)| {
            g.edges.iter().map(move |e| {
                (
                    EdgeRef::new(d.clone(), e.source.clone(), e.target.clone()),
                    e,
                )
            })
        })
    }

    pub fn node_count(&self) -> usize {
        self.dimensions.values().map(|g| g.nodes.len()).sum()
    }

    /// Returns a copy with every non-empty dimension normalized.
    pub fn normalized(&self) -> Result<Ontology> {
        let mut out = self.clone();
        for g in out.dimensions.values_mut() {
            if !g.nodes.is_empty() {
                *g = normalize_weights(g)?;
            }
        }
        Ok(out)
    }
}

/// One invariant violation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Violation {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dimension: Option<DimensionId>,
    /// Node id or `source->target` edge label.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub element: Option<String>,
    pub kind: ViolationKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ViolationKind {
    NodeWeightSum { sum: f64 },
    EdgeWeightSum { sum: f64 },
    PartialEdgeWeights,
    DuplicateNode,
    DuplicateEdge,
    DanglingEdge { missing: String },
    OutOfUnitRange { field: String, value: f64 },
    NotPositive { field: String, value: f64 },
    Negative { field: String, value: f64 },
    NonFinite { field: String },
    OmegaMismatch { omega: f64, weight: f64 },
    MissingIdealField { field: String },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, dimension: &DimensionId, element: Option<String>, kind: ViolationKind) {
        self.violations.push(Violation {
            dimension: Some(dimension.clone()),
            element,
            kind,
        });
    }

    pub fn into_result(self) -> Result<()> {
        if self.is_valid() {
            Ok(())
        } else {
            Err(Error::Validation(self))
        }
    }
}

/// Checks every structural invariant of the ontology. Empty dimension
/// graphs are allowed; normalization applies to graphs with nodes.
pub fn validate(o: &Ontology) -> ValidationReport {
    let mut report = ValidationReport::default();
    for (dim, g) in &o.dimensions {
        validate_graph(dim, g, &mut report);
    }
    report
}

/// [`validate`] plus the fields an ontology needs to act as the ideal side:
/// `phi` on every node, `weight` and `rho` on every edge.
pub fn validate_ideal(o: &Ontology) -> ValidationReport {
    let mut report = validate(o);
    for (dim, g) in &o.dimensions {
        for n in &g.nodes {
            if n.phi.is_none() {
                report.push(dim, Some(n.id.clone()), missing("phi"));
            }
        }
        for e in &g.edges {
            let label = Some(edge_label(e));
            if e.weight.is_none() {
                report.push(dim, label.clone(), missing("weight"));
            }
            if e.rho.is_none() {
                report.push(dim, label, missing("rho"));
            }
        }
    }
    report
}

fn missing(field: &str) -> ViolationKind {
    ViolationKind::MissingIdealField {
        field: field.to_string(),
    }
}

fn edge_label(e: &CausalEdge) -> String {
    format!("{}->{}", e.source, e.target)
}

fn validate_graph(dim: &DimensionId, g: &DimensionGraph, report: &mut ValidationReport) {
    let mut seen = BTreeSet::new();
    for n in &g.nodes {
        let el = || Some(n.id.clone());
        if !seen.insert(n.id.as_str()) {
            report.push(dim, el(), ViolationKind::DuplicateNode);
        }
        check_unit(dim, el(), "weight", Some(n.weight), report);
        check_unit(dim, el(), "omega", n.omega, report);
        check_unit(dim, el(), "phi", n.phi, report);
        check_unit(dim, el(), "transferability", n.transferability, report);
        check_positive(dim, el(), "c0", n.c0, report);
        check_positive(dim, el(), "lambda", n.lambda, report);
        check_nonneg(dim, el(), "tau_optimal", n.tau_optimal, report);
        check_nonneg(dim, el(), "delta_tau_max", n.delta_tau_max, report);
        check_nonneg(dim, el(), "tau_acquire", n.tau_acquire, report);
        if let Some(omega) = n.omega {
            if omega.is_finite() && (omega - n.weight).abs() > NORMALIZATION_TOLERANCE {
                report.push(
                    dim,
                    el(),
                    ViolationKind::OmegaMismatch {
                        omega,
                        weight: n.weight,
                    },
                );
            }
        }
    }
    if !g.nodes.is_empty() {
        let sum = g.node_weight_sum();
        if !((sum - 1.0).abs() <= NORMALIZATION_TOLERANCE) {
            report.push(dim, None, ViolationKind::NodeWeightSum { sum });
        }
    }

    let mut seen_edges = BTreeSet::new();
    for e in &g.edges {
        let el = || Some(edge_label(e));
        if !seen_edges.insert((e.source.as_str(), e.target.as_str())) {
            report.push(dim, el(), ViolationKind::DuplicateEdge);
        }
        for endpoint in [&e.source, &e.target] {
            if !seen.contains(endpoint.as_str()) {
                report.push(
                    dim,
                    el(),
                    ViolationKind::DanglingEdge {
                        missing: endpoint.clone(),
                    },
                );
            }
        }
        check_unit(dim, el(), "weight", e.weight, report);
        check_unit(dim, el(), "rho", e.rho, report);
    }
    let weighted = g.edges.iter().filter(|e| e.weight.is_some()).count();
    if weighted > 0 {
        if weighted < g.edges.len() {
            report.push(dim, None, ViolationKind::PartialEdgeWeights);
        } else {
            let sum: f64 = g.edges.iter().filter_map(|e| e.weight).sum();
            if !((sum - 1.0).abs() <= NORMALIZATION_TOLERANCE) {
                report.push(dim, None, ViolationKind::EdgeWeightSum { sum });
            }
        }
    }
}

fn check_unit(
    dim: &DimensionId,
    el: Option<String>,
    field: &str,
    value: Option<f64>,
    report: &mut ValidationReport,
) {
    let Some(v) = value else { return };
    if !v.is_finite() {
        report.push(
            dim,
            el,
            ViolationKind::NonFinite {
                field: field.into(),
            },
        );
    } else if !(0.0..=1.0).contains(&v) {
        report.push(
            dim,
            el,
            ViolationKind::OutOfUnitRange {
                field: field.into(),
                value: v,
            },
        );
    }
}

fn check_positive(
    dim: &DimensionId,
    el: Option<String>,
    field: &str,
    value: Option<f64>,
    report: &mut ValidationReport,
) {
    let Some(v) = value else { return };
    if !v.is_finite() {
        report.push(
            dim,
            el,
            ViolationKind::NonFinite {
                field: field.into(),
            },
        );
    } else if v <= 0.0 {
        report.push(
            dim,
            el,
            ViolationKind::NotPositive {
                field: field.into(),
                value: v,
            },
        );
    }
}

fn check_nonneg(
    dim: &DimensionId,
    el: Option<String>,
    field: &str,
    value: Option<f64>,
    report: &mut ValidationReport,
) {
    let Some(v) = value else { return };
    if !v.is_finite() {
        report.push(
            dim,
            el,
            ViolationKind::NonFinite {
                field: field.into(),
            },
        );
    } else if v < 0.0 {
        report.push(
            dim,
            el,
            ViolationKind::Negative {
                field: field.into(),
                value: v,
            },
        );
    }
}

/// Rescales node weights to sum to one, and edge weights likewise when any
/// edge weight is positive. Proportions are preserved.
pub fn normalize_weights(g: &DimensionGraph) -> Result<DimensionGraph> {
    if g.nodes
        .iter()
        .any(|n| !n.weight.is_finite() || n.weight < 0.0)
    {
        return Err(Error::Domain(
            "node weights must be finite and nonnegative".into(),
        ));
    }
    let total = g.node_weight_sum();
    if !(total > 0.0) {
        return Err(Error::DegenerateGraph);
    }
    let mut out = g.clone();
    for n in &mut out.nodes {
        n.weight /= total;
        if n.omega.is_some() {
            n.omega = Some(n.weight);
        }
    }
    let edge_total: f64 = g.edges.iter().filter_map(|e| e.weight).sum();
    if edge_total > 0.0 {
        for e in &mut out.edges {
            if let Some(w) = e.weight.as_mut() {
                *w /= edge_total;
            }
        }
    }
    Ok(out)
}

/// Arithmetic mean of node weights in dimension `d`.
pub fn mean_dimension_weight(o: &Ontology, d: &DimensionId) -> Result<f64> {
    o.dimension(d)
        .and_then(DimensionGraph::mean_weight)
        .ok_or_else(|| Error::AbsentDimension(d.clone()))
}

/// Mean weight of every dimension; errors on the first empty one.
pub fn dimension_means(o: &Ontology) -> Result<BTreeMap<DimensionId, f64>> {
    o.dimensions
        .keys()
        .map(|d| mean_dimension_weight(o, d).map(|w| (d.clone(), w)))
        .collect()
}
