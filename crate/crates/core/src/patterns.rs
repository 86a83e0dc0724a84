//! Failure-pattern detectors, path criticality, the resonance destruction
//! index and switch costs.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::diff::BlindSpot;
use crate::error::{Error, Result};
use crate::ontology::{dimension_means, DimensionGraph, DimensionId, EdgeRef, NodeRef, Ontology};
use crate::taxonomy::{classify_temporal_blindness, remediation_cost, TaxonomyThresholds};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PatternConfig {
    pub theta_mono: f64,
    pub eps_mono: f64,
    pub eps_chain: f64,
    pub theta_res: f64,
    /// Remediation resource budget Ω.
    pub omega_budget: f64,
    pub alpha: f64,
    pub beta: f64,
    /// Investment depreciation per stage.
    pub gamma: f64,
    pub max_path_len: usize,
}

impl Default for PatternConfig {
    fn default() -> Self {
        PatternConfig {
            theta_mono: 0.85,
            eps_mono: 0.15,
            eps_chain: 0.5,
            theta_res: 0.5,
            omega_budget: 10.0,
            alpha: 1.0,
            beta: 1.0,
            gamma: 0.9,
            max_path_len: 6,
        }
    }
}

impl PatternConfig {
    pub fn check(&self) -> Result<()> {
        let open_unit = [
            ("theta_mono", self.theta_mono),
            ("eps_mono", self.eps_mono),
            ("eps_chain", self.eps_chain),
            ("theta_res", self.theta_res),
            ("gamma", self.gamma),
        ];
        for (name, v) in open_unit {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::Config(format!("{name} must lie in (0,1), got {v}")));
            }
        }
        if !(self.theta_mono > self.eps_mono) {
            return Err(Error::Config("theta_mono must exceed eps_mono".into()));
        }
        if !(self.omega_budget > 0.0 && self.omega_budget.is_finite()) {
            return Err(Error::Config("omega_budget must be positive".into()));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::Config("alpha must be positive".into()));
        }
        if !(self.beta >= 0.0 && self.beta.is_finite()) {
            return Err(Error::Config("beta must be nonnegative".into()));
        }
        if self.max_path_len == 0 {
            return Err(Error::Config("max_path_len must be at least 1".into()));
        }
        Ok(())
    }
}

/// An external disruption.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Shock {
    pub magnitude: f64,
    pub domain_nodes: BTreeSet<NodeRef>,
    #[serde(default)]
    pub stage: u32,
}

/// Per-stage, per-dimension investment amounts.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "InvestmentRepr", into = "InvestmentRepr")]
pub struct InvestmentHistory {
    pub entries: BTreeMap<(u32, DimensionId), f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InvestmentRepr {
    entries: Vec<InvestmentEntry>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InvestmentEntry {
    stage: u32,
    dimension: DimensionId,
    amount: f64,
}

impl TryFrom<InvestmentRepr> for InvestmentHistory {
    type Error = String;

    fn try_from(r: InvestmentRepr) -> core::result::Result<Self, String> {
        let mut entries = BTreeMap::new();
        for e in r.entries {
            if !(e.amount >= 0.0 && e.amount.is_finite()) {
                return Err(format!(
                    "investment at stage {} in `{}` must be nonnegative",
                    e.stage, e.dimension
                ));
            }
            if entries
                .insert((e.stage, e.dimension.clone()), e.amount)
                .is_some()
            {
                return Err(format!(
                    "duplicate investment entry for stage {} in `{}`",
                    e.stage, e.dimension
                ));
            }
        }
        Ok(InvestmentHistory { entries })
    }
}

impl From<InvestmentHistory> for InvestmentRepr {
    fn from(h: InvestmentHistory) -> Self {
        InvestmentRepr {
            entries: h
                .entries
                .into_iter()
                .map(|((stage, dimension), amount)| InvestmentEntry {
                    stage,
                    dimension,
                    amount,
                })
                .collect(),
        }
    }
}

impl InvestmentHistory {
    pub fn insert(&mut self, stage: u32, dimension: impl Into<DimensionId>, amount: f64) {
        self.entries.insert((stage, dimension.into()), amount);
    }

    pub fn last_stage(&self) -> Option<u32> {
        self.entries.keys().map(|(s, _)| *s).max()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PatternKind {
    Mono,
    WindowClosure,
    ChainBreak,
    Resonance,
    LockIn,
}

/// A simple directed path inside one dimension graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CriticalPath {
    pub dimension: DimensionId,
    pub nodes: Vec<String>,
    pub criticality: f64,
}

impl CriticalPath {
    pub fn edges(&self) -> impl Iterator<Item = EdgeRef> + '_ {
        self.nodes
            .windows(2)
            .map(|w| EdgeRef::new(self.dimension.clone(), w[0].clone(), w[1].clone()))
    }

    pub fn len(&self) -> usize {
        self.nodes.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum PathElement {
    Node { id: String },
    Edge { source: String, target: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BrokenPath {
    pub path: CriticalPath,
    pub first_missing: PathElement,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostViolation {
    pub node: NodeRef,
    pub cost: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Evidence {
    Mono {
        dominant: Option<DimensionId>,
        mean_weights: BTreeMap<DimensionId, f64>,
    },
    WindowClosure {
        tau_now: f64,
        violations: Vec<CostViolation>,
    },
    ChainBreak {
        broken: Vec<BrokenPath>,
    },
    Resonance {
        gamma: f64,
        overlap_fraction: f64,
        overlapping: BTreeSet<NodeRef>,
    },
    LockIn {
        switch_cost: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatternFinding {
    pub pattern: PatternKind,
    pub fired: bool,
    pub evidence: Evidence,
}

/// Pattern I: one dimension's mean weight exceeds `theta_mono` while every
/// other dimension is below `eps_mono`.
pub fn detect_mono(actual: &Ontology, cfg: &PatternConfig) -> Result<PatternFinding> {
    let means = dimension_means(actual)?;
    let dominant = means.iter().find_map(|(d, &w)| {
        let others_neglected = means
            .iter()
            .filter(|(o, _)| *o != d)
            .all(|(_, &w2)| w2 < cfg.eps_mono);
        (w > cfg.theta_mono && others_neglected).then(|| d.clone())
    });
    Ok(PatternFinding {
        pattern: PatternKind::Mono,
        fired: dominant.is_some(),
        evidence: Evidence::Mono {
            dominant,
            mean_weights: means,
        },
    })
}

/// Pattern II: some temporally blind node costs more than the budget to
/// remediate at `tau_now`. Nodes without cost metadata are skipped.
pub fn detect_window_closure(
    actual: &Ontology,
    tau_now: f64,
    cfg: &PatternConfig,
) -> Result<PatternFinding> {
    if !(tau_now >= 0.0 && tau_now.is_finite()) {
        return Err(Error::Domain(format!(
            "tau_now must be finite and >= 0, got {tau_now}"
        )));
    }
    let temporal = classify_temporal_blindness(actual);
    let mut violations = Vec::new();
    for r in &temporal.flagged {
        let Some(node) = actual.node(r) else { continue };
        let Ok(cost) = remediation_cost(node, tau_now) else {
            continue;
        };
        if cost > cfg.omega_budget {
            violations.push(CostViolation {
                node: r.clone(),
                cost,
            });
        }
    }
    Ok(PatternFinding {
        pattern: PatternKind::WindowClosure,
        fired: !violations.is_empty(),
        evidence: Evidence::WindowClosure {
            tau_now,
            violations,
        },
    })
}

/// Product of edge criticalities along a connected walk in `ideal`.
pub fn path_criticality(path: &[EdgeRef], ideal: &Ontology) -> Result<f64> {
    if path.is_empty() {
        return Err(Error::MalformedPath("path has no edges".into()));
    }
    let mut product = 1.0;
    for (i, e) in path.iter().enumerate() {
        if i > 0 {
            let prev = &path[i - 1];
            if prev.dimension != e.dimension || prev.target != e.source {
                return Err(Error::MalformedPath(format!(
                    "{prev} does not connect to {e}"
                )));
            }
        }
        let edge = ideal
            .edge(e)
            .ok_or_else(|| Error::MalformedPath(format!("{e} is not an ideal edge")))?;
        let rho = edge
            .rho
            .ok_or_else(|| Error::MalformedPath(format!("{e} has no criticality")))?;
        product *= rho;
    }
    Ok(product)
}

/// Descending criticality, then dimension and node sequence.
pub fn path_order(a: &CriticalPath, b: &CriticalPath) -> Ordering {
    b.criticality
        .total_cmp(&a.criticality)
        .then_with(|| a.dimension.cmp(&b.dimension))
        .then_with(|| a.nodes.cmp(&b.nodes))
}

/// Every simple path of 1..=`max_path_len` edges whose criticality exceeds
/// `eps_chain`. Edges without `rho` count as zero criticality; self-loops
/// are never part of a simple path.
///
/// Criticalities lie in `[0, 1]`, so extending a path never raises its
/// product; a prefix at or below the threshold is abandoned together with
/// all of its extensions.
pub fn enumerate_critical_paths(
    ideal: &Ontology,
    eps_chain: f64,
    max_path_len: usize,
) -> Vec<CriticalPath> {
    let mut out = Vec::new();
    for (dim, g) in &ideal.dimensions {
        let adj = Adjacency::new(g);
        let mut search = PathSearch {
            adj: &adj,
            eps_chain,
            max_path_len,
            on_path: alloc::vec![false; adj.ids.len()],
            stack: Vec::new(),
            dimension: dim,
            out: &mut out,
        };
        for root in 0..adj.ids.len() {
            search.run(root);
        }
    }
    out.sort_by(path_order);
    out
}

struct Adjacency<'a> {
    ids: Vec<&'a str>,
    next: Vec<Vec<(usize, f64)>>,
}

impl<'a> Adjacency<'a> {
    fn new(g: &'a DimensionGraph) -> Self {
        let index: BTreeMap<&str, usize> = g
            .nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (n.id.as_str(), i))
            .collect();
        let mut next = alloc::vec![Vec::new(); g.nodes.len()];
        for e in &g.edges {
            if let (Some(&s), Some(&t)) =
                (index.get(e.source.as_str()), index.get(e.target.as_str()))
            {
                if s != t {
                    next[s].push((t, e.rho.unwrap_or(0.0)));
                }
            }
        }
        Adjacency {
            ids: g.nodes.iter().map(|n| n.id.as_str()).collect(),
            next,
        }
    }
}

struct PathSearch<'s, 'a> {
    adj: &'s Adjacency<'a>,
    eps_chain: f64,
    max_path_len: usize,
    on_path: Vec<bool>,
    stack: Vec<usize>,
    dimension: &'s DimensionId,
    out: &'s mut Vec<CriticalPath>,
}

impl PathSearch<'_, '_> {
    fn run(&mut self, root: usize) {
        self.stack.push(root);
        self.on_path[root] = true;
        self.extend(root, 1.0);
        self.on_path[root] = false;
        self.stack.pop();
    }

    fn extend(&mut self, tip: usize, product: f64) {
        let edges = self.stack.len() - 1;
        if edges == self.max_path_len {
            return;
        }
        for &(next, rho) in &self.adj.next[tip] {
            if self.on_path[next] {
                continue;
            }
            let p = product * rho;
            if !(p > self.eps_chain) {
                continue;
            }
            self.stack.push(next);
            self.on_path[next] = true;
            self.out.push(CriticalPath {
                dimension: self.dimension.clone(),
                nodes: self
                    .stack
                    .iter()
                    .map(|&i| self.adj.ids[i].to_string())
                    .collect(),
                criticality: p,
            });
            self.extend(next, p);
            self.on_path[next] = false;
            self.stack.pop();
        }
    }
}

/// First node or edge of `path` absent from `actual`, walking from the root.
pub fn first_missing_element(path: &CriticalPath, actual: &Ontology) -> Option<PathElement> {
    let g = actual.dimension(&path.dimension);
    let has_node = |id: &str| g.is_some_and(|g| g.node(id).is_some());
    let has_edge = |s: &str, t: &str| g.is_some_and(|g| g.edge(s, t).is_some());
    for (i, id) in path.nodes.iter().enumerate() {
        if i > 0 {
            let prev = &path.nodes[i - 1];
            if !has_edge(prev, id) {
                // an edge with a missing endpoint is reported as the node
                if !has_node(prev) {
                    return Some(PathElement::Node { id: prev.clone() });
                }
                return Some(PathElement::Edge {
                    source: prev.clone(),
                    target: id.clone(),
                });
            }
        }
        if !has_node(id) {
            return Some(PathElement::Node { id: id.clone() });
        }
    }
    None
}

/// Pattern III: some critical ideal path is not fully present in `actual`.
pub fn detect_chain_break(
    ideal: &Ontology,
    actual: &Ontology,
    cfg: &PatternConfig,
) -> PatternFinding {
    let broken: Vec<BrokenPath> = enumerate_critical_paths(ideal, cfg.eps_chain, cfg.max_path_len)
        .into_iter()
        .filter_map(|path| {
            first_missing_element(&path, actual).map(|first_missing| BrokenPath {
                path,
                first_missing,
            })
        })
        .collect();
    PatternFinding {
        pattern: PatternKind::ChainBreak,
        fired: !broken.is_empty(),
        evidence: Evidence::ChainBreak { broken },
    }
}

/// Node-level membership in a blind spot: a node belongs when it is
/// missing, weight-blind, or an endpoint of a missing edge whose
/// criticality exceeds `eps_str`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlindSpotMembership {
    nodes: BTreeSet<NodeRef>,
}

impl BlindSpotMembership {
    pub fn new(bs: &BlindSpot, ideal: &Ontology, t: &TaxonomyThresholds) -> Self {
        let mut nodes = bs.missing_nodes.clone();
        for (r, &delta) in &bs.delta_w {
            let Some(n) = ideal.node(r) else { continue };
            let actual_weight = n.weight - delta;
            if delta > t.eps_wt && actual_weight < t.eps_act {
                nodes.insert(r.clone());
            }
        }
        for e in &bs.missing_edges {
            let rho = ideal.edge(e).and_then(|e| e.rho).unwrap_or(0.0);
            if rho > t.eps_str {
                nodes.insert(e.source_ref());
                nodes.insert(e.target_ref());
            }
        }
        BlindSpotMembership { nodes }
    }

    pub fn contains(&self, r: &NodeRef) -> bool {
        self.nodes.contains(r)
    }

    pub fn nodes(&self) -> &BTreeSet<NodeRef> {
        &self.nodes
    }
}

/// Shock nodes inside the blind spot and their share of the shock domain.
pub fn shock_overlap(
    shock: &Shock,
    membership: &BlindSpotMembership,
) -> Result<(BTreeSet<NodeRef>, f64)> {
    if shock.domain_nodes.is_empty() {
        return Err(Error::DegenerateShock);
    }
    let overlapping: BTreeSet<NodeRef> = shock
        .domain_nodes
        .iter()
        .filter(|r| membership.contains(r))
        .cloned()
        .collect();
    let fraction = overlapping.len() as f64 / shock.domain_nodes.len() as f64;
    Ok((overlapping, fraction))
}

fn check_resonance_inputs(sigma: f64, shock: &Shock) -> Result<()> {
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::Domain(format!(
            "sigma must be finite and >= 0, got {sigma}"
        )));
    }
    if !(shock.magnitude >= 0.0 && shock.magnitude.is_finite()) {
        return Err(Error::Domain(format!(
            "shock magnitude must be finite and >= 0, got {}",
            shock.magnitude
        )));
    }
    Ok(())
}

/// Resonance destruction index `σ · |E| · overlap fraction`.
pub fn resonance_index(
    sigma: f64,
    shock: &Shock,
    bs: &BlindSpot,
    ideal: &Ontology,
    t: &TaxonomyThresholds,
) -> Result<f64> {
    check_resonance_inputs(sigma, shock)?;
    let membership = BlindSpotMembership::new(bs, ideal, t);
    let (_, fraction) = shock_overlap(shock, &membership)?;
    Ok(sigma * shock.magnitude * fraction)
}

/// Pattern IV: the shock-domain overlap fraction exceeds `theta_res`.
pub fn detect_resonance(
    shock: &Shock,
    bs: &BlindSpot,
    ideal: &Ontology,
    sigma: f64,
    t: &TaxonomyThresholds,
    cfg: &PatternConfig,
) -> Result<PatternFinding> {
    check_resonance_inputs(sigma, shock)?;
    let membership = BlindSpotMembership::new(bs, ideal, t);
    let (overlapping, overlap_fraction) = shock_overlap(shock, &membership)?;
    let fired = overlap_fraction > cfg.theta_res;
    Ok(PatternFinding {
        pattern: PatternKind::Resonance,
        fired,
        evidence: Evidence::Resonance {
            gamma: sigma * shock.magnitude * overlap_fraction,
            overlap_fraction,
            overlapping: if fired { overlapping } else { BTreeSet::new() },
        },
    })
}

/// `Σ_{j<=k} γ^{k−j} · Inv_j^d`.
pub fn depreciated_investment(
    hist: &InvestmentHistory,
    dim: &DimensionId,
    k: u32,
    gamma: f64,
) -> Result<f64> {
    if let Some(last) = hist.last_stage() {
        if last > k {
            return Err(Error::Domain(format!(
                "investment recorded at stage {last} is after current stage {k}"
            )));
        }
    }
    Ok(hist
        .entries
        .iter()
        .filter(|((_, d), _)| d == dim)
        .map(|((j, _), &inv)| libm::pow(gamma, f64::from(k - j)) * inv)
        .sum())
}

/// Residual transferable value: `Σ transferability(v) · W(v)`.
pub fn residual_value(g: Option<&DimensionGraph>) -> f64 {
    g.map_or(0.0, |g| {
        g.nodes
            .iter()
            .map(|n| n.transferability_or_default() * n.weight)
            .sum()
    })
}

pub fn combine_switch_cost(depreciated: f64, res_val: f64, cfg: &PatternConfig) -> f64 {
    cfg.alpha * depreciated - cfg.beta * res_val
}

/// Cost of leaving `from_dim` at stage `k`. May be negative.
pub fn switch_cost(
    hist: &InvestmentHistory,
    actual: &Ontology,
    from_dim: &DimensionId,
    k: u32,
    cfg: &PatternConfig,
) -> Result<f64> {
    let dep = depreciated_investment(hist, from_dim, k, cfg.gamma)?;
    Ok(combine_switch_cost(
        dep,
        residual_value(actual.dimension(from_dim)),
        cfg,
    ))
}

/// Dimension with the largest mean weight; ties go to the smallest label.
pub fn dominant_dimension(actual: &Ontology) -> Result<Option<DimensionId>> {
    let means = dimension_means(actual)?;
    let mut best: Option<(&DimensionId, f64)> = None;
    for (d, &w) in &means {
        if best.is_none_or(|(_, bw)| w > bw) {
            best = Some((d, w));
        }
    }
    Ok(best.map(|(d, _)| d.clone()))
}

/// Pattern V.
pub fn detect_lockin(cost: f64, cfg: &PatternConfig) -> PatternFinding {
    PatternFinding {
        pattern: PatternKind::LockIn,
        fired: cost > cfg.omega_budget,
        evidence: Evidence::LockIn { switch_cost: cost },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diff::diff;
    use crate::ontology::{CausalEdge, ConceptNode};
    use alloc::vec;

    fn dims_with_means(means: &[(&str, usize)]) -> Ontology {
        // n uniform nodes give a mean of 1/n
        let mut o = Ontology::new("x", 0, "s");
        for &(d, n) in means {
            let nodes = (0..n)
                .map(|i| ConceptNode::new(format!("{d}{i}"), 1.0 / n as f64))
                .collect();
            o.dimensions
                .insert(d.into(), DimensionGraph::new(nodes, vec![]));
        }
        o
    }

    /// An ontology whose mean weights are set directly; not normalized.
    fn raw_means(means: &[(&str, f64)]) -> Ontology {
        let mut o = Ontology::new("x", 0, "s");
        for &(d, w) in means {
            o.dimensions.insert(
                d.into(),
                DimensionGraph::new(vec![ConceptNode::new("n", w)], vec![]),
            );
        }
        o
    }

    #[test]
    fn mono_examples() {
        let cfg = PatternConfig::default();
        let f = detect_mono(
            &raw_means(&[
                ("prof", 0.9),
                ("health", 0.1),
                ("family", 0.05),
                ("spirit", 0.02),
            ]),
            &cfg,
        )
        .unwrap();
        assert!(f.fired);
        assert!(
            matches!(f.evidence, Evidence::Mono { dominant: Some(ref d), .. } if *d == DimensionId::prof())
        );

        let f = detect_mono(
            &dims_with_means(&[("prof", 4), ("health", 4), ("family", 4), ("spirit", 4)]),
            &cfg,
        )
        .unwrap();
        assert!(!f.fired);

        let f = detect_mono(
            &raw_means(&[
                ("prof", 0.9),
                ("health", 0.2),
                ("family", 0.05),
                ("spirit", 0.02),
            ]),
            &cfg,
        )
        .unwrap();
        assert!(!f.fired);
        assert!(matches!(f.evidence, Evidence::Mono { dominant: None, .. }));
    }

    #[test]
    fn mono_rejects_empty_dimension() {
        let o = Ontology::new("x", 0, "s").with_dimension("prof", DimensionGraph::default());
        assert_eq!(
            detect_mono(&o, &PatternConfig::default()),
            Err(Error::AbsentDimension(DimensionId::prof()))
        );
    }

    fn late_node(lambda: f64, omega_budget: f64) -> (Ontology, PatternConfig) {
        let node = ConceptNode::new("cardio", 1.0)
            .with_temporal(25.0, 5.0, 45.0)
            .with_cost(1.0, lambda);
        let o = Ontology::new("x", 0, "s")
            .with_dimension("health", DimensionGraph::new(vec![node], vec![]));
        (
            o,
            PatternConfig {
                omega_budget,
                ..Default::default()
            },
        )
    }

    #[test]
    fn window_closure_examples() {
        let (o, cfg) = late_node(0.2, 10.0);
        let f = detect_window_closure(&o, 45.0, &cfg).unwrap();
        assert!(f.fired);
        let Evidence::WindowClosure { violations, .. } = &f.evidence else {
            panic!()
        };
        assert!((violations[0].cost - libm::exp(4.0)).abs() < 1e-12);

        let flat = dims_with_means(&[("prof", 2)]);
        assert!(!detect_window_closure(&flat, 45.0, &cfg).unwrap().fired);

        // exp(0.1 * 20) = 7.389 < 7.39
        let (o, cfg) = late_node(0.1, 7.39);
        assert!(!detect_window_closure(&o, 45.0, &cfg).unwrap().fired);
        assert!(detect_window_closure(&o, -1.0, &cfg).is_err());
    }

    fn chain(rhos: &[f64]) -> Ontology {
        let n = rhos.len() + 1;
        let nodes = (0..n)
            .map(|i| ConceptNode::new(((b'a' + i as u8) as char).to_string(), 1.0 / n as f64))
            .collect();
        let edges = rhos
            .iter()
            .enumerate()
            .map(|(i, &r)| {
                CausalEdge::ideal(
                    ((b'a' + i as u8) as char).to_string(),
                    ((b'a' + i as u8 + 1) as char).to_string(),
                    1.0 / rhos.len() as f64,
                    r,
                )
            })
            .collect();
        Ontology::new("ideal", 0, "s").with_dimension("prof", DimensionGraph::new(nodes, edges))
    }

    #[test]
    fn path_criticality_examples() {
        let o = chain(&[0.7]);
        assert_eq!(
            path_criticality(&[EdgeRef::new("prof", "a", "b")], &o).unwrap(),
            0.7
        );
        let o = chain(&[0.9, 0.8]);
        let p = [
            EdgeRef::new("prof", "a", "b"),
            EdgeRef::new("prof", "b", "c"),
        ];
        assert!((path_criticality(&p, &o).unwrap() - 0.72).abs() < 1e-15);
        let o = chain(&[0.9, 0.0]);
        assert_eq!(path_criticality(&p, &o).unwrap(), 0.0);
        let gap = [
            EdgeRef::new("prof", "a", "b"),
            EdgeRef::new("prof", "a", "b"),
        ];
        assert!(matches!(
            path_criticality(&gap, &o),
            Err(Error::MalformedPath(_))
        ));
        assert!(matches!(
            path_criticality(&[], &o),
            Err(Error::MalformedPath(_))
        ));
    }

    #[test]
    fn enumerate_examples() {
        let o = chain(&[0.9, 0.9]);
        let paths = enumerate_critical_paths(&o, 0.5, 6);
        let got: Vec<(Vec<&str>, f64)> = paths
            .iter()
            .map(|p| (p.nodes.iter().map(String::as_str).collect(), p.criticality))
            .collect();
        assert_eq!(
            got,
            vec![
                (vec!["a", "b"], 0.9),
                (vec!["b", "c"], 0.9),
                (vec!["a", "b", "c"], 0.9 * 0.9),
            ]
        );
        let paths = enumerate_critical_paths(&o, 0.85, 6);
        assert_eq!(paths.len(), 2);
        assert!(enumerate_critical_paths(&dims_with_means(&[("prof", 3)]), 0.1, 6).is_empty());
        // length cap
        assert_eq!(enumerate_critical_paths(&o, 0.5, 1).len(), 2);
    }

    #[test]
    fn chain_break_below_threshold_is_silent() {
        let ideal = chain(&[0.4]);
        let actual = dims_with_means(&[("prof", 1)]);
        assert!(!detect_chain_break(&ideal, &actual, &PatternConfig::default()).fired);
        assert!(!detect_chain_break(&ideal, &ideal, &PatternConfig::default()).fired);
    }

    #[test]
    fn first_missing_walks_from_root() {
        let ideal = chain(&[0.9, 0.9]);
        let path = &enumerate_critical_paths(&ideal, 0.5, 6)[2];
        let mut actual = ideal.clone();
        let g = actual.dimensions.get_mut(&DimensionId::prof()).unwrap();
        g.edges.remove(1);
        assert_eq!(
            first_missing_element(path, &actual),
            Some(PathElement::Edge {
                source: "b".into(),
                target: "c".into()
            })
        );
        assert_eq!(first_missing_element(path, &ideal), None);
        let only_c = Ontology::new("x", 0, "s").with_dimension(
            "prof",
            DimensionGraph::new(vec![ConceptNode::new("c", 1.0)], vec![]),
        );
        assert_eq!(
            first_missing_element(path, &only_c),
            Some(PathElement::Node { id: "a".into() })
        );
    }

    fn shock(mag: f64, ids: &[&str]) -> Shock {
        Shock {
            magnitude: mag,
            domain_nodes: ids.iter().map(|i| NodeRef::new("prof", *i)).collect(),
            stage: 0,
        }
    }

    fn blind(ids: &[&str]) -> BlindSpot {
        BlindSpot {
            missing_nodes: ids.iter().map(|i| NodeRef::new("prof", *i)).collect(),
            ..Default::default()
        }
    }

    #[test]
    fn resonance_examples() {
        let ideal = chain(&[0.9, 0.9, 0.9]);
        let t = TaxonomyThresholds::default();
        let g = resonance_index(
            1.9,
            &shock(2.0, &["x", "y"]),
            &blind(&["a", "b"]),
            &ideal,
            &t,
        )
        .unwrap();
        assert_eq!(g, 0.0);
        let g = resonance_index(
            1.9,
            &shock(2.0, &["a", "b", "c", "z"]),
            &blind(&["a", "b", "c"]),
            &ideal,
            &t,
        )
        .unwrap();
        assert!((g - 2.85).abs() < 1e-12);
        let g =
            resonance_index(0.0, &shock(5.0, &["a"]), &BlindSpot::default(), &ideal, &t).unwrap();
        assert_eq!(g, 0.0);
        assert_eq!(
            resonance_index(1.0, &shock(1.0, &[]), &blind(&["a"]), &ideal, &t),
            Err(Error::DegenerateShock)
        );
    }

    #[test]
    fn resonance_detection_examples() {
        let ideal = chain(&[0.9, 0.9, 0.9]);
        let t = TaxonomyThresholds::default();
        let cfg = PatternConfig {
            theta_res: 0.5,
            ..Default::default()
        };
        let bs = blind(&["a", "b", "c"]);
        assert!(
            detect_resonance(
                &shock(1.0, &["a", "b", "c", "z"]),
                &bs,
                &ideal,
                1.0,
                &t,
                &cfg
            )
            .unwrap()
            .fired
        );
        assert!(
            !detect_resonance(&shock(1.0, &["z"]), &bs, &ideal, 1.0, &t, &cfg)
                .unwrap()
                .fired
        );
        assert!(
            !detect_resonance(&shock(1.0, &["a", "z"]), &bs, &ideal, 1.0, &t, &cfg)
                .unwrap()
                .fired
        );
    }

    #[test]
    fn membership_rule() {
        let ideal = chain(&[0.9, 0.2]);
        let actual = Ontology::new("x", 0, "s").with_dimension(
            "prof",
            DimensionGraph::new(
                vec![
                    ConceptNode::new("a", 0.3),
                    ConceptNode::new("b", 0.68),
                    ConceptNode::new("c", 0.02),
                ],
                vec![],
            ),
        );
        let bs = diff(&ideal, &actual).unwrap();
        let m = BlindSpotMembership::new(&bs, &ideal, &TaxonomyThresholds::default());
        // a, b via the critical missing edge a->b; b->c has rho 0.2; c has deficit 0.313 and weight 0.02
        assert_eq!(
            m.nodes(),
            &[
                NodeRef::new("prof", "a"),
                NodeRef::new("prof", "b"),
                NodeRef::new("prof", "c")
            ]
            .into()
        );
        let m = BlindSpotMembership::new(
            &bs,
            &ideal,
            &TaxonomyThresholds {
                eps_str: 0.95,
                eps_wt: 0.5,
                ..Default::default()
            },
        );
        assert!(m.nodes().is_empty());
    }

    #[test]
    fn switch_cost_examples() {
        let cfg = PatternConfig {
            alpha: 1.0,
            gamma: 0.9,
            beta: 0.0,
            ..Default::default()
        };
        let empty = Ontology::new("x", 0, "s");
        assert_eq!(
            switch_cost(
                &InvestmentHistory::default(),
                &empty,
                &"prof".into(),
                2,
                &cfg
            )
            .unwrap(),
            0.0
        );

        let mut h = InvestmentHistory::default();
        for j in 0..3 {
            h.insert(j, "prof", 10.0);
        }
        h.insert(1, "health", 99.0);
        let c = switch_cost(&h, &empty, &"prof".into(), 2, &cfg).unwrap();
        assert!((c - 27.1).abs() < 1e-12);

        let cfg = PatternConfig { beta: 1.0, ..cfg };
        let dep = depreciated_investment(&h, &"prof".into(), 2, cfg.gamma).unwrap();
        assert!((combine_switch_cost(dep, 5.0, &cfg) - 22.1).abs() < 1e-12);
        assert!(switch_cost(&h, &empty, &"prof".into(), 1, &cfg).is_err());
    }

    #[test]
    fn residual_value_defaults_transferability() {
        let mut g = DimensionGraph::new(
            vec![ConceptNode::new("a", 0.5), ConceptNode::new("b", 0.5)],
            vec![],
        );
        assert_eq!(residual_value(Some(&g)), 0.5);
        g.nodes[0].transferability = Some(1.0);
        assert_eq!(residual_value(Some(&g)), 0.75);
        assert_eq!(residual_value(None), 0.0);
    }

    #[test]
    fn lockin_examples() {
        let cfg = PatternConfig {
            omega_budget: 10.0,
            ..Default::default()
        };
        assert!(detect_lockin(27.1, &cfg).fired);
        assert!(!detect_lockin(0.0, &cfg).fired);
        assert!(!detect_lockin(10.0, &cfg).fired);
    }

    #[test]
    fn dominant_tiebreak_is_lexicographic() {
        let o = dims_with_means(&[("prof", 2), ("health", 2), ("family", 3)]);
        assert_eq!(dominant_dimension(&o).unwrap(), Some(DimensionId::health()));
        assert_eq!(
            dominant_dimension(&Ontology::new("x", 0, "s")).unwrap(),
            None
        );
    }

    #[test]
    fn config_checks() {
        assert!(PatternConfig::default().check().is_ok());
        assert!(PatternConfig {
            gamma: 1.0,
            ..Default::default()
        }
        .check()
        .is_err());
        assert!(PatternConfig {
            theta_mono: 0.1,
            eps_mono: 0.2,
            ..Default::default()
        }
        .check()
        .is_err());
        assert!(PatternConfig {
            max_path_len: 0,
            ..Default::default()
        }
        .check()
        .is_err());
    }
}
