//! Historical failure-case database: edge criticality estimation and
//! background-conditioned ideal ontologies.
//!
//! The ideal ontology for a background is estimated by frequency
//! aggregation over failure cases at the same stage label whose background
//! is similar enough to the query. Cases are kept sorted by id, so the
//! result does not depend on insertion order.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ontology::{
    CausalEdge, ConceptNode, DimensionGraph, DimensionId, EdgeRef, NodeRef, Ontology,
};
use crate::patterns::{PatternKind, Shock};

pub type Background = BTreeMap<String, f64>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseRecord {
    pub id: String,
    #[serde(default)]
    pub background: Background,
    pub stage_label: String,
    pub trajectory: Vec<EdgeRef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shock: Option<Shock>,
    pub outcome_severity: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pattern_label: Option<PatternKind>,
}

impl CaseRecord {
    /// Trajectory must be nonempty, and consecutive edges within the same
    /// dimension must chain head to tail.
    pub fn check(&self) -> Result<()> {
        let fail = |reason: String| Error::InvalidCase {
            id: self.id.clone(),
            reason,
        };
        if self.trajectory.is_empty() {
            return Err(fail("trajectory is empty".into()));
        }
        for w in self.trajectory.windows(2) {
            if w[0].dimension == w[1].dimension && w[0].target != w[1].source {
                return Err(fail(format!("{} does not connect to {}", w[0], w[1])));
            }
        }
        if !(self.outcome_severity >= 0.0 && self.outcome_severity.is_finite()) {
            return Err(fail("outcome_severity must be nonnegative".into()));
        }
        if let Some(s) = &self.shock {
            if s.domain_nodes.is_empty() || !(s.magnitude >= 0.0) {
                return Err(fail(
                    "shock needs a nonempty domain and nonnegative magnitude".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn edge_set(&self) -> BTreeSet<&EdgeRef> {
        self.trajectory.iter().collect()
    }

    pub fn node_set(&self) -> BTreeSet<NodeRef> {
        self.trajectory
            .iter()
            .flat_map(|e| [e.source_ref(), e.target_ref()])
            .collect()
    }
}

/// Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseDatabase {
    cases: Vec<CaseRecord>,
    index: BTreeMap<EdgeRef, BTreeSet<String>>,
}

/// Wire form: `{"cases": [...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseFile {
    pub cases: Vec<CaseRecord>,
}

impl CaseDatabase {
    pub fn new(mut cases: Vec<CaseRecord>) -> Result<Self> {
        for c in &cases {
            c.check()?;
        }
        cases.sort_by(|a, b| a.id.cmp(&b.id));
        if let Some(w) = cases.windows(2).find(|w| w[0].id == w[1].id) {
            return Err(Error::InvalidCase {
                id: w[0].id.clone(),
                reason: "duplicate case id".into(),
            });
        }
        let index = build_index(&cases);
        Ok(CaseDatabase { cases, index })
    }

    pub fn cases(&self) -> &[CaseRecord] {
        &self.cases
    }

    pub fn index(&self) -> &BTreeMap<EdgeRef, BTreeSet<String>> {
        &self.index
    }

    pub fn len(&self) -> usize {
        self.cases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cases.is_empty()
    }

    /// True when a fresh rebuild of the index matches the stored one.
    pub fn index_consistent(&self) -> bool {
        build_index(&self.cases) == self.index
    }

    /// Case counts per (stage label, pattern label) cell.
    pub fn coverage(&self) -> BTreeMap<(String, Option<PatternKind>), usize> {
        let mut out = BTreeMap::new();
        for c in &self.cases {
            *out.entry((c.stage_label.clone(), c.pattern_label))
                .or_insert(0) += 1;
        }
        out
    }

    pub fn to_file(&self) -> CaseFile {
        CaseFile {
            cases: self.cases.clone(),
        }
    }
}

fn build_index(cases: &[CaseRecord]) -> BTreeMap<EdgeRef, BTreeSet<String>> {
    let mut index: BTreeMap<EdgeRef, BTreeSet<String>> = BTreeMap::new();
    for c in cases {
        for e in &c.trajectory {
            index.entry(e.clone()).or_default().insert(c.id.clone());
        }
    }
    index
}

/// Fraction of cases whose trajectory traverses each edge. An edge repeated
/// within one trajectory counts once for that case.
pub fn estimate_rho(db: &CaseDatabase) -> Result<BTreeMap<EdgeRef, f64>> {
    if db.is_empty() {
        return Err(Error::EmptyDatabase);
    }
    let total = db.len() as f64;
    Ok(db
        .index
        .iter()
        .map(|(e, ids)| (e.clone(), ids.len() as f64 / total))
        .collect())
}

/// Serializable form of an [`estimate_rho`] result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RhoTable {
    pub case_count: usize,
    #[serde(with = "crate::serde_util::edge_values")]
    pub rho: BTreeMap<EdgeRef, f64>,
}

impl RhoTable {
    pub fn estimate(db: &CaseDatabase) -> Result<Self> {
        Ok(RhoTable {
            case_count: db.len(),
            rho: estimate_rho(db)?,
        })
    }
}

/// Per-feature `[min, max]` used to scale background distances.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FeatureRanges {
    ranges: BTreeMap<String, (f64, f64)>,
}

impl FeatureRanges {
    pub fn from_backgrounds<'a>(backgrounds: impl IntoIterator<Item = &'a Background>) -> Self {
        let mut ranges: BTreeMap<String, (f64, f64)> = BTreeMap::new();
        for b in backgrounds {
            for (k, &v) in b {
                ranges
                    .entry(k.clone())
                    .and_modify(|(lo, hi)| {
                        *lo = lo.min(v);
                        *hi = hi.max(v);
                    })
                    .or_insert((v, v));
            }
        }
        FeatureRanges { ranges }
    }

    pub fn insert(&mut self, feature: impl Into<String>, min: f64, max: f64) {
        self.ranges.insert(feature.into(), (min, max));
    }

    /// Distance between `a` and `b` on `feature`, scaled into `[0, 1]`.
    fn scaled(&self, feature: &str, a: f64, b: f64) -> f64 {
        match self.ranges.get(feature) {
            Some(&(lo, hi)) if hi > lo => libm::fmin((a - b).abs() / (hi - lo), 1.0),
            _ => {
                if a == b {
                    0.0
                } else {
                    1.0
                }
            }
        }
    }
}

/// `1 / (1 + d)` where `d` is the Euclidean distance over min-max scaled
/// features. Both vectors must carry the same feature names.
pub fn background_similarity(
    a: &Background,
    b: &Background,
    ranges: &FeatureRanges,
) -> Result<f64> {
    if a.is_empty() && b.is_empty() {
        return Err(Error::Schema("no shared features".into()));
    }
    if !a.keys().eq(b.keys()) {
        let only_a: Vec<&str> = a
            .keys()
            .filter(|k| !b.contains_key(*k))
            .map(String::as_str)
            .collect();
        let only_b: Vec<&str> = b
            .keys()
            .filter(|k| !a.contains_key(*k))
            .map(String::as_str)
            .collect();
        return Err(Error::Schema(format!(
            "feature names differ: {only_a:?} vs {only_b:?}"
        )));
    }
    let sq: f64 = a
        .iter()
        .map(|(k, &x)| {
            let d = ranges.scaled(k, x, b[k]);
            d * d
        })
        .sum();
    Ok(1.0 / (1.0 + libm::sqrt(sq)))
}

/// Estimates an ideal ontology for `background` at `stage_label` from the
/// matching cases.
///
/// Node weight (= importance) is the share of matching cases touching the
/// node, normalized per dimension; edge weight likewise for edges; `rho` is
/// the fraction of matching cases traversing the edge; `phi` is 1.
pub fn build_ideal(
    db: &CaseDatabase,
    background: &Background,
    stage_label: &str,
    min_similarity: f64,
) -> Result<Ontology> {
    let staged: Vec<&CaseRecord> = db
        .cases
        .iter()
        .filter(|c| c.stage_label == stage_label)
        .collect();
    let ranges = FeatureRanges::from_backgrounds(
        staged
            .iter()
            .map(|c| &c.background)
            .chain(core::iter::once(background)),
    );
    let mut matching = Vec::new();
    for c in &staged {
        let sim = if c.background.is_empty() && background.is_empty() {
            1.0
        } else {
            background_similarity(background, &c.background, &ranges)?
        };
        if sim >= min_similarity {
            matching.push(*c);
        }
    }
    if matching.is_empty() {
        return Err(Error::InsufficientData {
            stage_matches: staged.len(),
            similar_matches: 0,
        });
    }

    let mut node_freq: BTreeMap<NodeRef, usize> = BTreeMap::new();
    let mut edge_freq: BTreeMap<EdgeRef, usize> = BTreeMap::new();
    for c in &matching {
        for n in c.node_set() {
            *node_freq.entry(n).or_insert(0) += 1;
        }
        for e in c.edge_set() {
            *edge_freq.entry(e.clone()).or_insert(0) += 1;
        }
    }

    let mut dims: BTreeMap<DimensionId, DimensionGraph> = BTreeMap::new();
    let mut node_totals: BTreeMap<&DimensionId, usize> = BTreeMap::new();
    for (n, &f) in &node_freq {
        *node_totals.entry(&n.dimension).or_insert(0) += f;
    }
    let mut edge_totals: BTreeMap<&DimensionId, usize> = BTreeMap::new();
    for (e, &f) in &edge_freq {
        *edge_totals.entry(&e.dimension).or_insert(0) += f;
    }
    for (n, &f) in &node_freq {
        let w = f as f64 / node_totals[&n.dimension] as f64;
        let node = ConceptNode {
            omega: Some(w),
            phi: Some(1.0),
            ..ConceptNode::new(n.id.clone(), w)
        };
        dims.entry(n.dimension.clone())
            .or_default()
            .nodes
            .push(node);
    }
    let cases = matching.len() as f64;
    for (e, &f) in &edge_freq {
        let w = f as f64 / edge_totals[&e.dimension] as f64;
        let edge = CausalEdge::ideal(e.source.clone(), e.target.clone(), w, f as f64 / cases);
        dims.entry(e.dimension.clone())
            .or_default()
            .edges
            .push(edge);
    }

    Ok(Ontology {
        individual: "ideal".to_string(),
        stage: 0,
        stage_label: stage_label.to_string(),
        background: background.clone(),
        dimensions: dims,
    })
}
