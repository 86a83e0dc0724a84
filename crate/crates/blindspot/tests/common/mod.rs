//! Shared generators and independent oracles for the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use blindspot_core::ontology::normalize_weights;
use blindspot_core::{CausalEdge, ConceptNode, DimensionGraph, DimensionId, Ontology};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const DIMS: [&str; 4] = ["family", "health", "prof", "spirit"];

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

pub fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_blindspot"))
}

pub fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn blindspot")
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

fn normalized(nodes: Vec<ConceptNode>, edges: Vec<CausalEdge>) -> DimensionGraph {
    let g = DimensionGraph::new(nodes, edges);
    if g.nodes.is_empty() {
        g
    } else {
        let mut n = normalize_weights(&g).unwrap();
        // actual-side nodes carry no importance field
        if n.nodes.iter().all(|v| v.phi.is_none()) {
            for v in &mut n.nodes {
                v.omega = None;
            }
        }
        n
    }
}

/// A random ideal ontology with at most `max_nodes` nodes per dimension.
/// Every node has `phi`, every edge has `weight` and `rho`.
pub fn random_ideal(r: &mut ChaCha8Rng, max_nodes: usize) -> Ontology {
    let mut o = Ontology::new("ideal", 1, "s");
    let mut dims: Vec<&str> = DIMS.iter().copied().filter(|_| r.gen_bool(0.75)).collect();
    if dims.is_empty() {
        dims.push(DIMS[r.gen_range(0..4)]);
    }
    for d in dims {
        let k = r.gen_range(1..=max_nodes);
        let nodes: Vec<ConceptNode> = (0..k)
            .map(|i| {
                ConceptNode::new(format!("n{i}"), r.gen_range(0.01..1.0))
                    .with_phi(r.gen_range(0.0..=1.0))
            })
            .collect();
        let mut edges = Vec::new();
        for s in 0..k {
            for t in 0..k {
                if s != t && r.gen_bool(0.3) {
                    edges.push(CausalEdge::ideal(
                        format!("n{s}"),
                        format!("n{t}"),
                        r.gen_range(0.01..1.0),
                        r.gen_range(0.0..=1.0),
                    ));
                }
            }
        }
        o.dimensions.insert(d.into(), normalized(nodes, edges));
    }
    o
}

/// A random actual ontology overlapping `ideal`: some nodes and edges kept,
/// some new ones added, weights redrawn.
pub fn random_actual(r: &mut ChaCha8Rng, ideal: &Ontology) -> Ontology {
    if r.gen_bool(0.1) {
        let mut same = ideal.clone();
        same.individual = "same".into();
        return same;
    }
    let mut o = Ontology::new("actual", 1, "s");
    for (d, g) in &ideal.dimensions {
        if !r.gen_bool(0.85) {
            continue;
        }
        let mut ids: Vec<String> = g
            .nodes
            .iter()
            .filter(|_| r.gen_bool(0.7))
            .map(|n| n.id.clone())
            .collect();
        for i in 0..r.gen_range(0..3) {
            ids.push(format!("x{i}"));
        }
        let mut edges: Vec<CausalEdge> = g
            .edges
            .iter()
            .filter(|e| ids.contains(&e.source) && ids.contains(&e.target) && r.gen_bool(0.6))
            .map(|e| CausalEdge::new(e.source.clone(), e.target.clone()))
            .collect();
        if ids.len() >= 2 && r.gen_bool(0.5) {
            let pick: Vec<&String> = ids.choose_multiple(r, 2).collect();
            if !edges
                .iter()
                .any(|e| &e.source == pick[0] && &e.target == pick[1])
            {
                edges.push(CausalEdge::new(pick[0].clone(), pick[1].clone()));
            }
        }
        let nodes = ids
            .iter()
            .map(|id| ConceptNode::new(id.clone(), r.gen_range(0.01..1.0)))
            .collect();
        o.dimensions.insert(d.clone(), normalized(nodes, edges));
    }
    if r.gen_bool(0.2) {
        o.dimensions.insert(
            "extra".into(),
            normalized(vec![ConceptNode::new("e0", 1.0)], vec![]),
        );
    }
    o
}

pub type NaiveNode = (String, String);
pub type NaiveEdge = (String, String, String);

/// Flat record lists of an ontology.
fn flat(o: &Ontology) -> (Vec<(NaiveNode, f64)>, Vec<NaiveEdge>) {
    let mut nodes = Vec::new();
    let mut edges = Vec::new();
    for (d, g) in &o.dimensions {
        for n in &g.nodes {
            nodes.push(((d.0.clone(), n.id.clone()), n.weight));
        }
        for e in &g.edges {
            edges.push((d.0.clone(), e.source.clone(), e.target.clone()));
        }
    }
    (nodes, edges)
}

/// Set difference by linear scans over flat lists, sorted afterwards.
pub fn naive_diff(
    ideal: &Ontology,
    actual: &Ontology,
) -> (Vec<NaiveNode>, Vec<NaiveEdge>, Vec<(NaiveNode, f64)>) {
    let (inodes, iedges) = flat(ideal);
    let (anodes, aedges) = flat(actual);
    let mut missing_nodes = Vec::new();
    let mut delta = Vec::new();
    for (key, wi) in &inodes {
        match anodes.iter().find(|(k, _)| k == key) {
            None => missing_nodes.push(key.clone()),
            Some((_, wa)) => {
                if wi - wa > 0.0 {
                    delta.push((key.clone(), wi - wa));
                }
            }
        }
    }
    let mut missing_edges: Vec<NaiveEdge> =
        iedges.into_iter().filter(|e| !aedges.contains(e)).collect();
    missing_nodes.sort();
    missing_edges.sort();
    delta.sort_by(|a, b| a.0.cmp(&b.0));
    (missing_nodes, missing_edges, delta)
}

/// Every simple path with 1..=max_len edges, by exhaustive extension
/// without pruning, with its left-to-right product of criticalities.
pub fn brute_force_paths(
    dim: &DimensionId,
    g: &DimensionGraph,
    max_len: usize,
) -> Vec<(DimensionId, Vec<String>, f64)> {
    let rho: BTreeMap<(&str, &str), f64> = g
        .edges
        .iter()
        .filter(|e| e.source != e.target)
        .map(|e| ((e.source.as_str(), e.target.as_str()), e.rho.unwrap_or(0.0)))
        .collect();
    let ids: Vec<&str> = g.nodes.iter().map(|n| n.id.as_str()).collect();
    let mut out = Vec::new();
    let mut frontier: Vec<Vec<&str>> = ids.iter().map(|&v| vec![v]).collect();
    for _ in 0..max_len {
        let mut next = Vec::new();
        for p in &frontier {
            for &v in &ids {
                if p.contains(&v) || !rho.contains_key(&(*p.last().unwrap(), v)) {
                    continue;
                }
                let mut q = p.clone();
                q.push(v);
                let product = q.windows(2).fold(1.0, |acc, w| acc * rho[&(w[0], w[1])]);
                out.push((
                    dim.clone(),
                    q.iter().map(|s| s.to_string()).collect(),
                    product,
                ));
                next.push(q);
            }
        }
        frontier = next;
    }
    out
}
