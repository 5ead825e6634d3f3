//! Synthetic graph datasets.
//!
//! Two families are produced:
//!
//! * **GraphWave**: a cycle or chain *base* with one or more *motifs*
//!   (clique, star, fan, diamond, perfect binary tree) each hung off a
//!   random base node by a single bridging edge. Thirty shape combinations
//!   with 100 graphs each.
//! * **GraphQA**: Erdős–Rényi, Barabási–Albert, scale-free and
//!   stochastic-block graphs (500 each) plus path, complete and star graphs
//!   (100 each), all with 5 to 20 nodes.
//!
//! Every record keeps the order in which its generator created the edges,
//! which the `DefaultOrder` linearization replays. Graph `i` of a dataset
//! draws from its own random stream, so generation is order independent.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::GeneratorError;
use crate::graph::{EdgePair, Graph, NodeId};
use crate::rng;
use crate::tasks::TaskInstance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MotifKind {
    Clique,
    Star,
    Fan,
    Diamond,
    Tree,
}

impl MotifKind {
    pub const ALL: [MotifKind; 5] = [
        MotifKind::Clique,
        MotifKind::Star,
        MotifKind::Fan,
        MotifKind::Diamond,
        MotifKind::Tree,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            MotifKind::Clique => "clique",
            MotifKind::Star => "star",
            MotifKind::Fan => "fan",
            MotifKind::Diamond => "diamond",
            MotifKind::Tree => "tree",
        }
    }

    /// Admissible size parameter: node count, or levels for trees.
    pub fn size_range(&self) -> RangeInclusive<usize> {
        match self {
            MotifKind::Clique | MotifKind::Star | MotifKind::Fan => 4..=11,
            MotifKind::Diamond => 6..=6,
            MotifKind::Tree => 3..=6,
        }
    }
}

impl fmt::Display for MotifKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MotifKind {
    type Err = GeneratorError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        MotifKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| GeneratorError::UnknownShape(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MotifShape {
    pub kind: MotifKind,
    /// Nodes, or levels for [`MotifKind::Tree`].
    pub size: usize,
}

/// A motif on local ids `0..node_count`; node 0 is the attachment point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Motif {
    pub shape: MotifShape,
    pub node_count: usize,
    pub edges: Vec<(NodeId, NodeId)>,
}

pub type MotifConstructor = fn(usize) -> Result<Motif, GeneratorError>;

fn check(kind: MotifKind, size: usize) -> Result<MotifShape, GeneratorError> {
    if kind.size_range().contains(&size) {
        Ok(MotifShape { kind, size })
    } else {
        Err(GeneratorError::SizeOutOfRange { kind: kind.name(), size })
    }
}

pub fn clique(n: usize) -> Result<Motif, GeneratorError> {
    let shape = check(MotifKind::Clique, n)?;
    let n = n as NodeId;
    let edges = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    Ok(Motif { shape, node_count: n as usize, edges })
}

/// Center 0 joined to every other node.
pub fn star(n: usize) -> Result<Motif, GeneratorError> {
    let shape = check(MotifKind::Star, n)?;
    let edges = (1..n as NodeId).map(|i| (0, i)).collect();
    Ok(Motif { shape, node_count: n, edges })
}

/// Apex 0 joined to every node of the path `1 - 2 - ... - (n-1)`; `2n - 3` edges.
pub fn fan(n: usize) -> Result<Motif, GeneratorError> {
    let shape = check(MotifKind::Fan, n)?;
    let n = n as NodeId;
    let mut edges: Vec<_> = (1..n).map(|i| (0, i)).collect();
    edges.extend((2..n).map(|i| (i - 1, i)));
    Ok(Motif { shape, node_count: n as usize, edges })
}

/// 4-cycle `0-1-2-3` plus nodes 4 and 5 each joined to all four cycle nodes.
pub fn diamond(n: usize) -> Result<Motif, GeneratorError> {
    let shape = check(MotifKind::Diamond, n)?;
    let mut edges = vec![(0, 1), (1, 2), (2, 3), (3, 0)];
    for hub in [4, 5] {
        edges.extend((0..4).map(|i| (hub, i)));
    }
    Ok(Motif { shape, node_count: 6, edges })
}

/// Perfect binary tree with `levels` levels, heap-numbered from the root 0.
pub fn tree(levels: usize) -> Result<Motif, GeneratorError> {
    let shape = check(MotifKind::Tree, levels)?;
    let n = (1usize << levels) - 1;
    let edges = (1..n as NodeId).map(|i| ((i - 1) / 2, i)).collect();
    Ok(Motif { shape, node_count: n, edges })
}

pub fn motif_catalog() -> BTreeMap<MotifKind, MotifConstructor> {
    BTreeMap::from([
        (MotifKind::Clique, clique as MotifConstructor),
        (MotifKind::Star, star),
        (MotifKind::Fan, fan),
        (MotifKind::Diamond, diamond),
        (MotifKind::Tree, tree),
    ])
}

pub fn build_motif(shape: MotifShape) -> Result<Motif, GeneratorError> {
    motif_catalog()[&shape.kind](shape.size)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BaseKind {
    Cycle,
    Chain,
}

/// Which generator produced a record, with its drawn parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "generator", rename_all = "kebab-case")]
pub enum Source {
    GraphWave {
        base: BaseKind,
        base_nodes: usize,
        motifs: Vec<MotifShape>,
        /// Base node each motif is bridged to.
        attached_to: Vec<NodeId>,
    },
    ErdosRenyi { n: usize, p: f64 },
    BarabasiAlbert { n: usize, m: usize },
    ScaleFree { n: usize },
    StochasticBlock { block_sizes: Vec<usize>, p_in: f64, p_out: f64 },
    Path { n: usize },
    Complete { n: usize },
    Star { n: usize },
}

impl Source {
    pub fn family(&self) -> &'static str {
        match self {
            Source::GraphWave { .. } => "graphwave",
            Source::ErdosRenyi { .. } => "er",
            Source::BarabasiAlbert { .. } => "ba",
            Source::ScaleFree { .. } => "sfn",
            Source::StochasticBlock { .. } => "sbm",
            Source::Path { .. } => "path",
            Source::Complete { .. } => "complete",
            Source::Star { .. } => "star",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphRecord {
    pub id: String,
    pub source: Source,
    pub graph: Graph,
    /// Edges in the order the generator created them.
    pub default_edge_order: Vec<(NodeId, NodeId)>,
    /// Distinct motif kinds present; empty outside GraphWave.
    #[serde(default)]
    pub motif_shapes: Vec<MotifKind>,
    /// Marks the record used as the one-shot example.
    #[serde(default)]
    pub exemplar: bool,
    #[serde(default)]
    pub instances: Vec<TaskInstance>,
}

impl GraphRecord {
    fn from_sequence(
        id: String,
        source: Source,
        n: usize,
        sequence: Vec<(NodeId, NodeId)>,
        motif_shapes: Vec<MotifKind>,
    ) -> Self {
        // keep first occurrence of every undirected pair, drop self-loops
        let mut seen = std::collections::HashSet::new();
        let order: Vec<(NodeId, NodeId)> = sequence
            .into_iter()
            .filter(|&(a, b)| EdgePair::new(a, b).map(|e| seen.insert(e)).unwrap_or(false))
            .collect();
        let graph = Graph::from_edges(n, order.iter().copied()).expect("generator emits valid edges");
        Self {
            id,
            source,
            graph,
            default_edge_order: order,
            motif_shapes,
            exemplar: false,
            instances: Vec::new(),
        }
    }

    pub fn is_graphwave(&self) -> bool {
        matches!(self.source, Source::GraphWave { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DatasetKind {
    GraphWave,
    GraphQa,
}

impl DatasetKind {
    pub fn name(&self) -> &'static str {
        match self {
            DatasetKind::GraphWave => "graphwave",
            DatasetKind::GraphQa => "graphqa",
        }
    }
}

impl fmt::Display for DatasetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DatasetKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "graphwave" => Ok(DatasetKind::GraphWave),
            "graphqa" => Ok(DatasetKind::GraphQa),
            other => Err(format!("unknown dataset `{other}`")),
        }
    }
}

/// Sampling ranges for GraphWave graphs (all bounds inclusive).
///
/// The defaults keep every size inside the admissible motif ranges and
/// reproduce the reference dataset's mean size of roughly 32 nodes and
/// 44 edges per graph; see the guide's dataset chapter for the comparison
/// against sampling the full ranges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphWaveConfig {
    pub base_nodes: (usize, usize),
    pub motif_nodes: (usize, usize),
    pub tree_levels: (usize, usize),
    pub graphs_per_combination: usize,
}

impl Default for GraphWaveConfig {
    fn default() -> Self {
        Self {
            base_nodes: (3, 20),
            motif_nodes: (4, 10),
            tree_levels: (3, 5),
            graphs_per_combination: 100,
        }
    }
}

impl GraphWaveConfig {
    /// Every range at its widest admissible extent.
    pub fn full_ranges() -> Self {
        Self {
            base_nodes: (3, 21),
            motif_nodes: (4, 11),
            tree_levels: (3, 6),
            graphs_per_combination: 100,
        }
    }
}

/// The thirty motif combinations: 5 single shapes, 10 distinct pairs,
/// 10 distinct triplets and 5 same-shape pairs.
pub fn graphwave_combinations() -> Vec<Vec<MotifKind>> {
    let k = MotifKind::ALL;
    let mut out: Vec<Vec<MotifKind>> = k.iter().map(|&a| vec![a]).collect();
    for i in 0..5 {
        for j in i + 1..5 {
            out.push(vec![k[i], k[j]]);
        }
    }
    for i in 0..5 {
        for j in i + 1..5 {
            for l in j + 1..5 {
                out.push(vec![k[i], k[j], k[l]]);
            }
        }
    }
    out.extend(k.iter().map(|&a| vec![a, a]));
    out
}

pub fn gen_graphwave(seed: u64) -> Vec<GraphRecord> {
    gen_graphwave_with(seed, &GraphWaveConfig::default())
}

pub fn gen_graphwave_with(seed: u64, cfg: &GraphWaveConfig) -> Vec<GraphRecord> {
    let combos = graphwave_combinations();
    let mut records = Vec::with_capacity(combos.len() * cfg.graphs_per_combination);
    for combo in &combos {
        for _ in 0..cfg.graphs_per_combination {
            let index = records.len();
            let mut r = rng::indexed(seed, "graphwave", index as u64);
            records.push(graphwave_graph(index, combo, cfg, &mut r));
        }
    }
    mark_exemplar(&mut records, seed);
    records
}

fn graphwave_graph(index: usize, combo: &[MotifKind], cfg: &GraphWaveConfig, r: &mut ChaCha8Rng) -> GraphRecord {
    let base = if r.gen::<bool>() { BaseKind::Cycle } else { BaseKind::Chain };
    let base_nodes = r.gen_range(cfg.base_nodes.0..=cfg.base_nodes.1);
    let mut sequence: Vec<(NodeId, NodeId)> = (1..base_nodes as NodeId).map(|i| (i - 1, i)).collect();
    if base == BaseKind::Cycle {
        sequence.push((base_nodes as NodeId - 1, 0));
    }

    let mut next = base_nodes as NodeId;
    let mut motifs = Vec::new();
    let mut attached_to = Vec::new();
    for &kind in combo {
        let size = match kind {
            MotifKind::Diamond => 6,
            MotifKind::Tree => r.gen_range(cfg.tree_levels.0..=cfg.tree_levels.1),
            _ => r.gen_range(cfg.motif_nodes.0..=cfg.motif_nodes.1),
        };
        let motif = build_motif(MotifShape { kind, size }).expect("configured sizes are admissible");
        let anchor = r.gen_range(0..base_nodes as NodeId);
        sequence.extend(motif.edges.iter().map(|&(a, b)| (a + next, b + next)));
        sequence.push((anchor, next));
        motifs.push(motif.shape);
        attached_to.push(anchor);
        next += motif.node_count as NodeId;
    }

    let mut shapes = combo.to_vec();
    shapes.sort_unstable();
    shapes.dedup();
    GraphRecord::from_sequence(
        format!("graphwave-{index:05}"),
        Source::GraphWave {
            base,
            base_nodes,
            motifs,
            attached_to,
        },
        next as usize,
        sequence,
        shapes,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum QaFamily {
    ErdosRenyi,
    BarabasiAlbert,
    ScaleFree,
    StochasticBlock,
    Path,
    Complete,
    Star,
}

const GRAPHQA_PLAN: [(QaFamily, usize); 7] = [
    (QaFamily::ErdosRenyi, 500),
    (QaFamily::BarabasiAlbert, 500),
    (QaFamily::ScaleFree, 500),
    (QaFamily::StochasticBlock, 500),
    (QaFamily::Path, 100),
    (QaFamily::Complete, 100),
    (QaFamily::Star, 100),
];

pub const GRAPHQA_NODES: RangeInclusive<usize> = 5..=20;

pub fn gen_graphqa(seed: u64) -> Vec<GraphRecord> {
    let mut records = Vec::with_capacity(2300);
    for (family, count) in GRAPHQA_PLAN {
        for _ in 0..count {
            let index = records.len();
            let mut r = rng::indexed(seed, "graphqa", index as u64);
            let n = r.gen_range(GRAPHQA_NODES);
            let (source, sequence) = match family {
                QaFamily::ErdosRenyi => erdos_renyi(n, &mut r),
                QaFamily::BarabasiAlbert => barabasi_albert(n, &mut r),
                QaFamily::ScaleFree => (Source::ScaleFree { n }, scale_free(n, &mut r)),
                QaFamily::StochasticBlock => stochastic_block(n, &mut r),
                QaFamily::Path => (Source::Path { n }, (1..n as NodeId).map(|i| (i - 1, i)).collect()),
                QaFamily::Complete => (
                    Source::Complete { n },
                    (0..n as NodeId).flat_map(|i| (i + 1..n as NodeId).map(move |j| (i, j))).collect(),
                ),
                QaFamily::Star => (Source::Star { n }, (1..n as NodeId).map(|i| (0, i)).collect()),
            };
            let id = format!("graphqa-{}-{index:05}", source.family());
            records.push(GraphRecord::from_sequence(id, source, n, sequence, Vec::new()));
        }
    }
    mark_exemplar(&mut records, seed);
    records
}

pub fn generate(kind: DatasetKind, seed: u64) -> Vec<GraphRecord> {
    match kind {
        DatasetKind::GraphWave => gen_graphwave(seed),
        DatasetKind::GraphQa => gen_graphqa(seed),
    }
}

fn mark_exemplar(records: &mut [GraphRecord], seed: u64) {
    if records.is_empty() {
        return;
    }
    let pick = rng::indexed(seed, "exemplar", 0).gen_range(0..records.len());
    records[pick].exemplar = true;
}

fn erdos_renyi(n: usize, r: &mut ChaCha8Rng) -> (Source, Vec<(NodeId, NodeId)>) {
    let p = r.gen_range(0.2..=0.6);
    let mut edges = Vec::new();
    for i in 0..n as NodeId {
        for j in i + 1..n as NodeId {
            if r.gen_bool(p) {
                edges.push((i, j));
            }
        }
    }
    (Source::ErdosRenyi { n, p }, edges)
}

/// Preferential attachment starting from a star on `m + 1` nodes.
fn barabasi_albert(n: usize, r: &mut ChaCha8Rng) -> (Source, Vec<(NodeId, NodeId)>) {
    let m = r.gen_range(1..=3usize).min(n - 1);
    let mut edges: Vec<(NodeId, NodeId)> = (1..=m as NodeId).map(|i| (0, i)).collect();
    // every node appears once per incident edge
    let mut repeated: Vec<NodeId> = edges.iter().flat_map(|&(a, b)| [a, b]).collect();
    for source in (m + 1) as NodeId..n as NodeId {
        let mut targets = Vec::with_capacity(m);
        while targets.len() < m {
            let t = *repeated.choose(r).expect("non-empty after seeding");
            if !targets.contains(&t) {
                targets.push(t);
            }
        }
        for &t in &targets {
            edges.push((source, t));
            repeated.push(t);
            repeated.push(source);
        }
    }
    (Source::BarabasiAlbert { n, m }, edges)
}

/// Directed scale-free growth (Bollobás et al.) made undirected and simple.
fn scale_free(n: usize, r: &mut ChaCha8Rng) -> Vec<(NodeId, NodeId)> {
    const ALPHA: f64 = 0.41;
    const BETA: f64 = 0.54;
    const DELTA_IN: f64 = 0.2;
    const DELTA_OUT: f64 = 0.0;

    let mut arcs: Vec<(NodeId, NodeId)> = vec![(0, 1), (1, 2), (2, 0)];
    let mut nodes: NodeId = 3;

    fn choose(r: &mut ChaCha8Rng, endpoints: &[NodeId], nodes: NodeId, delta: f64) -> NodeId {
        let total = endpoints.len() as f64;
        let weight = delta * nodes as f64;
        if delta > 0.0 && r.gen::<f64>() < weight / (weight + total) {
            r.gen_range(0..nodes)
        } else {
            *endpoints.choose(r).expect("arcs exist")
        }
    }

    while (nodes as usize) < n {
        let heads: Vec<NodeId> = arcs.iter().map(|a| a.1).collect();
        let tails: Vec<NodeId> = arcs.iter().map(|a| a.0).collect();
        let x = r.gen::<f64>();
        let arc = if x < ALPHA {
            let w = choose(r, &heads, nodes, DELTA_IN);
            let v = nodes;
            nodes += 1;
            (v, w)
        } else if x < ALPHA + BETA {
            let v = choose(r, &tails, nodes, DELTA_OUT);
            let w = choose(r, &heads, nodes, DELTA_IN);
            (v, w)
        } else {
            let v = choose(r, &tails, nodes, DELTA_OUT);
            let w = nodes;
            nodes += 1;
            (v, w)
        };
        arcs.push(arc);
    }
    arcs
}

/// Two or three blocks, resampled until every block is non-empty and no node is isolated.
fn stochastic_block(n: usize, r: &mut ChaCha8Rng) -> (Source, Vec<(NodeId, NodeId)>) {
    const P_IN: f64 = 0.6;
    const P_OUT: f64 = 0.1;
    loop {
        let blocks = r.gen_range(2..=3usize);
        let mut membership: Vec<usize> = (0..n).map(|_| r.gen_range(0..blocks)).collect();
        membership.sort_unstable();
        let sizes: Vec<usize> = (0..blocks).map(|b| membership.iter().filter(|&&m| m == b).count()).collect();
        if sizes.contains(&0) {
            continue;
        }
        let mut edges = Vec::new();
        let mut degree = vec![0usize; n];
        for i in 0..n {
            for j in i + 1..n {
                let p = if membership[i] == membership[j] { P_IN } else { P_OUT };
                if r.gen_bool(p) {
                    edges.push((i as NodeId, j as NodeId));
                    degree[i] += 1;
                    degree[j] += 1;
                }
            }
        }
        if degree.contains(&0) {
            continue;
        }
        return (
            Source::StochasticBlock {
                block_sizes: sizes,
                p_in: P_IN,
                p_out: P_OUT,
            },
            edges,
        );
    }
}

/// `(count, mean nodes, mean edges)`.
pub fn summary(records: &[GraphRecord]) -> (usize, f64, f64) {
    let n = records.len();
    if n == 0 {
        return (0, 0.0, 0.0);
    }
    let nodes: usize = records.iter().map(|r| r.graph.node_count()).sum();
    let edges: usize = records.iter().map(|r| r.graph.edge_count()).sum();
    (n, nodes as f64 / n as f64, edges as f64 / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn motif_sizes() {
        let s = star(5).unwrap();
        assert_eq!((s.node_count, s.edges.len()), (5, 4));
        let t = tree(3).unwrap();
        assert_eq!((t.node_count, t.edges.len()), (7, 6));
        for n in 4..=11 {
            let f = fan(n).unwrap();
            assert_eq!(f.edges.len(), 2 * n - 3);
            assert_eq!(clique(n).unwrap().edges.len(), n * (n - 1) / 2);
        }
        let d = diamond(6).unwrap();
        assert_eq!((d.node_count, d.edges.len()), (6, 12));
    }

    #[test]
    fn motif_range_errors() {
        assert!(matches!(clique(3), Err(GeneratorError::SizeOutOfRange { .. })));
        assert!(tree(7).is_err());
        assert!(diamond(5).is_err());
        assert_eq!("hexagon".parse::<MotifKind>(), Err(GeneratorError::UnknownShape("hexagon".into())));
        assert_eq!("Fan".parse::<MotifKind>(), Ok(MotifKind::Fan));
    }

    #[test]
    fn motifs_are_simple_connected_graphs() {
        for (kind, ctor) in motif_catalog() {
            for size in kind.size_range() {
                let m = ctor(size).unwrap();
                let g = Graph::from_edges(m.node_count, m.edges.iter().copied()).unwrap();
                assert_eq!(g.edge_count(), m.edges.len(), "{kind} {size} has duplicate edges");
                assert!(g.is_connected());
            }
        }
    }

    #[test]
    fn thirty_combinations() {
        let c = graphwave_combinations();
        assert_eq!(c.len(), 30);
        let distinct: std::collections::BTreeSet<_> = c.iter().cloned().collect();
        assert_eq!(distinct.len(), 30);
    }

    #[test]
    fn graphwave_small_run() {
        let cfg = GraphWaveConfig {
            graphs_per_combination: 2,
            ..Default::default()
        };
        let recs = gen_graphwave_with(5, &cfg);
        assert_eq!(recs.len(), 60);
        assert_eq!(recs.iter().filter(|r| r.exemplar).count(), 1);
        for r in &recs {
            assert!(r.graph.is_connected());
            assert!(!r.motif_shapes.is_empty());
            assert_eq!(r.default_edge_order.len(), r.graph.edge_count());
        }
        assert_eq!(recs, gen_graphwave_with(5, &cfg));
    }

    #[test]
    fn graphqa_families() {
        let recs = gen_graphqa(1);
        assert_eq!(recs.len(), 2300);
        for r in &recs {
            let n = r.graph.node_count();
            assert!(GRAPHQA_NODES.contains(&n), "{} has {n} nodes", r.id);
            if let Source::Complete { n } = r.source {
                assert_eq!(r.graph.edge_count(), n * (n - 1) / 2);
            }
            if let Source::StochasticBlock { .. } = r.source {
                assert!((0..n).all(|i| r.graph.degree_at(i) > 0));
            }
        }
    }
}
