//! Edge-list linearization.
//!
//! A linearization walks the nodes of a graph from most to least important
//! and, at each node, emits the incident edges that have not been emitted
//! yet in a seeded random order. Each edge therefore appears exactly once,
//! at the visit of its higher-ranked endpoint, and is rendered with that
//! endpoint first. Labels are then reassigned according to a [`Labeling`].
//!
//! With `via_linegraph`, the ranking is computed on `L(G)` instead, so edges
//! are ordered directly by their own importance.
//!
//! Randomness comes from independent named streams (node ties, edge
//! shuffles, labels), so switching the labeling never changes which edges
//! are emitted in which order.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::LinearizeError;
use crate::graph::{EdgePair, Graph, NodeId};
use crate::measures::{rank_nodes, Measure, NodeRanking};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EdgeOrdering {
    CoreNumber,
    Degree,
    PageRank,
    /// Uniform shuffle of the edge list.
    Random,
    /// Edge order emitted by the graph generator.
    DefaultOrder,
}

impl EdgeOrdering {
    pub fn measure(&self) -> Option<Measure> {
        match self {
            EdgeOrdering::CoreNumber => Some(Measure::CoreNumber),
            EdgeOrdering::Degree => Some(Measure::Degree),
            EdgeOrdering::PageRank => Some(Measure::PageRank),
            EdgeOrdering::Random | EdgeOrdering::DefaultOrder => None,
        }
    }
}

impl From<Measure> for EdgeOrdering {
    fn from(m: Measure) -> Self {
        match m {
            Measure::CoreNumber => EdgeOrdering::CoreNumber,
            Measure::Degree => EdgeOrdering::Degree,
            Measure::PageRank => EdgeOrdering::PageRank,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Labeling {
    /// Seeded uniform permutation of `0..n`.
    RandomLabels,
    /// Label = position in the importance ranking.
    NodeRelabeling,
    /// Position of the id among the sorted generator ids.
    DefaultLabels,
}

impl Labeling {
    pub const ALL: [Labeling; 3] = [Labeling::RandomLabels, Labeling::NodeRelabeling, Labeling::DefaultLabels];

    pub fn tag(&self) -> &'static str {
        match self {
            Labeling::RandomLabels => "random",
            Labeling::NodeRelabeling => "relabel",
            Labeling::DefaultLabels => "default",
        }
    }

    pub fn title(&self) -> &'static str {
        match self {
            Labeling::RandomLabels => "Random Labels",
            Labeling::NodeRelabeling => "Node Relabeling",
            Labeling::DefaultLabels => "Default Labels",
        }
    }
}

impl fmt::Display for Labeling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Labeling {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "random" | "random-labels" => Ok(Labeling::RandomLabels),
            "relabel" | "node-relabeling" | "relabeling" => Ok(Labeling::NodeRelabeling),
            "default" | "default-labels" => Ok(Labeling::DefaultLabels),
            other => Err(format!("unknown labeling `{other}`")),
        }
    }
}

/// An ordering together with whether it is applied to the line graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Method {
    pub ordering: EdgeOrdering,
    pub via_linegraph: bool,
}

impl Method {
    pub const fn new(ordering: EdgeOrdering, via_linegraph: bool) -> Self {
        Self { ordering, via_linegraph }
    }

    /// The six importance-based methods, node-level first.
    pub fn structured() -> Vec<Method> {
        [false, true]
            .into_iter()
            .flat_map(|lg| Measure::ALL.into_iter().map(move |m| Method::new(m.into(), lg)))
            .collect()
    }

    pub fn title(&self) -> String {
        let base = match self.ordering {
            EdgeOrdering::Random => return "Random".into(),
            EdgeOrdering::DefaultOrder => return "Default Ordering".into(),
            o => o.measure().expect("structured ordering").title(),
        };
        if self.via_linegraph {
            format!("LG{{{base}}}")
        } else {
            base.to_string()
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let base = match self.ordering {
            EdgeOrdering::Random => "random",
            EdgeOrdering::DefaultOrder => "default",
            o => o.measure().expect("structured ordering").tag(),
        };
        if self.via_linegraph {
            write!(f, "lg-{base}")
        } else {
            f.write_str(base)
        }
    }
}

impl FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.trim().to_ascii_lowercase();
        let (rest, lg) = if let Some(r) = lower.strip_prefix("lg-") {
            (r.to_string(), true)
        } else if let Some(r) = lower.strip_prefix("lg{").and_then(|r| r.strip_suffix('}')) {
            (r.to_string(), true)
        } else {
            (lower.clone(), false)
        };
        let ordering = match rest.as_str() {
            "random" => EdgeOrdering::Random,
            "default" | "default-order" | "default-ordering" => EdgeOrdering::DefaultOrder,
            m => m.parse::<Measure>()?.into(),
        };
        Ok(Method::new(ordering, lg))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LinearizationSpec {
    pub ordering: EdgeOrdering,
    pub via_linegraph: bool,
    pub labeling: Labeling,
    pub seed: u64,
}

impl LinearizationSpec {
    pub fn new(method: Method, labeling: Labeling, seed: u64) -> Self {
        Self {
            ordering: method.ordering,
            via_linegraph: method.via_linegraph,
            labeling,
            seed,
        }
    }

    pub fn method(&self) -> Method {
        Method::new(self.ordering, self.via_linegraph)
    }

    pub fn validate(&self) -> Result<(), LinearizeError> {
        if self.via_linegraph && self.ordering.measure().is_none() {
            return Err(LinearizeError::InvalidSpec(format!(
                "{:?} ordering cannot be applied to the line graph",
                self.ordering
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearizedGraph {
    pub spec: LinearizationSpec,
    /// Original node ids, sorted.
    pub nodes: Vec<NodeId>,
    /// `labels[i]` is the emitted label of `nodes[i]`.
    pub labels: Vec<u32>,
    /// Emission-ordered edges under the final labels, leading endpoint first.
    pub edges: Vec<(u32, u32)>,
    /// Ranking that drove the order; over `L(G)` node ids for line-graph methods.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ranking: Option<NodeRanking>,
}

impl LinearizedGraph {
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn label_of(&self, id: NodeId) -> Option<u32> {
        self.nodes.binary_search(&id).ok().map(|i| self.labels[i])
    }

    /// Inverse label map: `ids[label]`.
    pub fn ids_by_label(&self) -> Vec<NodeId> {
        let mut ids = vec![0; self.labels.len()];
        for (i, &l) in self.labels.iter().enumerate() {
            ids[l as usize] = self.nodes[i];
        }
        ids
    }

    /// Emitted edges translated back to original ids, in emission order.
    pub fn original_edges(&self) -> Vec<(NodeId, NodeId)> {
        let ids = self.ids_by_label();
        self.edges.iter().map(|&(a, b)| (ids[a as usize], ids[b as usize])).collect()
    }

    /// `"(u1, v1), (u2, v2), ..."` in emission order.
    pub fn render(&self) -> String {
        render_edge_list(&self.edges)
    }

    /// Checks that the output is a relabeled copy of `g`'s edge set.
    pub fn check_against(&self, g: &Graph) -> Result<(), String> {
        if self.nodes != g.nodes() {
            return Err("node list differs from graph".into());
        }
        let n = self.labels.len();
        let mut seen = vec![false; n];
        for &l in &self.labels {
            if l as usize >= n || std::mem::replace(&mut seen[l as usize], true) {
                return Err(format!("labels are not a bijection onto 0..{n}"));
            }
        }
        let mut got: Vec<EdgePair> = self
            .original_edges()
            .into_iter()
            .map(|(a, b)| EdgePair::new(a, b).map_err(|e| e.to_string()))
            .collect::<Result<_, _>>()?;
        got.sort_unstable();
        if got != g.edges() {
            return Err("emitted edge multiset differs from the graph's edge set".into());
        }
        Ok(())
    }
}

/// Linearizes `g`. `DefaultOrder` needs [`linearize_with_emission_order`].
pub fn linearize(g: &Graph, spec: &LinearizationSpec) -> Result<LinearizedGraph, LinearizeError> {
    linearize_with_emission_order(g, None, spec)
}

/// Linearizes `g`, using `emission_order` (the generator's edge sequence)
/// when the spec asks for `DefaultOrder`.
pub fn linearize_with_emission_order(
    g: &Graph,
    emission_order: Option<&[(NodeId, NodeId)]>,
    spec: &LinearizationSpec,
) -> Result<LinearizedGraph, LinearizeError> {
    spec.validate()?;
    let hash = g.canonical_hash();
    let (oriented, node_ranking, ranking) = match (spec.ordering.measure(), spec.via_linegraph) {
        (Some(m), false) => {
            let r = rank_nodes(g, m, spec.seed);
            let edges = walk_ranked_nodes(g, &r, spec.seed, hash);
            (edges, Some(r.clone()), Some(r))
        }
        (Some(m), true) => {
            let (edges, r) = walk_linegraph(g, m, spec.seed)?;
            (edges, None, r)
        }
        (None, _) if spec.ordering == EdgeOrdering::Random => (shuffle_edges(g, spec.seed, hash), None, None),
        (None, _) => {
            let order = emission_order.ok_or_else(|| {
                LinearizeError::InvalidSpec("default ordering needs the generator's edge order".into())
            })?;
            (checked_default_order(g, order)?, None, None)
        }
    };

    let labels = assign_labels(g, &oriented, node_ranking.as_ref(), spec, hash);
    let label_of = |id: NodeId| labels[g.index_of(id).expect("edge endpoint in graph")];
    let edges = oriented.iter().map(|&(a, b)| (label_of(a), label_of(b))).collect();

    Ok(LinearizedGraph {
        spec: *spec,
        nodes: g.nodes().to_vec(),
        labels,
        edges,
        ranking,
    })
}

/// Convenience wrapper for line-graph methods; rejects edgeless graphs.
pub fn linearize_via_linegraph(g: &Graph, spec: &LinearizationSpec) -> Result<LinearizedGraph, LinearizeError> {
    if !spec.via_linegraph {
        return Err(LinearizeError::InvalidSpec("spec does not select the line graph".into()));
    }
    linearize(g, spec)
}

/// Fully random edge order and labels.
pub fn random_baseline(g: &Graph, seed: u64) -> LinearizedGraph {
    let spec = LinearizationSpec {
        ordering: EdgeOrdering::Random,
        via_linegraph: false,
        labeling: Labeling::RandomLabels,
        seed,
    };
    linearize(g, &spec).expect("random baseline spec is always valid")
}

fn walk_ranked_nodes(g: &Graph, ranking: &NodeRanking, seed: u64, hash: u64) -> Vec<(NodeId, NodeId)> {
    let mut edge_rng = rng::stream(seed, hash, &format!("edges/{}", ranking.measure.tag()));
    let mut visited = vec![false; g.node_count()];
    let mut out = Vec::with_capacity(g.edge_count());
    for &id in &ranking.order {
        let i = g.index_of(id).expect("ranking node in graph");
        let mut batch: Vec<usize> = g.neighbor_indices(i).iter().copied().filter(|&j| !visited[j]).collect();
        batch.shuffle(&mut edge_rng);
        out.extend(batch.into_iter().map(|j| (id, g.id_at(j))));
        visited[i] = true;
    }
    out
}

fn walk_linegraph(g: &Graph, measure: Measure, seed: u64) -> Result<(Vec<(NodeId, NodeId)>, Option<NodeRanking>), LinearizeError> {
    if g.edge_count() == 0 {
        return Ok((Vec::new(), None));
    }
    let lg = g.linegraph()?;
    let ranking = rank_nodes(&lg.graph, measure, seed);
    // first-appearance position of each original node index
    let mut first_seen: Vec<Option<usize>> = vec![None; g.node_count()];
    let mut out = Vec::with_capacity(g.edge_count());
    for &k in &ranking.order {
        let e = lg.edge_of[k as usize];
        let (iu, iv) = (g.index_of(e.u()).unwrap(), g.index_of(e.v()).unwrap());
        let lead_v = match (first_seen[iu], first_seen[iv]) {
            (Some(a), Some(b)) => b < a,
            (None, Some(_)) => true,
            _ => false,
        };
        let pair = if lead_v { (e.v(), e.u()) } else { (e.u(), e.v()) };
        out.push(pair);
        let t = out.len();
        first_seen[iu].get_or_insert(t);
        first_seen[iv].get_or_insert(t);
    }
    Ok((out, Some(ranking)))
}

fn shuffle_edges(g: &Graph, seed: u64, hash: u64) -> Vec<(NodeId, NodeId)> {
    let mut r = rng::stream(seed, hash, "edges/random");
    let mut edges: Vec<(NodeId, NodeId)> = g
        .edges()
        .iter()
        .map(|e| if r.gen::<bool>() { (e.v(), e.u()) } else { (e.u(), e.v()) })
        .collect();
    edges.shuffle(&mut r);
    edges
}

fn checked_default_order(g: &Graph, order: &[(NodeId, NodeId)]) -> Result<Vec<(NodeId, NodeId)>, LinearizeError> {
    let mut canon = order
        .iter()
        .map(|&(a, b)| EdgePair::new(a, b))
        .collect::<Result<Vec<_>, _>>()?;
    canon.sort_unstable();
    if canon != g.edges() {
        return Err(LinearizeError::InvalidSpec(
            "generator edge order is not a permutation of the graph's edges".into(),
        ));
    }
    Ok(order.to_vec())
}

fn assign_labels(
    g: &Graph,
    oriented: &[(NodeId, NodeId)],
    node_ranking: Option<&NodeRanking>,
    spec: &LinearizationSpec,
    hash: u64,
) -> Vec<u32> {
    let n = g.node_count();
    match spec.labeling {
        Labeling::DefaultLabels => (0..n as u32).collect(),
        Labeling::RandomLabels => {
            let mut perm: Vec<u32> = (0..n as u32).collect();
            perm.shuffle(&mut rng::stream(spec.seed, hash, "labels"));
            perm
        }
        Labeling::NodeRelabeling => match node_ranking {
            Some(r) => {
                let mut labels = vec![0; n];
                for (p, &id) in r.order.iter().enumerate() {
                    labels[g.index_of(id).unwrap()] = p as u32;
                }
                labels
            }
            None => first_appearance_labels(g, oriented),
        },
    }
}

// Nodes that never appear in an edge get the remaining labels in id order.
fn first_appearance_labels(g: &Graph, oriented: &[(NodeId, NodeId)]) -> Vec<u32> {
    let n = g.node_count();
    let mut labels: Vec<Option<u32>> = vec![None; n];
    let mut next = 0u32;
    for &(a, b) in oriented {
        for id in [a, b] {
            let slot = &mut labels[g.index_of(id).unwrap()];
            if slot.is_none() {
                *slot = Some(next);
                next += 1;
            }
        }
    }
    labels
        .into_iter()
        .map(|l| {
            l.unwrap_or_else(|| {
                next += 1;
                next - 1
            })
        })
        .collect()
}

pub fn render_edge_list(edges: &[(u32, u32)]) -> String {
    edges
        .iter()
        .map(|(a, b)| format!("({a}, {b})"))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Inverse of [`render_edge_list`].
pub fn parse_edge_list(text: &str) -> Result<Vec<(u32, u32)>, String> {
    let mut out = Vec::new();
    let mut rest = text.trim();
    while !rest.is_empty() {
        let body = rest
            .strip_prefix('(')
            .ok_or_else(|| format!("expected `(` at `{rest}`"))?;
        let close = body.find(')').ok_or("unterminated pair")?;
        let (pair, after) = body.split_at(close);
        let (a, b) = pair.split_once(',').ok_or_else(|| format!("malformed pair `{pair}`"))?;
        let parse = |s: &str| s.trim().parse::<u32>().map_err(|e| format!("bad node `{s}`: {e}"));
        out.push((parse(a)?, parse(b)?));
        rest = after[1..].trim_start();
        if let Some(r) = rest.strip_prefix(',') {
            rest = r.trim_start();
            if rest.is_empty() {
                return Err("trailing comma".into());
            }
        } else if !rest.is_empty() {
            return Err(format!("expected `,` at `{rest}`"));
        }
    }
    Ok(out)
}
