//! Task instances and their ground truth.
//!
//! Query parameters are drawn once, when a dataset is generated, so every
//! linearization method is asked the identical question about each graph.
//! Parameters always refer to original node ids; prompts translate them
//! through the label map.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::TaskError;
use crate::generators::{GraphRecord, MotifKind};
use crate::graph::{Graph, NodeId};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TaskKind {
    NodeCounting,
    MaxDegree,
    NodeDegree,
    EdgeExistence,
    Diameter,
    ShortestPath,
    PathExistence,
    MotifShape,
}

impl TaskKind {
    pub const ALL: [TaskKind; 8] = [
        TaskKind::NodeCounting,
        TaskKind::MaxDegree,
        TaskKind::NodeDegree,
        TaskKind::EdgeExistence,
        TaskKind::Diameter,
        TaskKind::ShortestPath,
        TaskKind::PathExistence,
        TaskKind::MotifShape,
    ];

    pub fn tag(&self) -> &'static str {
        match self {
            TaskKind::NodeCounting => "node-counting",
            TaskKind::MaxDegree => "max-degree",
            TaskKind::NodeDegree => "node-degree",
            TaskKind::EdgeExistence => "edge-existence",
            TaskKind::Diameter => "diameter",
            TaskKind::ShortestPath => "shortest-path",
            TaskKind::PathExistence => "path-existence",
            TaskKind::MotifShape => "motif-shape",
        }
    }

    pub fn title(&self) -> &'static str {
        match self {
            TaskKind::NodeCounting => "Node Counting",
            TaskKind::MaxDegree => "Max Degree",
            TaskKind::NodeDegree => "Node Degree",
            TaskKind::EdgeExistence => "Edge Existence",
            TaskKind::Diameter => "Diameter",
            TaskKind::ShortestPath => "Shortest Path",
            TaskKind::PathExistence => "Path Existence",
            TaskKind::MotifShape => "Motifs' Shape",
        }
    }

    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            TaskKind::NodeCounting | TaskKind::MaxDegree | TaskKind::NodeDegree | TaskKind::Diameter | TaskKind::ShortestPath
        )
    }

    pub fn is_existence(&self) -> bool {
        matches!(self, TaskKind::EdgeExistence | TaskKind::PathExistence)
    }

    /// Tasks defined for a record; motif classification needs GraphWave motifs.
    pub fn applicable(rec: &GraphRecord) -> Vec<TaskKind> {
        TaskKind::ALL
            .into_iter()
            .filter(|k| *k != TaskKind::MotifShape || rec.is_graphwave())
            .collect()
    }
}

impl fmt::Display for TaskKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for TaskKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.trim().to_ascii_lowercase().replace(['_', ' '], "-");
        TaskKind::ALL
            .into_iter()
            .find(|k| k.tag() == norm || k.title().to_ascii_lowercase().replace(' ', "-") == norm)
            .ok_or_else(|| format!("unknown task `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum TaskParams {
    None,
    Node { node: NodeId },
    Pair { source: NodeId, target: NodeId },
}

/// Ground truth. Motif truth holds every kind present; any of them is accepted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Answer {
    Count(u64),
    YesNo(bool),
    Shapes(Vec<MotifKind>),
}

impl Answer {
    /// Canonical answer text, as used for one-shot exemplars.
    pub fn canonical(&self) -> String {
        match self {
            Answer::Count(c) => c.to_string(),
            Answer::YesNo(true) => "yes".into(),
            Answer::YesNo(false) => "no".into(),
            Answer::Shapes(s) => s.first().map(|k| k.name().to_string()).unwrap_or_default(),
        }
    }
}

impl fmt::Display for Answer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskInstance {
    pub record_id: String,
    pub kind: TaskKind,
    pub params: TaskParams,
    pub truth: Answer,
    /// Set when the requested polarity was impossible (e.g. no non-edge in a complete graph).
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub forced: bool,
}

/// Draws query parameters for `kind` on `rec` and computes the truth.
///
/// Existence tasks flip a seeded coin for the wanted polarity, so a dataset
/// comes out close to half positive, half negative.
pub fn make_instance(rec: &GraphRecord, kind: TaskKind, seed: u64) -> Result<TaskInstance, TaskError> {
    if !TaskKind::applicable(rec).contains(&kind) {
        return Err(TaskError::InvalidKindForSource(kind));
    }
    let g = &rec.graph;
    let mut r = rng::stream(seed, g.canonical_hash(), &format!("task/{}/{}", kind.tag(), rec.id));
    let mut forced = false;
    let params = match kind {
        TaskKind::NodeCounting | TaskKind::MaxDegree | TaskKind::Diameter | TaskKind::MotifShape => TaskParams::None,
        TaskKind::NodeDegree => {
            if g.node_count() == 0 {
                return Err(TaskError::TooFewNodes(kind));
            }
            TaskParams::Node {
                node: g.id_at(r.gen_range(0..g.node_count())),
            }
        }
        TaskKind::ShortestPath => {
            let (s, t) = distinct_pair(g, &mut r).ok_or(TaskError::TooFewNodes(kind))?;
            TaskParams::Pair { source: s, target: t }
        }
        TaskKind::EdgeExistence | TaskKind::PathExistence => {
            if g.node_count() < 2 {
                return Err(TaskError::TooFewNodes(kind));
            }
            let want_positive = r.gen::<bool>();
            let sampled = if kind == TaskKind::EdgeExistence {
                edge_query(g, want_positive, &mut r)
            } else {
                path_query(g, want_positive, &mut r)
            };
            let (s, t) = match sampled {
                Some(p) => p,
                None => {
                    forced = true;
                    let alt = if kind == TaskKind::EdgeExistence {
                        edge_query(g, !want_positive, &mut r)
                    } else {
                        path_query(g, !want_positive, &mut r)
                    };
                    alt.ok_or(TaskError::TooFewNodes(kind))?
                }
            };
            TaskParams::Pair { source: s, target: t }
        }
    };
    let truth = compute_truth(kind, &params, rec)?;
    Ok(TaskInstance {
        record_id: rec.id.clone(),
        kind,
        params,
        truth,
        forced,
    })
}

fn distinct_pair(g: &Graph, r: &mut ChaCha8Rng) -> Option<(NodeId, NodeId)> {
    let n = g.node_count();
    if n < 2 {
        return None;
    }
    let a = r.gen_range(0..n);
    let mut b = r.gen_range(0..n - 1);
    if b >= a {
        b += 1;
    }
    Some((g.id_at(a), g.id_at(b)))
}

fn edge_query(g: &Graph, positive: bool, r: &mut ChaCha8Rng) -> Option<(NodeId, NodeId)> {
    if positive {
        let e = g.edges().choose(r)?;
        return Some(if r.gen::<bool>() { (e.u(), e.v()) } else { (e.v(), e.u()) });
    }
    let n = g.node_count();
    if g.edge_count() >= n * (n - 1) / 2 {
        return None;
    }
    loop {
        let (a, b) = distinct_pair(g, r)?;
        if !g.has_edge(a, b).ok()? {
            return Some((a, b));
        }
    }
}

fn path_query(g: &Graph, positive: bool, r: &mut ChaCha8Rng) -> Option<(NodeId, NodeId)> {
    let comp = g.components();
    let n = g.node_count();
    let candidates: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (0..n).map(move |b| (a, b)))
        .filter(|&(a, b)| a != b && (comp[a] == comp[b]) == positive)
        .collect();
    candidates.choose(r).map(|&(a, b)| (g.id_at(a), g.id_at(b)))
}

/// Recomputes the truth of `kind` with `params` from scratch.
pub fn compute_truth(kind: TaskKind, params: &TaskParams, rec: &GraphRecord) -> Result<Answer, TaskError> {
    let g = &rec.graph;
    let pair = || match *params {
        TaskParams::Pair { source, target } => Ok((source, target)),
        _ => Err(TaskError::InvalidKindForSource(kind)),
    };
    Ok(match kind {
        TaskKind::NodeCounting => Answer::Count(g.node_count() as u64),
        TaskKind::MaxDegree => Answer::Count(g.max_degree() as u64),
        TaskKind::NodeDegree => match *params {
            TaskParams::Node { node } => Answer::Count(g.degree(node)? as u64),
            _ => return Err(TaskError::InvalidKindForSource(kind)),
        },
        TaskKind::Diameter => Answer::Count(g.diameter() as u64),
        TaskKind::EdgeExistence => {
            let (s, t) = pair()?;
            Answer::YesNo(g.has_edge(s, t)?)
        }
        TaskKind::PathExistence => {
            let (s, t) = pair()?;
            Answer::YesNo(g.shortest_path_len(s, t)?.is_some())
        }
        TaskKind::ShortestPath => {
            let (s, t) = pair()?;
            Answer::Count(g.shortest_path_len(s, t)?.unwrap_or(0) as u64)
        }
        TaskKind::MotifShape => {
            if !rec.is_graphwave() {
                return Err(TaskError::InvalidKindForSource(kind));
            }
            Answer::Shapes(rec.motif_shapes.clone())
        }
    })
}

/// True when the stored truth matches a fresh recomputation on `rec`.
pub fn verify_instance(inst: &TaskInstance, rec: &GraphRecord) -> bool {
    inst.record_id == rec.id && compute_truth(inst.kind, &inst.params, rec).is_ok_and(|t| t == inst.truth)
}

/// Attaches one instance per applicable task to every record.
pub fn attach_instances(records: &mut [GraphRecord], seed: u64) -> Result<(), TaskError> {
    for rec in records.iter_mut() {
        rec.instances = TaskKind::applicable(rec)
            .into_iter()
            .map(|k| make_instance(rec, k, seed))
            .collect::<Result<_, _>>()?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::Source;

    fn record(g: Graph) -> GraphRecord {
        GraphRecord {
            id: "t".into(),
            source: Source::Path { n: g.node_count() },
            default_edge_order: g.edges().iter().map(|e| (e.u(), e.v())).collect(),
            graph: g,
            motif_shapes: vec![],
            exemplar: false,
            instances: vec![],
        }
    }

    fn complete(n: u32) -> Graph {
        Graph::from_edges(n as usize, (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)))).unwrap()
    }

    #[test]
    fn max_degree_of_k5() {
        let inst = make_instance(&record(complete(5)), TaskKind::MaxDegree, 0).unwrap();
        assert_eq!(inst.truth, Answer::Count(4));
    }

    #[test]
    fn star_non_edge() {
        let rec = record(Graph::new([0, 1, 2, 3], [(1, 0), (2, 1), (1, 3)]).unwrap());
        let t = compute_truth(TaskKind::EdgeExistence, &TaskParams::Pair { source: 0, target: 2 }, &rec).unwrap();
        assert_eq!(t, Answer::YesNo(false));
    }

    #[test]
    fn complete_graph_edge_queries_are_forced_positive() {
        let rec = record(complete(6));
        for seed in 0..20 {
            let inst = make_instance(&rec, TaskKind::EdgeExistence, seed).unwrap();
            assert_eq!(inst.truth, Answer::YesNo(true));
        }
        let forced = (0..40)
            .filter(|&s| make_instance(&rec, TaskKind::EdgeExistence, s).unwrap().forced)
            .count();
        assert!(forced > 0);
    }

    #[test]
    fn shortest_path_zero_when_unreachable() {
        let rec = record(Graph::from_edges(4, [(0, 1), (2, 3)]).unwrap());
        let t = compute_truth(TaskKind::ShortestPath, &TaskParams::Pair { source: 0, target: 3 }, &rec).unwrap();
        assert_eq!(t, Answer::Count(0));
    }

    #[test]
    fn motif_task_rejected_outside_graphwave() {
        let rec = record(complete(4));
        assert_eq!(
            make_instance(&rec, TaskKind::MotifShape, 0),
            Err(TaskError::InvalidKindForSource(TaskKind::MotifShape))
        );
    }

    #[test]
    fn verify_detects_mutation() {
        let rec = record(complete(5));
        let mut inst = make_instance(&rec, TaskKind::NodeCounting, 0).unwrap();
        assert!(verify_instance(&inst, &rec));
        inst.truth = Answer::Count(6);
        assert!(!verify_instance(&inst, &rec));
    }

    #[test]
    fn task_names_parse() {
        for k in TaskKind::ALL {
            assert_eq!(k.tag().parse::<TaskKind>().unwrap(), k);
        }
        assert_eq!("Node Degree".parse::<TaskKind>().unwrap(), TaskKind::NodeDegree);
    }
}
