//! Prompt templates for the eight graph-reasoning tasks.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::PromptError;
use crate::generators::MotifKind;
use crate::graph::NodeId;
use crate::linearize::{LinearizationSpec, LinearizedGraph};
use crate::tasks::{TaskInstance, TaskKind, TaskParams};

/// Tokens charged per emitted edge.
pub const TOKENS_PER_EDGE: usize = 5;
/// Tokens charged for the task description.
pub const TASK_OVERHEAD_TOKENS: usize = 100;

const PREAMBLE: &str = "In an undirected graph, (i, j) means that node i and node j are connected with an undirected edge.";
const DEGREE_DEF: &str = "The degree of a node is the number of edges connected to the node.";
const DIAMETER_DEF: &str = "The diameter of a graph is the length of the shortest path between the most distanced nodes.";
const ASK: &str = "Given a graph G and its list of edges, respond to the following question:";

const MOTIF_DEFINITIONS: &str = include_str!("../resources/motif_definitions.txt");

/// `name: definition` for every motif kind, in catalog order.
pub fn motif_definitions() -> Vec<(MotifKind, &'static str)> {
    MOTIF_DEFINITIONS
        .lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|l| {
            let (name, def) = l.split_once(':').expect("definition line has a colon");
            (name.parse().expect("known motif name"), def.trim())
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shots {
    Zero,
    One,
}

impl fmt::Display for Shots {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Shots::Zero => "zero",
            Shots::One => "one",
        })
    }
}

impl FromStr for Shots {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "zero" | "0" | "zero-shot" => Ok(Shots::Zero),
            "one" | "1" | "one-shot" => Ok(Shots::One),
            other => Err(format!("unknown shot mode `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptRecord {
    pub record_id: String,
    pub task: TaskKind,
    pub shots: Shots,
    pub spec: LinearizationSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exemplar_ref: Option<String>,
    pub text: String,
    pub token_estimate: usize,
    /// Canonical gold answer; never part of `text`.
    pub answer: String,
}

/// The one-shot example: an instance and its linearization.
#[derive(Debug, Clone, Copy)]
pub struct Exemplar<'a> {
    pub instance: &'a TaskInstance,
    pub linearized: &'a LinearizedGraph,
}

/// Prompt-length estimate for a linearized graph.
pub fn estimate_tokens(lg: &LinearizedGraph) -> usize {
    estimate_tokens_for_edges(lg.edge_count())
}

pub fn estimate_tokens_for_edges(edges: usize) -> usize {
    TASK_OVERHEAD_TOKENS + TOKENS_PER_EDGE * edges
}

/// Largest edge count whose prompt fits a context window of `window` tokens.
pub fn edge_capacity(window: usize) -> usize {
    window.saturating_sub(TASK_OVERHEAD_TOKENS) / TOKENS_PER_EDGE
}

fn label(lg: &LinearizedGraph, id: NodeId) -> Result<u32, PromptError> {
    lg.label_of(id).ok_or(PromptError::UnlabeledNode(id))
}

/// The zero-shot question for `inst` over `lg`.
pub fn render_question(inst: &TaskInstance, lg: &LinearizedGraph) -> Result<String, PromptError> {
    let graph = lg.render();
    let pair = || match inst.params {
        TaskParams::Pair { source, target } => Ok((label(lg, source)?, label(lg, target)?)),
        _ => unreachable!("pair tasks always carry a pair"),
    };
    Ok(match inst.kind {
        TaskKind::NodeCounting => format!(
            "In an undirected graph G, (i, j) means that node i and node j are connected with an undirected edge.\n\
             Q: How many nodes are in G?\n\
             G: {graph}"
        ),
        TaskKind::MaxDegree => format!(
            "{PREAMBLE} {DEGREE_DEF} {ASK}\n\
             Q: Without any justification, what is the maximum node degree in the following graph G?\n\
             G: {graph}"
        ),
        TaskKind::NodeDegree => {
            let node = match inst.params {
                TaskParams::Node { node } => label(lg, node)?,
                _ => unreachable!("node degree always carries a node"),
            };
            format!(
                "{PREAMBLE} {DEGREE_DEF} {ASK}\n\
                 Q: Without any justification, what is the degree of node {node} in the following graph G?\n\
                 G: {graph}"
            )
        }
        TaskKind::EdgeExistence => {
            let (a, b) = pair()?;
            format!(
                "{PREAMBLE} {ASK}\n\
                 Q: Does an undirected edge ({a}, {b}) exist in the following graph G?.\n\
                 G: {graph}"
            )
        }
        TaskKind::Diameter => format!(
            "{PREAMBLE} {DIAMETER_DEF} {ASK}\n\
             Q: Without any justification, what is the diameter of the following graph G?\n\
             G: {graph}"
        ),
        TaskKind::ShortestPath => {
            let (a, b) = pair()?;
            format!(
                "{PREAMBLE} {ASK}\n\
                 Q: Without any justification, what is the length of the shortest path from node {a} to node {b}? If no path exists, the response is '0'.\n\
                 G: {graph}"
            )
        }
        TaskKind::PathExistence => {
            let (a, b) = pair()?;
            format!(
                "{PREAMBLE} {ASK}\n\
                 Q: Does a path that connects node {a} and {b} exist in the following graph G?\n\
                 G: {graph}"
            )
        }
        TaskKind::MotifShape => {
            let defs = motif_definitions()
                .into_iter()
                .map(|(k, d)| format!("{}: {d}", k.name()))
                .collect::<Vec<_>>()
                .join(" ");
            format!(
                "{PREAMBLE} The graph contains a motif graph with strictly one of the following structures. {defs}\n\
                 Q: Which of the defined structures is included in the following graph?\n\
                 graph: {graph}"
            )
        }
    })
}

/// Renders a zero- or one-shot prompt.
pub fn render_prompt(
    inst: &TaskInstance,
    lg: &LinearizedGraph,
    shots: Shots,
    exemplar: Option<Exemplar<'_>>,
) -> Result<PromptRecord, PromptError> {
    let question = render_question(inst, lg)?;
    let (text, token_estimate, exemplar_ref) = match (shots, exemplar) {
        (Shots::Zero, None) => (question, estimate_tokens(lg), None),
        (Shots::Zero, Some(_)) => return Err(PromptError::UnexpectedExemplar),
        (Shots::One, None) => return Err(PromptError::MissingExemplar),
        (Shots::One, Some(ex)) => {
            if ex.instance.kind != inst.kind {
                return Err(PromptError::KindMismatch {
                    instance: inst.kind,
                    exemplar: ex.instance.kind,
                });
            }
            if ex.instance.record_id == inst.record_id {
                return Err(PromptError::ExemplarIsQuery);
            }
            let shown = render_question(ex.instance, ex.linearized)?;
            let text = format!(
                "Example:\n{shown}\nAnswer: {}\n\n{question}",
                ex.instance.truth.canonical()
            );
            (
                text,
                estimate_tokens(lg) + estimate_tokens(ex.linearized),
                Some(ex.instance.record_id.clone()),
            )
        }
    };
    Ok(PromptRecord {
        record_id: inst.record_id.clone(),
        task: inst.kind,
        shots,
        spec: lg.spec,
        exemplar_ref,
        text,
        token_estimate,
        answer: inst.truth.canonical(),
    })
}
