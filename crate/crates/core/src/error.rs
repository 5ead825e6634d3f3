use thiserror::Error;

use crate::graph::NodeId;
use crate::tasks::TaskKind;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("self-loop on node {0}")]
    SelfLoop(NodeId),
    #[error("edge endpoint {0} is not a listed node")]
    UnknownEndpoint(NodeId),
    #[error("node {0} is not in the graph")]
    UnknownNode(NodeId),
    #[error("graph has no edges")]
    EmptyGraph,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinearizeError {
    #[error("invalid linearization spec: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeneratorError {
    #[error("unknown motif shape `{0}`")]
    UnknownShape(String),
    #[error("motif size {size} out of range for {kind}")]
    SizeOutOfRange { kind: &'static str, size: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TaskError {
    #[error("task {0:?} is not defined for this record")]
    InvalidKindForSource(TaskKind),
    #[error("graph has too few nodes for task {0:?}")]
    TooFewNodes(TaskKind),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PromptError {
    #[error("one-shot prompt requested without an exemplar")]
    MissingExemplar,
    #[error("exemplar given for a zero-shot prompt")]
    UnexpectedExemplar,
    #[error("instance is {instance:?} but exemplar is {exemplar:?}")]
    KindMismatch { instance: TaskKind, exemplar: TaskKind },
    #[error("exemplar graph must differ from the query graph")]
    ExemplarIsQuery,
    #[error("query node {0} has no label in the linearization")]
    UnlabeledNode(NodeId),
}

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("no records to score")]
    EmptyInput,
    #[error("model failed on {failed} of {total} prompts in cell {cell}: {first}")]
    Model {
        cell: String,
        failed: usize,
        total: usize,
        first: String,
    },
    #[error(transparent)]
    Linearize(#[from] LinearizeError),
    #[error(transparent)]
    Prompt(#[from] PromptError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("malformed results file: {0}")]
    Malformed(String),
}
