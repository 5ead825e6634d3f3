//! Edge-list linearization of graphs for prompting language models.
//!
//! A [`Graph`] is turned into a [`LinearizedGraph`]: an ordered list of edges
//! over relabeled nodes, ready to be placed in a prompt. Orderings come from
//! node importance ([`Measure`]), optionally lifted to the line graph.
//!
//! ```
//! use graphlin::{linearize, Graph, Labeling, LinearizationSpec, Measure, Method};
//!
//! let star = Graph::from_edges(4, [(0, 1), (0, 2), (0, 3)]).unwrap();
//! let spec = LinearizationSpec::new(Method::new(Measure::Degree.into(), false), Labeling::NodeRelabeling, 0);
//! let lin = linearize(&star, &spec).unwrap();
//! assert_eq!(lin.label_of(0), Some(0));
//! assert!(lin.render().starts_with("(0, "));
//! ```

pub mod error;
pub mod eval;
pub mod generators;
pub mod graph;
pub mod linearize;
pub mod measures;
pub mod prompt;
pub mod report;
pub mod rng;
pub mod tasks;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/graphs.md")]
    mod graphs {}
    #[doc = include_str!("../../../book/src/linearization.md")]
    mod linearization {}
    #[doc = include_str!("../../../book/src/datasets.md")]
    mod datasets {}
    #[doc = include_str!("../../../book/src/tasks.md")]
    mod tasks {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}

pub use error::{EvalError, GeneratorError, GraphError, LinearizeError, PromptError, TaskError};
pub use eval::{exact_accuracy, parse_answer, run_matrix, EvalRecord, MatrixPlan, Model, ModelResponse, ParsedAnswer};
pub use generators::{DatasetKind, GraphRecord, MotifKind, Source};
pub use graph::{EdgePair, Graph, LineGraph, NodeId};
pub use linearize::{linearize, random_baseline, EdgeOrdering, Labeling, LinearizationSpec, LinearizedGraph, Method};
pub use measures::{core_numbers, degree_centrality, pagerank, rank_nodes, Measure, NodeRanking, PageRankParams};
pub use prompt::{edge_capacity, render_prompt, Exemplar, PromptRecord, Shots};
pub use report::{CellResult, ResultsTable};
pub use tasks::{Answer, TaskInstance, TaskKind, TaskParams};
