//! Model access for graphlin evaluations.
//!
//! A [`Gateway`] wraps a [`Backend`] (an HTTP chat-completions endpoint or a
//! deterministic mock) and implements [`graphlin::Model`]: requests run on a
//! bounded thread pool, results come back in input order, and remote
//! responses can be replayed from a JSONL [`ResponseCache`].

pub mod backend;
pub mod cache;
pub mod config;
pub mod error;
pub mod gateway;

// the evaluation chapter needs both crates, so its snippets run here
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/evaluation.md")]
mod book_evaluation {}

pub use backend::{Backend, Completion, Constant, HttpBackend, PerfectOracle, UniformRandomAnswer};
pub use cache::{cache_key, ResponseCache};
pub use config::{default_budget, ModelConfig, RetryPolicy};
pub use error::GatewayError;
pub use gateway::{backend_from_name, Gateway, GatewayStats};
