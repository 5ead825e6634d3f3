use std::collections::BTreeMap;
use std::time::Duration;

use graphlin::TaskKind;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RetryPolicy {
    /// Retries after the first attempt.
    pub max_retries: u32,
    pub initial_backoff_ms: u64,
    pub multiplier: f64,
    pub max_backoff_ms: u64,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        Self {
            max_retries: 4,
            initial_backoff_ms: 500,
            multiplier: 2.0,
            max_backoff_ms: 30_000,
        }
    }
}

impl RetryPolicy {
    /// Sleep before retry number `attempt` (0-based).
    pub fn backoff(&self, attempt: u32) -> Duration {
        let ms = self.initial_backoff_ms as f64 * self.multiplier.powi(attempt as i32);
        Duration::from_millis(ms.min(self.max_backoff_ms as f64) as u64)
    }
}

/// Completion-token budget per task: 16 for short answers, 128 where
/// responses tend to reason before answering.
pub fn default_budget(task: TaskKind) -> usize {
    match task {
        TaskKind::NodeCounting | TaskKind::MaxDegree | TaskKind::NodeDegree | TaskKind::MotifShape => 16,
        TaskKind::EdgeExistence | TaskKind::Diameter | TaskKind::ShortestPath | TaskKind::PathExistence => 128,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ModelConfig {
    /// Chat-completions URL, e.g. `http://localhost:8000/v1/chat/completions`.
    pub endpoint: String,
    pub model: String,
    pub temperature: f64,
    pub top_p: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub top_k: Option<u32>,
    /// Per-task replacements for [`default_budget`].
    pub budgets: BTreeMap<TaskKind, usize>,
    pub timeout_secs: u64,
    pub retry: RetryPolicy,
    /// Maximum concurrent requests.
    pub parallelism: usize,
    pub context_window: usize,
    /// Environment variable holding the bearer token. Keys never live in config files.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub api_key_env: Option<String>,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            endpoint: "http://localhost:8000/v1/chat/completions".into(),
            model: "local".into(),
            temperature: 1e-3,
            top_p: 0.1,
            top_k: None,
            budgets: BTreeMap::new(),
            timeout_secs: 120,
            retry: RetryPolicy::default(),
            parallelism: 8,
            context_window: 8192,
            api_key_env: None,
        }
    }
}

impl ModelConfig {
    pub fn budget_for(&self, task: TaskKind) -> usize {
        self.budgets.get(&task).copied().unwrap_or_else(|| default_budget(task))
    }

    pub fn validate(&self) -> Result<(), String> {
        if !(self.temperature >= 0.0) {
            return Err(format!("temperature must be non-negative, got {}", self.temperature));
        }
        if !(self.top_p > 0.0 && self.top_p <= 1.0) {
            return Err(format!("top_p must lie in (0, 1], got {}", self.top_p));
        }
        if self.parallelism == 0 {
            return Err("parallelism must be at least 1".into());
        }
        Ok(())
    }
}
