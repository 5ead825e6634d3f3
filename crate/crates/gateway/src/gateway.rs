use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Instant;

use graphlin::{Model, ModelResponse, PromptRecord};
use rayon::prelude::*;

use crate::backend::{Backend, Completion, Constant, HttpBackend, PerfectOracle, UniformRandomAnswer};
use crate::cache::{cache_key, ResponseCache};
use crate::config::ModelConfig;
use crate::error::GatewayError;

#[derive(Debug, Default)]
pub struct GatewayStats {
    pub in_flight: AtomicUsize,
    pub max_in_flight: AtomicUsize,
    /// Backend calls made, cache hits excluded.
    pub backend_calls: AtomicUsize,
    pub cache_hits: AtomicUsize,
}

/// Bounded-concurrency front end to a [`Backend`] with an optional response cache.
pub struct Gateway<B> {
    backend: B,
    config: ModelConfig,
    pool: rayon::ThreadPool,
    cache: Option<ResponseCache>,
    stats: GatewayStats,
}

impl<B: Backend> Gateway<B> {
    pub fn new(backend: B, config: ModelConfig) -> Result<Self, GatewayError> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.parallelism.max(1))
            .thread_name(|i| format!("gateway-{i}"))
            .build()
            .map_err(|e| GatewayError::Transport(e.to_string()))?;
        Ok(Self {
            backend,
            config,
            pool,
            cache: None,
            stats: GatewayStats::default(),
        })
    }

    pub fn with_cache(mut self, cache: ResponseCache) -> Self {
        self.cache = Some(cache);
        self
    }

    pub fn stats(&self) -> &GatewayStats {
        &self.stats
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    fn decoding_tag(&self, max_tokens: usize) -> String {
        format!(
            "t={:?};p={:?};k={:?};max={max_tokens}",
            self.config.temperature, self.config.top_p, self.config.top_k
        )
    }

    /// One prompt, refusing anything that cannot fit the context window.
    pub fn complete_one(&self, prompt: &PromptRecord) -> Result<ModelResponse, GatewayError> {
        let budget = self.config.budget_for(prompt.task);
        let needed = prompt.token_estimate + budget;
        if needed > self.config.context_window {
            return Err(GatewayError::ContextOverflow {
                needed,
                window: self.config.context_window,
            });
        }
        let start = Instant::now();
        let key = self
            .cache
            .as_ref()
            .map(|_| cache_key(&self.backend.id(), &prompt.text, &self.decoding_tag(budget)));
        if let (Some(cache), Some(key)) = (&self.cache, &key) {
            if let Some(text) = cache.get(key) {
                self.stats.cache_hits.fetch_add(1, Ordering::Relaxed);
                return Ok(ModelResponse {
                    text,
                    latency_ms: start.elapsed().as_millis() as u64,
                    prompt_tokens: None,
                    completion_tokens: None,
                    cached: true,
                });
            }
        }

        let now = self.stats.in_flight.fetch_add(1, Ordering::SeqCst) + 1;
        self.stats.max_in_flight.fetch_max(now, Ordering::SeqCst);
        self.stats.backend_calls.fetch_add(1, Ordering::Relaxed);
        let result = self.backend.complete(prompt, budget);
        self.stats.in_flight.fetch_sub(1, Ordering::SeqCst);
        let Completion {
            text,
            prompt_tokens,
            completion_tokens,
        } = result?;

        if let (Some(cache), Some(key)) = (&self.cache, key) {
            cache.insert(key, text.clone())?;
        }
        Ok(ModelResponse {
            text,
            latency_ms: start.elapsed().as_millis() as u64,
            prompt_tokens,
            completion_tokens,
            cached: false,
        })
    }
}

impl<B: Backend> Model for Gateway<B> {
    type Error = GatewayError;

    fn name(&self) -> String {
        self.backend.id()
    }

    fn complete_all(&self, prompts: &[PromptRecord]) -> Vec<Result<ModelResponse, GatewayError>> {
        self.pool
            .install(|| prompts.par_iter().map(|p| self.complete_one(p)).collect())
    }
}

/// Builds a backend from a name: `mock:oracle`, `mock:random[:seed]`,
/// `mock:constant:<text>`, or anything else for the HTTP endpoint in
/// `config` (a name other than `http` replaces `config.model`).
pub fn backend_from_name(name: &str, config: &ModelConfig) -> Result<Box<dyn Backend>, GatewayError> {
    if let Some(rest) = name.strip_prefix("mock:") {
        let (kind, arg) = rest.split_once(':').unwrap_or((rest, ""));
        return match kind {
            "oracle" => Ok(Box::new(PerfectOracle)),
            "constant" => Ok(Box::new(Constant(arg.to_string()))),
            "random" => Ok(Box::new(UniformRandomAnswer {
                seed: if arg.is_empty() {
                    0
                } else {
                    arg.parse().map_err(|_| GatewayError::Decode(format!("bad mock seed `{arg}`")))?
                },
            })),
            other => Err(GatewayError::Decode(format!("unknown mock model `{other}`"))),
        };
    }
    let mut config = config.clone();
    if name != "http" {
        config.model = name.to_string();
    }
    Ok(Box::new(HttpBackend::new(config)?))
}
