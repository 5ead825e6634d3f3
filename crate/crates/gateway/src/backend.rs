use std::thread;
use std::time::Duration;

use graphlin::{MotifKind, PromptRecord};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::config::ModelConfig;
use crate::error::GatewayError;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Completion {
    pub text: String,
    pub prompt_tokens: Option<u64>,
    pub completion_tokens: Option<u64>,
}

impl Completion {
    pub fn text(text: impl Into<String>) -> Self {
        Self {
            text: text.into(),
            ..Self::default()
        }
    }
}

/// Something that turns one prompt into one completion.
pub trait Backend: Send + Sync {
    /// Identifier used in reports and cache keys.
    fn id(&self) -> String;

    /// Whether calls leave the process; local mocks skip the response cache.
    fn is_remote(&self) -> bool {
        false
    }

    fn complete(&self, prompt: &PromptRecord, max_tokens: usize) -> Result<Completion, GatewayError>;
}

impl<B: Backend + ?Sized> Backend for Box<B> {
    fn id(&self) -> String {
        (**self).id()
    }
    fn is_remote(&self) -> bool {
        (**self).is_remote()
    }
    fn complete(&self, prompt: &PromptRecord, max_tokens: usize) -> Result<Completion, GatewayError> {
        (**self).complete(prompt, max_tokens)
    }
}

/// Answers every prompt with its gold answer.
#[derive(Debug, Clone, Copy, Default)]
pub struct PerfectOracle;

impl Backend for PerfectOracle {
    fn id(&self) -> String {
        "mock:oracle".into()
    }
    fn complete(&self, prompt: &PromptRecord, _: usize) -> Result<Completion, GatewayError> {
        Ok(Completion::text(prompt.answer.clone()))
    }
}

/// Answers every prompt with the same text.
#[derive(Debug, Clone)]
pub struct Constant(pub String);

impl Backend for Constant {
    fn id(&self) -> String {
        format!("mock:constant:{}", self.0)
    }
    fn complete(&self, _: &PromptRecord, _: usize) -> Result<Completion, GatewayError> {
        Ok(Completion::text(self.0.clone()))
    }
}

/// A well-formed but uninformed answer, fixed per `(seed, prompt)`.
#[derive(Debug, Clone, Copy)]
pub struct UniformRandomAnswer {
    pub seed: u64,
}

impl Backend for UniformRandomAnswer {
    fn id(&self) -> String {
        format!("mock:random:{}", self.seed)
    }
    fn complete(&self, prompt: &PromptRecord, _: usize) -> Result<Completion, GatewayError> {
        let mut h = Sha256::new();
        h.update(self.seed.to_le_bytes());
        h.update(prompt.text.as_bytes());
        let mut rng = ChaCha8Rng::from_seed(h.finalize().into());
        let text = if prompt.task.is_existence() {
            if rng.gen_bool(0.5) { "yes" } else { "no" }.to_string()
        } else if prompt.task == graphlin::TaskKind::MotifShape {
            MotifKind::ALL[rng.gen_range(0..MotifKind::ALL.len())].name().to_string()
        } else {
            rng.gen_range(0..=20u32).to_string()
        };
        Ok(Completion::text(text))
    }
}

/// OpenAI-style chat-completions endpoint.
#[derive(Debug, Clone)]
pub struct HttpBackend {
    config: ModelConfig,
    client: reqwest::blocking::Client,
    api_key: Option<String>,
}

#[derive(Deserialize)]
struct ChatResponse {
    choices: Vec<Choice>,
    #[serde(default)]
    usage: Option<Usage>,
}

#[derive(Deserialize)]
struct Choice {
    message: Message,
}

#[derive(Deserialize)]
struct Message {
    #[serde(default)]
    content: Option<String>,
}

#[derive(Deserialize)]
struct Usage {
    prompt_tokens: Option<u64>,
    completion_tokens: Option<u64>,
}

impl HttpBackend {
    /// Reads the API key from `config.api_key_env` when one is named.
    pub fn new(config: ModelConfig) -> Result<Self, GatewayError> {
        let api_key = match &config.api_key_env {
            Some(var) => Some(std::env::var(var).map_err(|_| GatewayError::AuthMissing(var.clone()))?),
            None => None,
        };
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(config.timeout_secs))
            .build()
            .map_err(|e| GatewayError::Transport(e.to_string()))?;
        Ok(Self { config, client, api_key })
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    fn attempt(&self, body: &serde_json::Value) -> Result<Completion, GatewayError> {
        let mut req = self.client.post(&self.config.endpoint).json(body);
        if let Some(key) = &self.api_key {
            req = req.bearer_auth(key);
        }
        let resp = req.send().map_err(|e| GatewayError::Transport(e.to_string()))?;
        let status = resp.status().as_u16();
        if status == 429 {
            return Err(GatewayError::RateLimited { attempts: 1 });
        }
        let text = resp.text().map_err(|e| GatewayError::Transport(e.to_string()))?;
        if !(200..300).contains(&status) {
            return Err(GatewayError::Status { status, body: text });
        }
        let parsed: ChatResponse = serde_json::from_str(&text).map_err(|e| GatewayError::Decode(e.to_string()))?;
        let choice = parsed
            .choices
            .into_iter()
            .next()
            .ok_or_else(|| GatewayError::Decode("no choices".into()))?;
        Ok(Completion {
            text: choice.message.content.unwrap_or_default(),
            prompt_tokens: parsed.usage.as_ref().and_then(|u| u.prompt_tokens),
            completion_tokens: parsed.usage.as_ref().and_then(|u| u.completion_tokens),
        })
    }
}

impl Backend for HttpBackend {
    fn id(&self) -> String {
        self.config.model.clone()
    }

    fn is_remote(&self) -> bool {
        true
    }

    /// Retries transport failures, 429 and 5xx with exponential backoff.
    fn complete(&self, prompt: &PromptRecord, max_tokens: usize) -> Result<Completion, GatewayError> {
        let mut body = json!({
            "model": self.config.model,
            "messages": [{"role": "user", "content": prompt.text}],
            "temperature": self.config.temperature,
            "top_p": self.config.top_p,
            "max_tokens": max_tokens,
        });
        if let Some(k) = self.config.top_k {
            body["top_k"] = json!(k);
        }
        let retry = &self.config.retry;
        let mut attempt = 0;
        loop {
            match self.attempt(&body) {
                Err(e) if e.is_transient() && attempt < retry.max_retries => {
                    thread::sleep(retry.backoff(attempt));
                    attempt += 1;
                }
                Err(GatewayError::RateLimited { .. }) => {
                    return Err(GatewayError::RateLimited { attempts: attempt + 1 })
                }
                other => return other,
            }
        }
    }
}
