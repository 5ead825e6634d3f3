use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GatewayError {
    #[error("prompt needs {needed} tokens but the context window holds {window}")]
    ContextOverflow { needed: usize, window: usize },
    #[error("transport: {0}")]
    Transport(String),
    #[error("rate limited after {attempts} attempts")]
    RateLimited { attempts: u32 },
    #[error("environment variable {0} with the API key is not set")]
    AuthMissing(String),
    #[error("endpoint answered HTTP {status}: {body}")]
    Status { status: u16, body: String },
    #[error("could not decode response: {0}")]
    Decode(String),
    #[error("cache: {0}")]
    Cache(String),
}

impl GatewayError {
    /// Worth another attempt with the same request.
    pub fn is_transient(&self) -> bool {
        match self {
            GatewayError::Transport(_) | GatewayError::RateLimited { .. } => true,
            GatewayError::Status { status, .. } => *status >= 500,
            _ => false,
        }
    }
}
