//! Chat-completion endpoint client with retry/backoff.

use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{Optimizer, OptimizerError};

/// Connection settings for an OpenAI-compatible chat-completions endpoint.
/// The credential is read from the environment variable named by
/// `api_key_env`; an empty name skips authentication (local endpoints).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EndpointConfig {
    pub base_url: String,
    pub model: String,
    #[serde(default)]
    pub api_key_env: String,
    #[serde(default = "default_temperature")]
    pub temperature: f64,
    #[serde(default = "default_max_tokens")]
    pub max_tokens: u32,
    #[serde(default = "default_request_timeout_s")]
    pub request_timeout_s: u64,
    #[serde(default = "default_retries")]
    pub retries: u32,
}

fn default_temperature() -> f64 {
    0.6
}
fn default_max_tokens() -> u32 {
    4096
}
fn default_request_timeout_s() -> u64 {
    120
}
fn default_retries() -> u32 {
    3
}

/// One chat completion: sends (system, user) messages and returns the
/// assistant text. Transient transport failures are retried with backoff up
/// to `cfg.retries` attempts; authentication failures are not retried.
pub fn llm_complete(
    cfg: &EndpointConfig,
    system_prompt: &str,
    user_prompt: &str,
) -> Result<String, OptimizerError> {
    let url = format!(
        "{}/v1/chat/completions",
        cfg.base_url.trim_end_matches('/')
    );
    let api_key = if cfg.api_key_env.is_empty() {
        None
    } else {
        Some(std::env::var(&cfg.api_key_env).map_err(|_| {
            OptimizerError::Auth(format!("credential variable `{}` is not set", cfg.api_key_env))
        })?)
    };
    let body = json!({
        "model": cfg.model,
        "messages": [
            {"role": "system", "content": system_prompt},
            {"role": "user", "content": user_prompt},
        ],
        "temperature": cfg.temperature,
        "max_tokens": cfg.max_tokens,
    });

    let agent: ureq::Agent = ureq::Agent::config_builder()
        .timeout_global(Some(Duration::from_secs(cfg.request_timeout_s)))
        .build()
        .into();

    let attempts = cfg.retries.max(1);
    let mut last_err = OptimizerError::Transport("no attempts made".into());
    for attempt in 0..attempts {
        if attempt > 0 {
            std::thread::sleep(Duration::from_millis(250 * (1 << attempt.min(4))));
        }
        let mut request = agent.post(&url);
        if let Some(key) = &api_key {
            request = request.header("authorization", &format!("Bearer {key}"));
        }
        match request.send_json(&body) {
            Ok(mut response) => {
                let value: serde_json::Value = response.body_mut().read_json().map_err(|e| {
                    OptimizerError::Transport(format!("cannot decode completion body: {e}"))
                })?;
                let text = value["choices"][0]["message"]["content"]
                    .as_str()
                    .unwrap_or("")
                    .to_string();
                if text.is_empty() {
                    return Err(OptimizerError::EmptyCompletion);
                }
                return Ok(text);
            }
            Err(ureq::Error::StatusCode(code)) if code == 401 || code == 403 => {
                return Err(OptimizerError::Auth(format!("endpoint returned HTTP {code}")));
            }
            Err(err) => {
                last_err = OptimizerError::Transport(err.to_string());
            }
        }
    }
    Err(last_err)
}

/// An [`Optimizer`] backed by a live endpoint.
#[derive(Debug, Clone)]
pub struct LlmOptimizer {
    pub config: EndpointConfig,
}

impl LlmOptimizer {
    pub fn new(config: EndpointConfig) -> Self {
        LlmOptimizer { config }
    }
}

impl Optimizer for LlmOptimizer {
    fn complete(&self, system_prompt: &str, user_prompt: &str) -> Result<String, OptimizerError> {
        llm_complete(&self.config, system_prompt, user_prompt)
    }
}
