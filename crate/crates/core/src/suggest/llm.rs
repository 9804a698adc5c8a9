use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::PromptBundle;

pub const DEFAULT_API_KEY_ENV: &str = "LEMMA_AI_API_KEY";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LlmConfig {
    /// Full URL of a chat-completions endpoint.
    pub endpoint_url: String,
    pub model_id: String,
    pub temperature: f64,
    pub max_tokens: u32,
    pub timeout_ms: u64,
    /// Name of the environment variable holding the API key.
    pub api_key_env: String,
    /// Extra attempts after a timeout or an HTTP 429/5xx.
    pub max_retries: u32,
}

impl Default for LlmConfig {
    fn default() -> Self {
        LlmConfig {
            endpoint_url: String::new(),
            model_id: "gpt-4o".into(),
            temperature: 0.0,
            max_tokens: 1024,
            timeout_ms: 60_000,
            api_key_env: DEFAULT_API_KEY_ENV.into(),
            max_retries: 0,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum LlmError {
    #[error("LLM configuration: {0}")]
    Config(String),
    #[error("environment variable {var} with the API key is not set")]
    MissingApiKey { var: String },
    #[error("LLM endpoint returned HTTP {status}")]
    HttpError { status: u16 },
    #[error("LLM request timed out")]
    Timeout,
    #[error("LLM response has no message content: {0}")]
    MalformedResponse(String),
    #[error("LLM transport error: {0}")]
    Transport(String),
}

impl LlmError {
    fn retryable(&self) -> bool {
        match self {
            LlmError::Timeout => true,
            LlmError::HttpError { status } => *status == 429 || *status >= 500,
            _ => false,
        }
    }
}

impl LlmConfig {
    pub fn validate(&self) -> Result<(), LlmError> {
        if self.endpoint_url.trim().is_empty() {
            return Err(LlmError::Config("endpoint_url is empty".into()));
        }
        if !(0.0..=2.0).contains(&self.temperature) {
            return Err(LlmError::Config(format!("temperature {} outside [0, 2]", self.temperature)));
        }
        Ok(())
    }

    /// The request body for `prompt`.
    pub fn request_body(&self, prompt: &PromptBundle) -> serde_json::Value {
        json!({
            "model": self.model_id,
            "messages": [
                {"role": "system", "content": prompt.system_text},
                {"role": "user", "content": prompt.user_text},
            ],
            "temperature": self.temperature,
            "max_tokens": self.max_tokens,
        })
    }
}

fn first_choice_content(body: &str) -> Result<String, LlmError> {
    let v: serde_json::Value =
        serde_json::from_str(body).map_err(|e| LlmError::MalformedResponse(format!("invalid JSON: {e}")))?;
    v.pointer("/choices/0/message/content")
        .and_then(|c| c.as_str())
        .map(str::to_string)
        .ok_or_else(|| LlmError::MalformedResponse("missing choices[0].message.content".into()))
}

fn attempt(agent: &ureq::Agent, cfg: &LlmConfig, key: &str, body: &str) -> Result<String, LlmError> {
    let response = agent
        .post(&cfg.endpoint_url)
        .header("Authorization", &format!("Bearer {key}"))
        .header("Content-Type", "application/json")
        .send(body);
    let mut response = match response {
        Ok(r) => r,
        Err(ureq::Error::Timeout(_)) => return Err(LlmError::Timeout),
        Err(ureq::Error::Io(e)) if e.kind() == std::io::ErrorKind::TimedOut => return Err(LlmError::Timeout),
        Err(e) => return Err(LlmError::Transport(e.to_string())),
    };
    let status = response.status().as_u16();
    let text = match response.body_mut().read_to_string() {
        Ok(t) => t,
        Err(ureq::Error::Timeout(_)) => return Err(LlmError::Timeout),
        Err(e) => return Err(LlmError::Transport(e.to_string())),
    };
    log::debug!("LLM response status {status}: {text}");
    if !(200..300).contains(&status) {
        return Err(LlmError::HttpError { status });
    }
    first_choice_content(&text)
}

/// Sends `prompt` to the configured chat-completions endpoint and returns
/// the first choice's message content.
pub fn llm_request(cfg: &LlmConfig, prompt: &PromptBundle) -> Result<String, LlmError> {
    cfg.validate()?;
    let key = std::env::var(&cfg.api_key_env).map_err(|_| LlmError::MissingApiKey {
        var: cfg.api_key_env.clone(),
    })?;
    let body = cfg.request_body(prompt).to_string();
    log::debug!("LLM request to {} (Authorization: Bearer <redacted>): {body}", cfg.endpoint_url);
    let agent: ureq::Agent = ureq::Agent::config_builder()
        .timeout_global(Some(Duration::from_millis(cfg.timeout_ms)))
        .http_status_as_error(false)
        .build()
        .into();
    let mut tries = 0;
    loop {
        match attempt(&agent, cfg, &key, &body) {
            Err(e) if e.retryable() && tries < cfg.max_retries => {
                tries += 1;
                log::info!("LLM request failed ({e}); retry {tries} of {}", cfg.max_retries);
            }
            other => return other,
        }
    }
}
