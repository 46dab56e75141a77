//! The iterative code-optimization loop and its pluggable code generators:
//! a live chat-completion endpoint or a deterministic scripted stub.

mod client;
mod driver;
mod parse;
mod prompt;
mod stub;

pub use client::{llm_complete, EndpointConfig, LlmOptimizer};
pub use driver::{compare, optimize, reward_breakdowns, IterationTrace, OptimizationOutcome};
pub use parse::{extract_fenced_code, parse_response, ParseError, ParsedResponse};
pub use prompt::{render_baseline_prompt, render_prompt, PromptContext, SYSTEM_PROMPT};
pub use stub::ScriptedStub;

use thiserror::Error;

/// A code generator: given the rendered prompts, produce a response. Calls
/// must return or fail within the implementation's configured timeout, and
/// implementations must tolerate concurrent calls from different runs.
pub trait Optimizer: Send + Sync {
    fn complete(&self, system_prompt: &str, user_prompt: &str) -> Result<String, OptimizerError>;
}

#[derive(Debug, Error)]
pub enum OptimizerError {
    #[error("authentication failed: {0}")]
    Auth(String),
    #[error("transport failure: {0}")]
    Transport(String),
    #[error("endpoint returned an empty completion")]
    EmptyCompletion,
}
