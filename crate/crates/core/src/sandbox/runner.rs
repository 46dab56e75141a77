//! Runner registry: maps a language tag to the command templates that
//! compile (optionally) and run a solution.
//!
//! Templates are whitespace-split into argv tokens; `{src}` expands to the
//! solution path and `{bin}` to the compile output path inside the
//! execution's working directory.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::SandboxError;

/// Command templates for one language.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunnerSpec {
    /// Optional compile step; non-zero exit marks the submission
    /// CompileError.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub compile_cmd: Option<String>,
    /// Mandatory run step.
    pub run_cmd: String,
    /// File name the solution source is written to (extension matters to
    /// some toolchains). Defaults to `main.src`.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub src_file: Option<String>,
}

impl RunnerSpec {
    pub fn src_file_name(&self) -> &str {
        self.src_file.as_deref().unwrap_or("main.src")
    }

    /// Expands a command template into argv tokens.
    pub fn expand(template: &str, src: &Path, bin: &Path) -> Vec<String> {
        template
            .split_whitespace()
            .map(|tok| {
                tok.replace("{src}", &src.to_string_lossy())
                    .replace("{bin}", &bin.to_string_lossy())
            })
            .collect()
    }
}

/// Language tag → runner mapping. A Python runner is registered by default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RunnerRegistry {
    runners: BTreeMap<String, RunnerSpec>,
}

impl Default for RunnerRegistry {
    fn default() -> Self {
        let mut runners = BTreeMap::new();
        runners.insert(
            "python".to_string(),
            RunnerSpec {
                compile_cmd: None,
                run_cmd: "python3 {src}".to_string(),
                src_file: Some("main.py".to_string()),
            },
        );
        RunnerRegistry { runners }
    }
}

impl RunnerRegistry {
    pub fn get(&self, language: &str) -> Result<&RunnerSpec, SandboxError> {
        self.runners
            .get(language)
            .ok_or_else(|| SandboxError::RunnerNotRegistered(language.to_string()))
    }

    pub fn register(&mut self, language: impl Into<String>, spec: RunnerSpec) {
        self.runners.insert(language.into(), spec);
    }

    /// Loads extra runners from a JSON map and merges them over the
    /// defaults.
    pub fn load(path: impl AsRef<Path>) -> Result<Self, SandboxError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| SandboxError::SetupFailure(format!("cannot read runner config: {e}")))?;
        let extra: BTreeMap<String, RunnerSpec> = serde_json::from_str(&text)
            .map_err(|e| SandboxError::SetupFailure(format!("bad runner config: {e}")))?;
        let mut registry = RunnerRegistry::default();
        registry.runners.extend(extra);
        Ok(registry)
    }
}
