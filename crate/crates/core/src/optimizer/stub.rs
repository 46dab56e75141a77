//! Deterministic scripted optimizer for tests and demos.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::atomic::{AtomicU32, Ordering};

use super::{Optimizer, OptimizerError};

/// Replays canned responses keyed by call index (0 is the first call the
/// stub receives, i.e. the initial generation when the run has no seed
/// code). Indices without an entry fall back to `default`; with no default
/// the stub reports a transport error for that call.
///
/// The script file is a JSON object mapping iteration indices to response
/// text, with an optional `"default"` key:
///
/// ```json
/// {"0": "<thinking>…</thinking><solution>…</solution>", "default": "…"}
/// ```
#[derive(Debug)]
pub struct ScriptedStub {
    responses: BTreeMap<u32, String>,
    default: Option<String>,
    calls: AtomicU32,
}

impl ScriptedStub {
    pub fn new(responses: BTreeMap<u32, String>, default: Option<String>) -> Self {
        ScriptedStub {
            responses,
            default,
            calls: AtomicU32::new(0),
        }
    }

    /// Always replies with the same response.
    pub fn constant(response: impl Into<String>) -> Self {
        ScriptedStub::new(BTreeMap::new(), Some(response.into()))
    }

    pub fn from_script_file(path: impl AsRef<Path>) -> Result<Self, OptimizerError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| OptimizerError::Transport(format!("cannot read stub script: {e}")))?;
        Self::from_script_json(&text)
    }

    pub fn from_script_json(text: &str) -> Result<Self, OptimizerError> {
        let raw: BTreeMap<String, String> = serde_json::from_str(text)
            .map_err(|e| OptimizerError::Transport(format!("bad stub script: {e}")))?;
        let mut responses = BTreeMap::new();
        let mut default = None;
        for (key, value) in raw {
            if key == "default" {
                default = Some(value);
            } else {
                let idx: u32 = key.parse().map_err(|_| {
                    OptimizerError::Transport(format!("stub script key `{key}` is not an iteration index"))
                })?;
                responses.insert(idx, value);
            }
        }
        Ok(ScriptedStub::new(responses, default))
    }
}

impl Optimizer for ScriptedStub {
    fn complete(&self, _system_prompt: &str, _user_prompt: &str) -> Result<String, OptimizerError> {
        let call = self.calls.fetch_add(1, Ordering::SeqCst);
        self.responses
            .get(&call)
            .or(self.default.as_ref())
            .cloned()
            .ok_or_else(|| OptimizerError::Transport(format!("stub has no response for call {call}")))
    }
}
