//! Run configuration: a JSON file mirrored by command-line flags.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use perflab_core::metrics::BootstrapConfig;
use perflab_core::optimizer::{EndpointConfig, LlmOptimizer, Optimizer, ScriptedStub};
use perflab_core::reward::RewardConfig;
use perflab_core::sandbox::{ExecutionLimits, RunnerRegistry};
use perflab_core::task::EfficiencyObjective;

/// Where generated code comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum OptimizerDescriptor {
    /// Canned responses from a script file; deterministic.
    Stub { script: PathBuf },
    /// Live chat-completion endpoint.
    Endpoint {
        #[serde(flatten)]
        config: EndpointConfig,
    },
}

impl OptimizerDescriptor {
    /// Builds a fresh optimizer instance. Stubs get a new call counter per
    /// instance, so every task's run replays the script from the top.
    pub fn build(&self) -> Result<Box<dyn Optimizer>> {
        match self {
            OptimizerDescriptor::Stub { script } => {
                let stub = ScriptedStub::from_script_file(script)
                    .with_context(|| format!("loading stub script {}", script.display()))?;
                Ok(Box::new(stub))
            }
            OptimizerDescriptor::Endpoint { config } => {
                Ok(Box::new(LlmOptimizer::new(config.clone())))
            }
        }
    }
}

/// Full configuration for one command invocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub task_file: PathBuf,
    pub objective: EfficiencyObjective,
    pub n_iter: u32,
    pub limits: ExecutionLimits,
    pub reward: RewardConfig,
    pub bootstrap: BootstrapConfig,
    pub optimizer: Option<OptimizerDescriptor>,
    pub output_dir: PathBuf,
    pub seed: u64,
    pub workers: usize,
    pub target_language: String,
    /// Extra runner registrations merged over the built-in Python runner.
    pub runner_config: Option<PathBuf>,
    /// Directory of solution files (`<task_id>.py`) for `evaluate`.
    pub solutions_dir: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            task_file: PathBuf::new(),
            objective: EfficiencyObjective::Integral,
            n_iter: 4,
            limits: ExecutionLimits {
                repeats: 16,
                ..ExecutionLimits::default()
            },
            reward: RewardConfig::default(),
            bootstrap: BootstrapConfig::default(),
            optimizer: None,
            output_dir: PathBuf::from("perflab-out"),
            seed: 0,
            workers: 1,
            target_language: "python".into(),
            runner_config: None,
            solutions_dir: None,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let cfg: RunConfig =
            serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_iter < 1 {
            bail!("n_iter must be >= 1");
        }
        if self.task_file.as_os_str().is_empty() {
            bail!("a task file is required (--tasks or config task_file)");
        }
        if !self.task_file.exists() {
            bail!("task file {} does not exist", self.task_file.display());
        }
        if let Some(path) = &self.runner_config {
            if !path.exists() {
                bail!("runner config {} does not exist", path.display());
            }
        }
        if let Some(OptimizerDescriptor::Stub { script }) = &self.optimizer {
            if !script.exists() {
                bail!("stub script {} does not exist", script.display());
            }
        }
        self.limits
            .validate()
            .map_err(|e| anyhow::anyhow!(e.to_string()))?;
        self.reward
            .validate()
            .map_err(|e| anyhow::anyhow!(e.to_string()))?;
        self.bootstrap
            .validate()
            .map_err(|e| anyhow::anyhow!(e.to_string()))?;
        Ok(())
    }

    pub fn runner_registry(&self) -> Result<RunnerRegistry> {
        match &self.runner_config {
            Some(path) => RunnerRegistry::load(path).map_err(|e| anyhow::anyhow!(e.to_string())),
            None => Ok(RunnerRegistry::default()),
        }
    }

    /// The configuration as stored inside run records.
    pub fn snapshot(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config serializes")
    }
}
