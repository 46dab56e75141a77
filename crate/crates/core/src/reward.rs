//! Reward shaping for optimization roll-outs: format control, functional
//! correctness, efficiency improvement, their weighted combination, and
//! group-relative advantage normalization.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::task::EfficiencyObjective;

/// Per-objective clip ceilings for the efficiency reward. The defaults align
/// with the execution limits: 90 s timeout and 1 GB of memory, with the
/// integral ceiling being their product.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyBounds {
    pub time_s: f64,
    pub memory_kb: f64,
    pub integral_kb_s: f64,
}

impl Default for EfficiencyBounds {
    fn default() -> Self {
        EfficiencyBounds {
            time_s: 90.0,
            memory_kb: 1_048_576.0,
            integral_kb_s: 94_371_840.0,
        }
    }
}

impl EfficiencyBounds {
    pub fn for_objective(&self, objective: EfficiencyObjective) -> f64 {
        match objective {
            EfficiencyObjective::Time => self.time_s,
            EfficiencyObjective::Memory => self.memory_kb,
            EfficiencyObjective::Integral => self.integral_kb_s,
        }
    }
}

/// Weights and constants for the combined reward.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RewardConfig {
    pub beta_f: f64,
    pub beta_c: f64,
    pub beta_e: f64,
    pub epsilon: f64,
    pub e_upper: EfficiencyBounds,
}

impl Default for RewardConfig {
    fn default() -> Self {
        RewardConfig {
            beta_f: 0.2,
            beta_c: 0.5,
            beta_e: 0.3,
            epsilon: 1e-6,
            e_upper: EfficiencyBounds::default(),
        }
    }
}

impl RewardConfig {
    pub fn validate(&self) -> Result<(), RewardError> {
        if self.beta_f < 0.0 || self.beta_c < 0.0 || self.beta_e < 0.0 {
            return Err(RewardError::InvalidConfig("negative beta weight".into()));
        }
        if self.epsilon <= 0.0 {
            return Err(RewardError::InvalidConfig("epsilon must be positive".into()));
        }
        if self.e_upper.time_s <= 0.0
            || self.e_upper.memory_kb <= 0.0
            || self.e_upper.integral_kb_s <= 0.0
        {
            return Err(RewardError::InvalidConfig("e_upper bounds must be positive".into()));
        }
        Ok(())
    }
}

/// The four reward values for one roll-out.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RewardBreakdown {
    pub r_format: f64,
    pub r_correct: f64,
    pub r_efficiency: f64,
    pub r_final: f64,
}

#[derive(Debug, Error)]
pub enum RewardError {
    #[error("reward group is empty")]
    EmptyGroup,
    #[error("invalid reward config: {0}")]
    InvalidConfig(String),
}

/// Degeneracy floor for group standardization: a group whose reward spread
/// is at or below this gets all-zero advantages instead of a blow-up.
pub const GROUP_STD_FLOOR: f64 = 1e-8;

// ---------------------------------------------------------------------------
// Format control
// ---------------------------------------------------------------------------

/// Checks whether a response is exactly one `<thinking>...</thinking>` block
/// followed by one `<solution>...</solution>` block, allowing only whitespace
/// before, between, and after the blocks. The thinking body may not contain a
/// `<thinking>` opener; the solution body may contain neither opener. Close
/// tags inside a body are tolerated when a later close tag completes the
/// block, mirroring the lazy backtracking of the reference pattern.
pub fn matches_response_format(text: &str) -> bool {
    const T_OPEN: &str = "<thinking>";
    const T_CLOSE: &str = "</thinking>";
    const S_OPEN: &str = "<solution>";
    const S_CLOSE: &str = "</solution>";

    fn after_ws(s: &str) -> &str {
        s.trim_start_matches(|c: char| c.is_whitespace())
    }

    let rest = after_ws(text);
    let Some(t_body) = rest.strip_prefix(T_OPEN) else {
        return false;
    };

    // Candidate thinking ends: every occurrence of `</thinking>` whose body
    // prefix contains no `<thinking>` opener.
    let t_limit = t_body.find(T_OPEN).unwrap_or(t_body.len());
    for (close_at, _) in t_body.match_indices(T_CLOSE) {
        if close_at > t_limit {
            break;
        }
        let after_t = &t_body[close_at + T_CLOSE.len()..];
        let Some(s_body) = after_ws(after_t).strip_prefix(S_OPEN) else {
            continue;
        };
        let s_limit = [s_body.find(T_OPEN), s_body.find(S_OPEN)]
            .into_iter()
            .flatten()
            .min()
            .unwrap_or(s_body.len());
        for (s_close_at, _) in s_body.match_indices(S_CLOSE) {
            if s_close_at > s_limit {
                break;
            }
            let tail = &s_body[s_close_at + S_CLOSE.len()..];
            if after_ws(tail).is_empty() {
                return true;
            }
        }
    }
    false
}

/// +1 when the response matches the required `<thinking>…</thinking>
/// <solution>…</solution>` structure, −1 otherwise.
pub fn format_reward(response: &str) -> f64 {
    if matches_response_format(response) {
        1.0
    } else {
        -1.0
    }
}

// ---------------------------------------------------------------------------
// Correctness and efficiency
// ---------------------------------------------------------------------------

/// Reward for the pass/fail transition from the input code to the output
/// code: +1.0 upgrade, +0.5 stayed passing, −0.5 stayed failing, −1.0
/// downgrade.
pub fn correctness_reward(a_in: bool, a_out: bool) -> f64 {
    match (a_in, a_out) {
        (false, true) => 1.0,
        (true, true) => 0.5,
        (false, false) => -0.5,
        (true, false) => -1.0,
    }
}

/// Reward for relative improvement of the objective metric, squashed with
/// tanh. Both values are clipped to `[0, e_upper]` first; a failing output
/// earns 0. A missing baseline with a passing output is scored against the
/// clip ceiling, so any passing output counts as an improvement.
pub fn efficiency_reward(
    e_in: Option<f64>,
    e_out: f64,
    out_passed: bool,
    objective: EfficiencyObjective,
    cfg: &RewardConfig,
) -> f64 {
    if !out_passed {
        return 0.0;
    }
    let upper = cfg.e_upper.for_objective(objective);
    let clip = |v: f64| v.clamp(0.0, upper);
    let clip_in = clip(e_in.unwrap_or(upper));
    let clip_out = clip(e_out);
    let gain = (clip_in - clip_out) / (clip_in + cfg.epsilon);
    gain.tanh()
}

/// Combines the three components with the configured weights.
pub fn final_reward(
    r_format: f64,
    r_correct: f64,
    r_efficiency: f64,
    cfg: &RewardConfig,
) -> RewardBreakdown {
    RewardBreakdown {
        r_format,
        r_correct,
        r_efficiency,
        r_final: cfg.beta_f * r_format + cfg.beta_c * r_correct + cfg.beta_e * r_efficiency,
    }
}

// ---------------------------------------------------------------------------
// Group advantages
// ---------------------------------------------------------------------------

/// Standardizes a reward group to zero mean and unit population standard
/// deviation. Groups with spread at or below [`GROUP_STD_FLOOR`] (including
/// singletons) get all-zero advantages.
pub fn group_advantages(rewards: &[f64]) -> Result<Vec<f64>, RewardError> {
    if rewards.is_empty() {
        return Err(RewardError::EmptyGroup);
    }
    let n = rewards.len() as f64;
    let mean = rewards.iter().sum::<f64>() / n;
    let var = rewards.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>() / n;
    let std = var.sqrt();
    if std <= GROUP_STD_FLOOR {
        return Ok(vec![0.0; rewards.len()]);
    }
    Ok(rewards.iter().map(|r| (r - mean) / std).collect())
}

/// A roll-out group's rewards together with their normalized advantages.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupRewards {
    pub rewards: Vec<f64>,
    pub advantages: Vec<f64>,
}

impl GroupRewards {
    pub fn new(rewards: Vec<f64>) -> Result<Self, RewardError> {
        let advantages = group_advantages(&rewards)?;
        Ok(GroupRewards { rewards, advantages })
    }
}
