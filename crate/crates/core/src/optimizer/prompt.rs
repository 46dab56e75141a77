//! Prompt rendering for the optimization loop.
//!
//! Rendering is pure: the same context always produces identical bytes.

use serde::{Deserialize, Serialize};

use crate::task::PerformanceRecord;

/// System prompt establishing the `<thinking>`/`<solution>` response format.
pub const SYSTEM_PROMPT: &str = "A conversation between User and Assistant.
The User asks a question and provides an original solution, then the Assistant improves it.
The assistant first thinks about the reasoning process in the mind and then provides the user with the improved solution.
The reasoning process and solution are enclosed within <thinking> </thinking> and <solution> </solution> tags, respectively.
For example, \"<thinking>reasoning_process</thinking> <solution>improved_solution</solution>\".";

const USER_TEMPLATE: &str = "## Instructions
Your task is to implement a solution to the following problem in {target_lang}.

## Problem Description
{problem_description}

## Original Solution
{original_solution}

## Original Performance
Passed: {original_passed} / Time: {original_time} / Memory: {original_memory} / Integral: {original_integral}

## Output Format
- Provide the complete solution code in one markdown code block with an appropriate language identifier.
- Generate the initial solution code directly if Original Solution is empty.
- Fix the original solution if it was not passed. Optimize the {efficiency_instruction} performance if the original solution was passed.";

const BASELINE_TEMPLATE: &str = "You are an expert competitive programmer who excels at solving algorithm problems in multiple programming languages.
Your task is to implement a {efficiency_instruction} solution to the following problem in {target_lang}.

## Problem Description
{question}

## Output Format
- Provide the complete solution code in **one markdown code block** with appropriate language identifier.
- Implement the function with the exact signature (name, parameters, etc.) specified in the starter code.";

/// Everything the optimizer prompt needs for one iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PromptContext {
    pub problem_description: String,
    /// The efficiency instruction rendered as prose, e.g. "time-efficient".
    pub efficiency_instruction: String,
    pub target_language: String,
    /// Empty on the initial generation.
    pub original_code: String,
    /// Present iff `original_code` is non-empty.
    pub original_performance: Option<PerformanceRecord>,
}

impl PromptContext {
    pub fn validate(&self) -> Result<(), String> {
        if self.original_code.is_empty() != self.original_performance.is_none() {
            return Err("original_performance must be present iff original_code is non-empty".into());
        }
        Ok(())
    }
}

fn fmt_metric(value: Option<f64>) -> String {
    match value {
        Some(v) => format!("{v}"),
        None => "None".to_string(),
    }
}

/// Renders the (system, user) prompt pair for one iteration. An empty
/// original code leaves the Original Solution section empty and the
/// performance line carries `None` markers.
pub fn render_prompt(ctx: &PromptContext) -> (String, String) {
    let perf = ctx.original_performance.as_ref();
    let user = USER_TEMPLATE
        .replace("{target_lang}", &ctx.target_language)
        .replace("{problem_description}", &ctx.problem_description)
        .replace("{original_solution}", &ctx.original_code)
        .replace(
            "{original_passed}",
            &perf.map(|p| p.passed.to_string()).unwrap_or_else(|| "None".into()),
        )
        .replace("{original_time}", &fmt_metric(perf.map(|p| p.time_s)))
        .replace("{original_memory}", &fmt_metric(perf.map(|p| p.peak_memory_kb)))
        .replace("{original_integral}", &fmt_metric(perf.map(|p| p.integral_kb_s)))
        .replace("{efficiency_instruction}", &ctx.efficiency_instruction);
    (SYSTEM_PROMPT.to_string(), user)
}

/// Renders the single-shot baseline prompt (no feedback loop).
pub fn render_baseline_prompt(
    problem_description: &str,
    efficiency_instruction: &str,
    target_language: &str,
) -> String {
    BASELINE_TEMPLATE
        .replace("{efficiency_instruction}", efficiency_instruction)
        .replace("{target_lang}", target_language)
        .replace("{question}", problem_description)
}
