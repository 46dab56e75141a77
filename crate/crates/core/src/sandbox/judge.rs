//! Output judgment: normalized exact match by default, or a task-provided
//! evaluator program run once per test case.

use std::path::Path;
use std::process::{Command, Stdio};
use std::time::Duration;

use thiserror::Error;

use crate::task::Task;

/// Wall-clock allowance for one evaluator invocation.
const EVALUATOR_TIMEOUT: Duration = Duration::from_secs(10);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JudgeOutcome {
    Passed,
    WrongAnswer,
}

#[derive(Debug, Error)]
pub enum JudgeError {
    #[error("evaluator crashed: {0}")]
    EvaluatorCrash(String),
}

/// Splits into lines, trims trailing whitespace on each line, and drops
/// trailing empty lines.
fn normalized_lines(text: &str) -> Vec<&str> {
    let mut lines: Vec<&str> = text.split('\n').map(|l| l.trim_end()).collect();
    while lines.last() == Some(&"") {
        lines.pop();
    }
    lines
}

/// Normalized exact match: trailing whitespace per line and trailing empty
/// lines are ignored.
pub fn outputs_match(actual: &str, expected: &str) -> bool {
    normalized_lines(actual) == normalized_lines(expected)
}

fn concatenated_expected(task: &Task) -> String {
    let mut out = String::new();
    for case in &task.test_cases {
        out.push_str(&case.expected_output);
        if !case.expected_output.ends_with('\n') {
            out.push('\n');
        }
    }
    out
}

/// Judges a solution's full stdout against a task. Without an evaluator this
/// is a normalized exact match on the whole stream. With one, the stream is
/// split per case by the expected line counts and the evaluator program is
/// run on `(input, expected, actual)` for every case; all must accept.
///
/// `scratch_dir` hosts the evaluator program and its per-case files.
pub fn judge(actual_outputs: &str, task: &Task, scratch_dir: &Path) -> Result<bool, JudgeError> {
    let Some(evaluator) = &task.evaluator else {
        return Ok(outputs_match(actual_outputs, &concatenated_expected(task)));
    };

    let actual_lines = normalized_lines(actual_outputs);
    let mut cursor = 0usize;
    let mut slices = Vec::with_capacity(task.test_cases.len());
    for case in &task.test_cases {
        let need = normalized_lines(&case.expected_output).len();
        if cursor + need > actual_lines.len() {
            return Ok(false);
        }
        slices.push(actual_lines[cursor..cursor + need].join("\n"));
        cursor += need;
    }
    if cursor != actual_lines.len() {
        // leftover output that no case accounts for
        return Ok(false);
    }

    let eval_path = scratch_dir.join("evaluator.py");
    std::fs::write(&eval_path, evaluator)
        .map_err(|e| JudgeError::EvaluatorCrash(format!("cannot write evaluator: {e}")))?;

    for (idx, (case, actual)) in task.test_cases.iter().zip(&slices).enumerate() {
        let in_path = scratch_dir.join(format!("case_{idx}.in"));
        let exp_path = scratch_dir.join(format!("case_{idx}.expected"));
        let act_path = scratch_dir.join(format!("case_{idx}.actual"));
        for (path, content) in [
            (&in_path, case.input.as_str()),
            (&exp_path, case.expected_output.as_str()),
            (&act_path, actual.as_str()),
        ] {
            std::fs::write(path, content)
                .map_err(|e| JudgeError::EvaluatorCrash(format!("cannot write case file: {e}")))?;
        }
        match run_evaluator(&eval_path, &in_path, &exp_path, &act_path)? {
            JudgeOutcome::Passed => {}
            JudgeOutcome::WrongAnswer => return Ok(false),
        }
    }
    Ok(true)
}

/// Runs the evaluator on one case. Exit code 0 accepts, 1 rejects; anything
/// else (or a timeout) is an evaluator crash.
fn run_evaluator(
    eval_path: &Path,
    input: &Path,
    expected: &Path,
    actual: &Path,
) -> Result<JudgeOutcome, JudgeError> {
    let mut child = Command::new("python3")
        .arg(eval_path)
        .arg(input)
        .arg(expected)
        .arg(actual)
        .stdin(Stdio::null())
        .stdout(Stdio::null())
        .stderr(Stdio::piped())
        .spawn()
        .map_err(|e| JudgeError::EvaluatorCrash(format!("cannot spawn evaluator: {e}")))?;

    let deadline = std::time::Instant::now() + EVALUATOR_TIMEOUT;
    let status = loop {
        match child.try_wait() {
            Ok(Some(status)) => break status,
            Ok(None) => {
                if std::time::Instant::now() >= deadline {
                    let _ = child.kill();
                    let _ = child.wait();
                    return Err(JudgeError::EvaluatorCrash("evaluator timed out".into()));
                }
                std::thread::sleep(Duration::from_millis(5));
            }
            Err(e) => return Err(JudgeError::EvaluatorCrash(format!("wait failed: {e}"))),
        }
    };

    match status.code() {
        Some(0) => Ok(JudgeOutcome::Passed),
        Some(1) => Ok(JudgeOutcome::WrongAnswer),
        other => {
            let mut stderr = String::new();
            if let Some(mut pipe) = child.stderr.take() {
                use std::io::Read;
                let _ = pipe.read_to_string(&mut stderr);
            }
            Err(JudgeError::EvaluatorCrash(format!(
                "evaluator exited with {other:?}: {}",
                stderr.trim()
            )))
        }
    }
}
