//! Loop-level tests with a real sandbox and scripted stubs.

use perflab_core::optimizer::{optimize, ScriptedStub};
use perflab_core::sandbox::{ExecutionLimits, Sandbox};
use perflab_core::task::{EfficiencyObjective, FailureReason, Task, TestCase};

fn echo_task() -> Task {
    Task {
        task_id: "echo".into(),
        title: String::new(),
        problem_description: "Echo the input line.".into(),
        code_prompt: String::new(),
        runner_template: String::new(),
        evaluator: None,
        test_cases: vec![TestCase {
            input: "41\n".into(),
            expected_output: "41".into(),
        }],
        reference_solutions: vec![],
        reference_distributions: None,
    }
}

fn limits() -> ExecutionLimits {
    ExecutionLimits {
        timeout_s: 10.0,
        ..ExecutionLimits::default()
    }
}

fn wrap(code: &str) -> String {
    format!("<thinking>step</thinking><solution>```python\n{code}\n```</solution>")
}

const SEED_SLOW: &str = "import sys, time\ntime.sleep(0.2)\nsys.stdout.write(sys.stdin.read())";
const FAST: &str = "import sys\nsys.stdout.write(sys.stdin.read())";
const WRONG: &str = "print('nope')";

#[test]
fn wrong_answers_never_evict_a_passing_seed() {
    let sandbox = Sandbox::default();
    let stub = ScriptedStub::constant(wrap(WRONG));
    let outcome = optimize(
        &echo_task(),
        EfficiencyObjective::Time,
        3,
        &stub,
        &sandbox,
        &limits(),
        "python",
        Some(SEED_SLOW.to_string()),
    );
    // seeded runs have exactly n_iter entries and no initial-generation one
    assert_eq!(outcome.traces.len(), 3);
    assert!(outcome.traces.iter().all(|t| !t.accepted));
    assert_eq!(outcome.final_code, SEED_SLOW);
    assert!(outcome.final_record.passed);
    assert!(outcome.seed_record.as_ref().unwrap().passed);
}

#[test]
fn single_improvement_is_the_only_acceptance() {
    let sandbox = Sandbox::default();
    // seeded run: call k serves iteration k+1
    let stub = ScriptedStub::from_script_json(&serde_json::to_string(&serde_json::json!({
        "0": wrap(WRONG),
        "1": wrap(FAST),
        "2": wrap(WRONG),
    })).unwrap()).unwrap();
    let outcome = optimize(
        &echo_task(),
        EfficiencyObjective::Time,
        3,
        &stub,
        &sandbox,
        &limits(),
        "python",
        Some(SEED_SLOW.to_string()),
    );
    let accepted: Vec<bool> = outcome.traces.iter().map(|t| t.accepted).collect();
    assert_eq!(accepted, vec![false, true, false]);
    assert_eq!(outcome.final_code, FAST);
    // the fast candidate's measured time is what the final record carries
    assert_eq!(
        outcome.final_record.time_s,
        outcome.traces[1].candidate_record.time_s
    );
    assert!(outcome.final_record.time_s < outcome.seed_record.unwrap().time_s);
}

#[test]
fn failed_initial_generation_is_recoverable() {
    let sandbox = Sandbox::default();
    // nothing scripted for call 0: the initial generation yields no code
    let stub = ScriptedStub::from_script_json(&serde_json::to_string(&serde_json::json!({
        "1": wrap(FAST),
    })).unwrap()).unwrap();
    let outcome = optimize(
        &echo_task(),
        EfficiencyObjective::Time,
        1,
        &stub,
        &sandbox,
        &limits(),
        "python",
        None,
    );
    assert_eq!(outcome.traces.len(), 2);
    let initial = &outcome.traces[0];
    assert!(!initial.accepted);
    assert_eq!(
        initial.candidate_record.failure_reason,
        Some(FailureReason::FormatError)
    );
    // the first runnable candidate rescues the run
    assert!(outcome.traces[1].accepted);
    assert!(outcome.final_record.passed);
}

#[test]
fn hopeless_run_ends_with_a_failed_record() {
    let sandbox = Sandbox::default();
    let stub = ScriptedStub::constant("no tags, no fences".to_string());
    let outcome = optimize(
        &echo_task(),
        EfficiencyObjective::Time,
        2,
        &stub,
        &sandbox,
        &limits(),
        "python",
        None,
    );
    assert_eq!(outcome.traces.len(), 3);
    assert!(!outcome.final_record.passed);
    assert!(outcome.final_code.is_empty());
}
