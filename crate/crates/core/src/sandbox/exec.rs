//! Child-process execution with wall-clock timing, RSS sampling, and
//! resource-limit enforcement.
//!
//! The child runs in a fresh temporary directory and its own process group
//! (so a timeout kill takes descendants with it). Instantaneous memory comes
//! from the `VmRSS` field of `/proc/<pid>/status`; peak memory is the larger
//! of the kernel's `ru_maxrss` accounting (via `wait4`) and the sampled
//! maximum — sampling alone can miss sub-interval spikes, accounting alone
//! gives no integral.

use std::io::{Read, Write};
use std::path::Path;
use std::process::{Command, Stdio};
use std::thread;
use std::time::{Duration, Instant};

use crate::task::{CodeSubmission, FailureReason, PerformanceRecord, Task};

use super::judge::{judge, JudgeError};
use super::runner::{RunnerRegistry, RunnerSpec};
use super::{compute_integral, ExecutionLimits, ExecutionResult, MemorySample, SandboxError};

/// Executes submissions against tasks. Cheap to clone; a pinned instance
/// confines every child it spawns to one CPU core.
#[derive(Debug, Clone, Default)]
pub struct Sandbox {
    registry: RunnerRegistry,
    pinned_cpu: Option<usize>,
}

impl Sandbox {
    pub fn new(registry: RunnerRegistry) -> Self {
        Sandbox {
            registry,
            pinned_cpu: None,
        }
    }

    pub fn pinned(registry: RunnerRegistry, cpu: usize) -> Self {
        Sandbox {
            registry,
            pinned_cpu: Some(cpu),
        }
    }

    /// Runs the submission once against all of the task's test cases.
    ///
    /// The solution is wrapped by the task's runner template, compiled when
    /// the runner has a compile step, and fed every test-case input over
    /// stdin in file order. Setup problems (unusable temp dir, missing
    /// interpreter) surface as errors; solution failures come back as failed
    /// records.
    pub fn execute(
        &self,
        submission: &CodeSubmission,
        task: &Task,
        limits: &ExecutionLimits,
    ) -> Result<ExecutionResult, SandboxError> {
        limits.validate()?;
        let spec = self.registry.get(&submission.language)?.clone();

        let workdir = tempfile::Builder::new()
            .prefix("perflab-exec-")
            .tempdir()
            .map_err(|e| SandboxError::SetupFailure(format!("cannot create workdir: {e}")))?;

        let src_path = workdir.path().join(spec.src_file_name());
        let bin_path = workdir.path().join("prog");
        std::fs::write(&src_path, task.wrap_solution(&submission.source))
            .map_err(|e| SandboxError::SetupFailure(format!("cannot write source: {e}")))?;

        if let Some(compile_cmd) = &spec.compile_cmd {
            if let Some(result) = self.compile(compile_cmd, &src_path, &bin_path, workdir.path())? {
                return Ok(result); // compile error
            }
        }

        let argv = RunnerSpec::expand(&spec.run_cmd, &src_path, &bin_path);
        if argv.is_empty() {
            return Err(SandboxError::SetupFailure("empty run command".into()));
        }

        let batch_input: String = task.test_cases.iter().map(|c| c.input.as_str()).collect();
        let measured = self.run_measured(&argv, workdir.path(), &batch_input, limits)?;

        let record = self.classify(&measured, task, workdir.path(), limits);
        Ok(ExecutionResult {
            record,
            samples: measured.samples,
            stdout: measured.stdout,
            stderr: measured.stderr,
        })
    }

    /// Runs `execute` `limits.repeats` times sequentially, recording (not
    /// raising) per-repeat failures.
    pub fn measure_repeated(
        &self,
        submission: &CodeSubmission,
        task: &Task,
        limits: &ExecutionLimits,
    ) -> Result<Vec<ExecutionResult>, SandboxError> {
        limits.validate()?;
        let mut results = Vec::with_capacity(limits.repeats as usize);
        for _ in 0..limits.repeats {
            results.push(self.execute(submission, task, limits)?);
        }
        Ok(results)
    }

    fn compile(
        &self,
        compile_cmd: &str,
        src: &Path,
        bin: &Path,
        workdir: &Path,
    ) -> Result<Option<ExecutionResult>, SandboxError> {
        let argv = RunnerSpec::expand(compile_cmd, src, bin);
        if argv.is_empty() {
            return Err(SandboxError::SetupFailure("empty compile command".into()));
        }
        let output = Command::new(&argv[0])
            .args(&argv[1..])
            .current_dir(workdir)
            .stdin(Stdio::null())
            .output()
            .map_err(|e| SandboxError::SetupFailure(format!("cannot spawn compiler: {e}")))?;
        if output.status.success() {
            return Ok(None);
        }
        Ok(Some(ExecutionResult {
            record: PerformanceRecord::failed(FailureReason::CompileError, 0.0, 0.0, 0.0),
            samples: vec![],
            stdout: String::from_utf8_lossy(&output.stdout).into_owned(),
            stderr: String::from_utf8_lossy(&output.stderr).into_owned(),
        }))
    }

    fn classify(
        &self,
        measured: &Measured,
        task: &Task,
        workdir: &Path,
        limits: &ExecutionLimits,
    ) -> PerformanceRecord {
        let time_s = measured.time_s;
        let peak = measured.peak_kb;
        let integral = compute_integral(&measured.samples, time_s).unwrap_or(0.0);

        if measured.timed_out {
            return PerformanceRecord::failed(FailureReason::Timeout, limits.timeout_s, peak, integral);
        }
        if measured.mem_killed || (!measured.exit_ok && peak >= limits.memory_limit_kb as f64) {
            return PerformanceRecord::failed(FailureReason::MemoryLimit, time_s, peak, integral);
        }
        if !measured.exit_ok {
            return PerformanceRecord::failed(FailureReason::RuntimeError, time_s, peak, integral);
        }
        match judge(&measured.stdout, task, workdir) {
            Ok(true) => PerformanceRecord::passing(time_s, peak, integral),
            Ok(false) => PerformanceRecord::failed(FailureReason::WrongAnswer, time_s, peak, integral),
            Err(JudgeError::EvaluatorCrash(msg)) => {
                log::warn!("evaluator crash while judging task {}: {msg}", task.task_id);
                PerformanceRecord::failed(FailureReason::RuntimeError, time_s, peak, integral)
            }
        }
    }

    fn run_measured(
        &self,
        argv: &[String],
        workdir: &Path,
        input: &str,
        limits: &ExecutionLimits,
    ) -> Result<Measured, SandboxError> {
        let mut cmd = Command::new(&argv[0]);
        cmd.args(&argv[1..])
            .current_dir(workdir)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::piped())
            .env_clear()
            .env("PATH", "/usr/local/bin:/usr/bin:/bin")
            .env("HOME", workdir)
            .env("TMPDIR", workdir)
            .env("LC_ALL", "C.UTF-8");

        let pinned = self.pinned_cpu;
        #[cfg(unix)]
        {
            use std::os::unix::process::CommandExt;
            unsafe {
                cmd.pre_exec(move || {
                    // new process group so the whole tree can be killed
                    if libc::setpgid(0, 0) != 0 {
                        return Err(std::io::Error::last_os_error());
                    }
                    if let Some(cpu) = pinned {
                        pin_to_cpu(cpu); // best effort
                    }
                    Ok(())
                });
            }
        }

        let mut child = cmd
            .spawn()
            .map_err(|e| SandboxError::SetupFailure(format!("cannot spawn `{}`: {e}", argv[0])))?;
        let pid = child.id() as libc::pid_t;
        let start = Instant::now();

        let stdin_pipe = child.stdin.take();
        let input_owned = input.as_bytes().to_vec();
        let writer = thread::spawn(move || {
            if let Some(mut pipe) = stdin_pipe {
                let _ = pipe.write_all(&input_owned); // EPIPE when the child stops reading
            }
        });

        let cap = limits.output_cap_bytes;
        let stdout_reader = spawn_capped_reader(child.stdout.take(), cap);
        let stderr_reader = spawn_capped_reader(child.stderr.take(), cap);

        let sample_interval = Duration::from_millis(limits.sample_interval_ms);
        let timeout = Duration::from_secs_f64(limits.timeout_s);
        let mut samples: Vec<MemorySample> = Vec::new();
        let mut sampled_peak = 0.0f64;
        let mut next_sample = Duration::ZERO;
        let mut timed_out = false;
        let mut mem_killed = false;

        let (exit_ok, ru_maxrss_kb, elapsed) = loop {
            if let Some((status, maxrss_kb)) = try_reap(pid)? {
                break (status, maxrss_kb, start.elapsed());
            }
            let elapsed = start.elapsed();
            if elapsed >= next_sample {
                if let Some(rss_kb) = read_vm_rss_kb(pid) {
                    sampled_peak = sampled_peak.max(rss_kb);
                    samples.push(MemorySample {
                        t_s: elapsed.as_secs_f64(),
                        rss_kb,
                    });
                    if !mem_killed && rss_kb > limits.memory_limit_kb as f64 {
                        mem_killed = true;
                        kill_group(pid);
                    }
                }
                next_sample = elapsed + sample_interval;
            }
            if !timed_out && elapsed >= timeout {
                timed_out = true;
                kill_group(pid);
            }
            thread::sleep(Duration::from_millis(2).min(sample_interval));
        };

        // already reaped via wait4; Child::drop does not wait again
        drop(child);
        let _ = writer.join();
        let stdout = stdout_reader.join().unwrap_or_default();
        let stderr = stderr_reader.join().unwrap_or_default();

        let time_s = if timed_out {
            limits.timeout_s
        } else {
            elapsed.as_secs_f64().min(limits.timeout_s)
        };
        samples.retain(|s| s.t_s <= time_s);

        Ok(Measured {
            time_s,
            peak_kb: sampled_peak.max(ru_maxrss_kb),
            samples,
            stdout,
            stderr,
            exit_ok,
            timed_out,
            mem_killed,
        })
    }
}

struct Measured {
    time_s: f64,
    peak_kb: f64,
    samples: Vec<MemorySample>,
    stdout: String,
    stderr: String,
    exit_ok: bool,
    timed_out: bool,
    mem_killed: bool,
}

/// Non-blocking reap via `wait4`, yielding (clean exit?, ru_maxrss in KB).
fn try_reap(pid: libc::pid_t) -> Result<Option<(bool, f64)>, SandboxError> {
    let mut status: libc::c_int = 0;
    let mut rusage: libc::rusage = unsafe { std::mem::zeroed() };
    let rc = unsafe { libc::wait4(pid, &mut status, libc::WNOHANG, &mut rusage) };
    match rc {
        0 => Ok(None),
        r if r == pid => {
            let exited_clean = libc::WIFEXITED(status) && libc::WEXITSTATUS(status) == 0;
            // ru_maxrss is reported in kilobytes on Linux
            Ok(Some((exited_clean, rusage.ru_maxrss as f64)))
        }
        _ => {
            let err = std::io::Error::last_os_error();
            if err.kind() == std::io::ErrorKind::Interrupted {
                return Ok(None);
            }
            Err(SandboxError::SetupFailure(format!("wait4 failed: {err}")))
        }
    }
}

fn kill_group(pid: libc::pid_t) {
    unsafe {
        libc::kill(-pid, libc::SIGKILL);
    }
}

/// Reads the instantaneous resident set of a live process in KB.
fn read_vm_rss_kb(pid: libc::pid_t) -> Option<f64> {
    let status = std::fs::read_to_string(format!("/proc/{pid}/status")).ok()?;
    for line in status.lines() {
        if let Some(rest) = line.strip_prefix("VmRSS:") {
            return rest.split_whitespace().next()?.parse::<f64>().ok();
        }
    }
    None
}

#[cfg(target_os = "linux")]
fn pin_to_cpu(cpu: usize) {
    unsafe {
        let mut set: libc::cpu_set_t = std::mem::zeroed();
        libc::CPU_ZERO(&mut set);
        libc::CPU_SET(cpu, &mut set);
        libc::sched_setaffinity(0, std::mem::size_of::<libc::cpu_set_t>(), &set);
    }
}

#[cfg(all(unix, not(target_os = "linux")))]
fn pin_to_cpu(_cpu: usize) {}

fn spawn_capped_reader<R: Read + Send + 'static>(
    pipe: Option<R>,
    cap: usize,
) -> thread::JoinHandle<String> {
    thread::spawn(move || {
        let Some(mut pipe) = pipe else {
            return String::new();
        };
        let mut buf = Vec::new();
        let mut chunk = [0u8; 8192];
        loop {
            match pipe.read(&mut chunk) {
                Ok(0) | Err(_) => break,
                Ok(n) => {
                    let room = cap.saturating_sub(buf.len());
                    buf.extend_from_slice(&chunk[..n.min(room)]);
                    // keep draining past the cap so the child never blocks
                }
            }
        }
        String::from_utf8_lossy(&buf).into_owned()
    })
}
