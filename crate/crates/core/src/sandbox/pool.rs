//! Fixed-size worker pool: a dispatcher hands execution requests to workers,
//! each of which owns an exclusive sandbox (and a pinned CPU core) and runs
//! one execution at a time. Results come back on per-request channels,
//! correlated by request id; completion order across workers is unspecified.

use std::sync::mpsc;
use std::sync::Arc;
use std::thread;

use crate::task::{CodeSubmission, Task};

use super::exec::Sandbox;
use super::runner::RunnerRegistry;
use super::{ExecutionLimits, ExecutionResult, SandboxError};

/// One unit of work for the pool.
#[derive(Debug, Clone)]
pub struct ExecutionRequest {
    pub id: u64,
    pub submission: CodeSubmission,
    pub task: Arc<Task>,
    pub limits: ExecutionLimits,
}

/// The pool's answer to one request.
#[derive(Debug)]
pub struct ExecutionResponse {
    pub id: u64,
    pub result: Result<ExecutionResult, SandboxError>,
}

struct Job {
    request: ExecutionRequest,
    reply: mpsc::Sender<ExecutionResponse>,
}

/// Dispatches executions across a fixed set of worker threads.
pub struct SandboxPool {
    sender: Option<crossbeam_channel::Sender<Job>>,
    workers: Vec<thread::JoinHandle<()>>,
}

impl SandboxPool {
    pub fn new(worker_count: usize, registry: RunnerRegistry) -> Self {
        let worker_count = worker_count.max(1);
        let cpus = thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
        let (sender, receiver) = crossbeam_channel::unbounded::<Job>();

        let workers = (0..worker_count)
            .map(|i| {
                let receiver = receiver.clone();
                let sandbox = Sandbox::pinned(registry.clone(), i % cpus);
                thread::Builder::new()
                    .name(format!("sandbox-worker-{i}"))
                    .spawn(move || {
                        for job in receiver.iter() {
                            let result =
                                sandbox.execute(&job.request.submission, &job.request.task, &job.request.limits);
                            // the requester may have hung up; that's fine
                            let _ = job.reply.send(ExecutionResponse {
                                id: job.request.id,
                                result,
                            });
                        }
                    })
                    .expect("spawn sandbox worker")
            })
            .collect();

        SandboxPool {
            sender: Some(sender),
            workers,
        }
    }

    /// Queues a request; the returned channel yields exactly one response.
    pub fn submit(&self, request: ExecutionRequest) -> mpsc::Receiver<ExecutionResponse> {
        let (reply, rx) = mpsc::channel();
        self.sender
            .as_ref()
            .expect("pool is live")
            .send(Job { request, reply })
            .expect("pool workers alive");
        rx
    }

    /// Convenience wrapper: submit and wait for the response.
    pub fn execute_blocking(&self, request: ExecutionRequest) -> ExecutionResponse {
        let rx = self.submit(request);
        rx.recv().expect("worker responds")
    }
}

impl Drop for SandboxPool {
    fn drop(&mut self) {
        self.sender.take(); // closes the queue, workers drain and exit
        for handle in self.workers.drain(..) {
            let _ = handle.join();
        }
    }
}
