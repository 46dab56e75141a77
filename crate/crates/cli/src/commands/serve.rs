//! `serve`: expose the sandbox over HTTP so external workers can request
//! executions. `POST /execute` takes `{language, code, task_id, limits}` and
//! returns the full execution result as JSON.

use std::sync::Arc;

use anyhow::{Context, Result};
use serde::Deserialize;

use perflab_core::sandbox::{ExecutionLimits, RunnerRegistry, Sandbox, SandboxError};
use perflab_core::task::{load_task_set, CodeSubmission, SubmissionOrigin, Task};

use crate::config::RunConfig;

#[derive(Debug, Deserialize)]
struct ExecuteBody {
    language: String,
    code: String,
    task_id: String,
    #[serde(default)]
    limits: Option<ExecutionLimits>,
}

/// A running sandbox service bound to a local port.
pub struct SandboxService {
    pub port: u16,
    server: Arc<tiny_http::Server>,
    handle: Option<std::thread::JoinHandle<()>>,
}

impl SandboxService {
    /// Binds `127.0.0.1:port` (0 picks a free port) and serves requests on a
    /// background thread until dropped.
    pub fn start(
        tasks: Vec<Task>,
        registry: RunnerRegistry,
        default_limits: ExecutionLimits,
        port: u16,
    ) -> Result<Self> {
        let server = Arc::new(
            tiny_http::Server::http(("127.0.0.1", port))
                .map_err(|e| anyhow::anyhow!("cannot bind sandbox service: {e}"))?,
        );
        let bound_port = match server.server_addr() {
            tiny_http::ListenAddr::IP(addr) => addr.port(),
            _ => port,
        };
        let tasks = Arc::new(tasks);
        let worker = {
            let server = server.clone();
            std::thread::spawn(move || {
                let sandbox = Sandbox::new(registry);
                for request in server.incoming_requests() {
                    handle_request(request, &sandbox, &tasks, &default_limits);
                }
            })
        };
        Ok(SandboxService {
            port: bound_port,
            server,
            handle: Some(worker),
        })
    }

    /// Serves until the process is killed.
    pub fn run_forever(mut self) {
        if let Some(handle) = self.handle.take() {
            let _ = handle.join();
        }
    }
}

impl Drop for SandboxService {
    fn drop(&mut self) {
        self.server.unblock();
        if let Some(handle) = self.handle.take() {
            let _ = handle.join();
        }
    }
}

fn respond_json(request: tiny_http::Request, status: u16, body: &serde_json::Value) {
    let response = tiny_http::Response::from_string(body.to_string())
        .with_status_code(tiny_http::StatusCode(status))
        .with_header(
            "Content-Type: application/json"
                .parse::<tiny_http::Header>()
                .expect("static header"),
        );
    let _ = request.respond(response);
}

fn handle_request(
    mut request: tiny_http::Request,
    sandbox: &Sandbox,
    tasks: &[Task],
    default_limits: &ExecutionLimits,
) {
    let url = request.url().to_string();
    match (request.method(), url.as_str()) {
        (tiny_http::Method::Get, "/health") => {
            respond_json(request, 200, &serde_json::json!({"status": "ok"}));
        }
        (tiny_http::Method::Post, "/execute") => {
            let mut body = String::new();
            if request.as_reader().read_to_string(&mut body).is_err() {
                respond_json(request, 400, &serde_json::json!({"error": "unreadable body"}));
                return;
            }
            let parsed: ExecuteBody = match serde_json::from_str(&body) {
                Ok(parsed) => parsed,
                Err(e) => {
                    respond_json(request, 400, &serde_json::json!({"error": e.to_string()}));
                    return;
                }
            };
            let Some(task) = tasks.iter().find(|t| t.task_id == parsed.task_id) else {
                respond_json(
                    request,
                    404,
                    &serde_json::json!({"error": format!("unknown task_id {}", parsed.task_id)}),
                );
                return;
            };
            let submission = CodeSubmission {
                source: parsed.code,
                language: parsed.language,
                origin: SubmissionOrigin::Optimizer,
            };
            let limits = parsed.limits.unwrap_or_else(|| default_limits.clone());
            match sandbox.execute(&submission, task, &limits) {
                Ok(result) => respond_json(
                    request,
                    200,
                    &serde_json::to_value(&result).expect("result serializes"),
                ),
                Err(SandboxError::RunnerNotRegistered(lang)) => respond_json(
                    request,
                    400,
                    &serde_json::json!({"error": format!("no runner for language {lang}")}),
                ),
                Err(err) => respond_json(request, 500, &serde_json::json!({"error": err.to_string()})),
            }
        }
        _ => {
            respond_json(request, 404, &serde_json::json!({"error": "not found"}));
        }
    }
}

/// CLI entry: load tasks and serve until interrupted.
pub fn cmd_serve(cfg: &RunConfig, port: u16) -> Result<()> {
    cfg.validate()?;
    let tasks = load_task_set(&cfg.task_file).context("loading tasks for serve")?;
    let registry = cfg.runner_registry()?;
    let service = SandboxService::start(tasks, registry, cfg.limits.clone(), port)?;
    println!("sandbox service listening on 127.0.0.1:{}", service.port);
    service.run_forever();
    Ok(())
}
