use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

use perflab_cli::commands::{
    cmd_build_references, cmd_evaluate, cmd_optimize, cmd_report, cmd_serve, write_report,
};
use perflab_cli::config::RunConfig;
use perflab_core::task::EfficiencyObjective;

#[derive(Parser)]
#[command(
    name = "perflab",
    about = "Measure, score, and iteratively optimize code efficiency",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every subcommand; each overrides the config-file value.
#[derive(Args, Clone, Default)]
struct CommonArgs {
    /// JSON run configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Task file (JSON array of tasks).
    #[arg(long)]
    tasks: Option<PathBuf>,
    /// Efficiency objective to optimize or score.
    #[arg(long, value_enum)]
    objective: Option<ObjectiveArg>,
    /// Output directory for reports and run records.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Parallel sandbox workers.
    #[arg(long)]
    workers: Option<usize>,
    /// Seed for bootstrap resampling and stub determinism bookkeeping.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(clap::ValueEnum, Clone, Copy)]
enum ObjectiveArg {
    Time,
    Memory,
    Integral,
}

impl From<ObjectiveArg> for EfficiencyObjective {
    fn from(value: ObjectiveArg) -> Self {
        match value {
            ObjectiveArg::Time => EfficiencyObjective::Time,
            ObjectiveArg::Memory => EfficiencyObjective::Memory,
            ObjectiveArg::Integral => EfficiencyObjective::Integral,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Measure one solution per task and print the benchmark table.
    Evaluate {
        #[command(flatten)]
        common: CommonArgs,
        /// Directory holding one solution file per task (stem = task_id).
        #[arg(long)]
        solutions: Option<PathBuf>,
    },
    /// Run the iterative optimization loop over all tasks.
    Optimize {
        #[command(flatten)]
        common: CommonArgs,
        /// Number of refinement iterations per task.
        #[arg(long)]
        iterations: Option<u32>,
    },
    /// Execute reference solutions and write their measured distributions
    /// into a new task file.
    BuildReferences {
        #[command(flatten)]
        common: CommonArgs,
        /// Where to write the updated task file.
        #[arg(long)]
        out_file: PathBuf,
    },
    /// Aggregate stored runs into iteration curves (JSON + CSV).
    Report {
        #[command(flatten)]
        common: CommonArgs,
        /// Run store written by `optimize` (runs.jsonl).
        #[arg(long)]
        records: PathBuf,
    },
    /// Serve the sandbox over HTTP (POST /execute).
    Serve {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, default_value_t = 8700)]
        port: u16,
    },
}

fn resolve_config(common: &CommonArgs) -> Result<RunConfig> {
    let mut cfg = match &common.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(tasks) = &common.tasks {
        cfg.task_file = tasks.clone();
    }
    if let Some(objective) = common.objective {
        cfg.objective = objective.into();
    }
    if let Some(out) = &common.out {
        cfg.output_dir = out.clone();
    }
    if let Some(workers) = common.workers {
        cfg.workers = workers;
    }
    if let Some(seed) = common.seed {
        cfg.seed = seed;
        cfg.bootstrap.seed = seed;
    }
    Ok(cfg)
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match cli.command {
        Command::Evaluate { common, solutions } => {
            let mut cfg = resolve_config(&common)?;
            if let Some(solutions) = solutions {
                cfg.solutions_dir = Some(solutions);
            }
            let report = cmd_evaluate(&cfg)?;
            let path = write_report(&report, &cfg.output_dir)?;
            print!("{}", report.render_table());
            println!("report written to {}", path.display());
        }
        Command::Optimize { common, iterations } => {
            let mut cfg = resolve_config(&common)?;
            if let Some(iterations) = iterations {
                cfg.n_iter = iterations;
            }
            let records = cmd_optimize(&cfg)?;
            println!(
                "{} run records appended to {}",
                records.len(),
                cfg.output_dir.join("runs.jsonl").display()
            );
        }
        Command::BuildReferences { common, out_file } => {
            let cfg = resolve_config(&common)?;
            let summary = cmd_build_references(&cfg, &out_file)?;
            println!(
                "updated {} tasks ({} excluded solutions, {} tasks without distributions)",
                summary.tasks_updated,
                summary.excluded.len(),
                summary.tasks_without_distributions.len()
            );
            for excluded in &summary.excluded {
                println!(
                    "excluded {}[{}]: {}",
                    excluded.task_id, excluded.solution_index, excluded.reason
                );
            }
            println!("task file written to {}", out_file.display());
        }
        Command::Report { common, records } => {
            let cfg = resolve_config(&common)?;
            let curves = cmd_report(&records, &cfg.output_dir)?;
            for curve in &curves {
                println!("objective {} ({} tasks):", curve.objective, curve.task_count);
                for row in &curve.rows {
                    println!(
                        "  iter {:>2}  pass@1 {:.3}  beyond-t {:.3}  beyond-m {:.3}  beyond-i {:.3}",
                        row.iteration, row.pass_at_1, row.beyond_t, row.beyond_m, row.beyond_i
                    );
                }
            }
            println!("curves written to {}", cfg.output_dir.display());
        }
        Command::Serve { common, port } => {
            let cfg = resolve_config(&common)?;
            cmd_serve(&cfg, port)?;
        }
    }
    Ok(())
}
