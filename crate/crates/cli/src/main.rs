use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use pseudohyp::config::{parse_config_with_task, ConfigError, Task};
use pseudohyp::tasks::{run_task, run_verify, RunError, EXIT_CONFIG};

/// Integrability, curvature and constrained curves of Pfaffian forms.
#[derive(Debug, Parser)]
#[command(name = "pseudohyp", version)]
struct Args {
    /// Scenario JSON file (optional for `--task verify`).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override the scenario task: classify, curvature, integrate or verify.
    #[arg(long)]
    task: Option<String>,
    /// Directory for output files; names come from the scenario.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

fn run(args: &Args) -> Result<Vec<String>, RunError> {
    let task = match &args.task {
        Some(t) => Some(Task::parse(t).ok_or_else(|| ConfigError::new("--task", format!("unknown task \"{t}\"")))?),
        None => None,
    };
    let cfg = match (&args.config, task) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| ConfigError::new("--config", format!("cannot read {}: {e}", path.display())))?;
            parse_config_with_task(&text, task)?
        }
        (None, Some(Task::Verify)) => {
            let dir = args.out_dir.clone().unwrap_or_default();
            return run_verify(&dir.join("verify_report.json")).map(|o| o.lines);
        }
        (None, _) => return Err(ConfigError::new("--config", "a scenario file is required").into()),
    };
    let out = run_task(&cfg, args.out_dir.as_deref())?;
    let mut lines = out.lines;
    lines.extend(out.artifacts.iter().map(|p| format!("wrote {}", p.display())));
    Ok(lines)
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err = RunError::Config(ConfigError::new("", e.kind().to_string()));
            let _ = e.print();
            eprintln!("{}", err.diagnostic());
            return ExitCode::from(EXIT_CONFIG as u8);
        }
    };
    match run(&args) {
        Ok(lines) => {
            for l in lines {
                println!("{l}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            if let RunError::VerifyFailed { lines, .. } = &e {
                for l in lines {
                    println!("{l}");
                }
            }
            eprintln!("{}", e.diagnostic());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
