use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use ditop_cli::{run, CliError, Format, Request, Task};
use ditop_core::scenefile::BudgetSpec;

/// Directed-topology analysis of cubical scenes and PV programs.
#[derive(Parser, Debug)]
#[command(name = "ditop", version)]
struct Args {
    /// Scene JSON file, or a `.pv` program.
    #[arg(long)]
    scene: PathBuf,

    /// Analysis to run; repeatable. Defaults to `extremal`.
    #[arg(long = "task", value_enum)]
    tasks: Vec<Task>,

    /// Largest number of classes kept per source vertex.
    #[arg(long)]
    max_paths: Option<usize>,

    /// Longest path length explored.
    #[arg(long)]
    max_steps: Option<usize>,

    #[arg(long, value_enum, default_value = "text")]
    format: Format,

    /// Write output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Largest number of processes a PV program may have.
    #[arg(long, default_value_t = ditop_core::pv::MAX_PROCESSES)]
    max_processes: usize,

    /// Budget defaults as `max_paths=N,max_steps=M`.
    #[arg(long, env = "DITOP_BUDGET", hide = true)]
    budget_env: Option<String>,
}

fn parse_budget(text: &str) -> Result<BudgetSpec, CliError> {
    let mut spec = BudgetSpec { max_paths: None, max_steps: None };
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let bad = || CliError::input("BadBudget", format!("DITOP_BUDGET entry `{part}` is not key=number"));
        let (key, value) = part.split_once('=').ok_or_else(bad)?;
        let n: usize = value.trim().parse().map_err(|_| bad())?;
        match key.trim() {
            "max_paths" => spec.max_paths = Some(n),
            "max_steps" => spec.max_steps = Some(n),
            _ => return Err(bad()),
        }
    }
    Ok(spec)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let result = (|| {
        let env_budget = args.budget_env.as_deref().map(parse_budget).transpose()?;
        let req = Request {
            scene: args.scene.clone(),
            tasks: args.tasks.clone(),
            max_paths: args.max_paths,
            max_steps: args.max_steps,
            env_budget,
            format: args.format,
            max_processes: args.max_processes,
        };
        let outcome = run(&req)?;
        match &args.out {
            Some(path) => std::fs::write(path, &outcome.output)
                .map_err(|e| CliError::input("Io", format!("cannot write {}: {e}", path.display())))?,
            None => print!("{}", outcome.output),
        }
        Ok::<bool, CliError>(outcome.success)
    })();
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code as u8)
        }
    }
}
