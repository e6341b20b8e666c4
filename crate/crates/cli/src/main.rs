mod commands;
mod failure;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::Run;
use failure::Failure;
use manifest::Context;

/// Infer campus friendship networks from co-occurrence records and relate
/// them to daily behaviour.
#[derive(Debug, Parser)]
#[command(name = "campus-ties", version)]
struct Cli {
    /// Worker threads; defaults to every core.
    #[arg(long, global = true, env = "CAMPUS_TIES_THREADS")]
    threads: Option<usize>,
    /// Directory for reports and the run manifest.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    #[command(flatten)]
    Run(Run),
    /// Repeat a recorded run and check that it reproduces the same bytes.
    Rerun {
        /// Manifest written by an earlier run.
        #[arg(long)]
        manifest: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            f.exit_code()
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.threads {
        Some(0) => return Err(Failure::Usage("--threads must be at least 1".into())),
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .map_err(|e| Failure::Usage(format!("cannot start {k} threads: {e}")))?,
        None => {}
    }
    match cli.command {
        Command::Run(run) => {
            let mut ctx = Context::new(cli.out);
            let stdout = run.execute(&mut ctx)?;
            print!("{stdout}");
            ctx.finish(&run)?;
            Ok(())
        }
        Command::Rerun { manifest: path } => {
            let recorded = manifest::load(&path)?;
            manifest::check_inputs(&recorded)?;
            let out = cli.out.unwrap_or_else(|| {
                path.parent()
                    .map(|p| p.join("rerun"))
                    .unwrap_or_else(|| PathBuf::from("rerun"))
            });
            let mut ctx = Context::new(Some(out.clone()));
            recorded.run.execute(&mut ctx)?;
            let fresh = ctx.finish(&recorded.run)?.expect("output directory is set");
            let diff = manifest::differing_outputs(&recorded, &fresh);
            if diff.is_empty() {
                println!(
                    "reproduced {} outputs in {}",
                    fresh.outputs.len(),
                    out.display()
                );
                Ok(())
            } else {
                Err(Failure::Mismatch(format!(
                    "outputs differ from the recorded run: {}",
                    diff.join(", ")
                )))
            }
        }
    }
}
