use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use samweb::{emit, exit, load_config, run, Format, RayonExecutor};

#[derive(Parser)]
#[command(name = "samweb", version, about = "Curvature, rank and closure checks for Samuelson webs")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the commands of a job file.
    Analyze {
        config: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: FormatArg,
        /// Directory for CSV polylines of traced curves.
        #[arg(long)]
        plot_dir: Option<PathBuf>,
        /// Overrides the seed in the job file.
        #[arg(long)]
        seed: Option<u64>,
        /// Write the report here instead of standard output.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Worker threads; 0 picks one per core.
        #[arg(long, default_value_t = 0)]
        threads: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let Cmd::Analyze {
        config,
        format,
        plot_dir,
        seed,
        output,
        threads,
    } = cli.command;
    let mut job = match load_config(&config) {
        Ok(job) => job,
        Err(e) => {
            eprintln!("samweb: {}: {e}", config.display());
            return ExitCode::from(exit::CONFIG as u8);
        }
    };
    if let Some(seed) = seed {
        job.seed = seed;
    }
    let exec = match RayonExecutor::new(threads) {
        Ok(exec) => exec,
        Err(e) => {
            eprintln!("samweb: cannot start worker threads: {e}");
            return ExitCode::from(exit::RUNTIME as u8);
        }
    };
    let out = run(&job, &exec);
    let format = match format {
        FormatArg::Json => Format::Json,
        FormatArg::Text => Format::Text,
    };
    if let Err(e) = emit(&out, format, output.as_deref(), plot_dir.as_deref()) {
        eprintln!("samweb: {e}");
        return ExitCode::from(exit::RUNTIME as u8);
    }
    let failed = out.report.failed_commands();
    if failed > 0 {
        eprintln!("samweb: {failed} command(s) failed");
        return ExitCode::from(exit::RUNTIME as u8);
    }
    ExitCode::from(exit::OK as u8)
}
