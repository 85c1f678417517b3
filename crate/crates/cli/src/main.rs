use clap::{Args, Parser, Subcommand};
use seamless_cli::{run_document, sweep_document, CliError, CliResult, Format};
use seamless_core::simmodel::DesignKind;
use std::path::PathBuf;
use std::process::ExitCode;

/// Simulate two-stage adaptive seamless designs with treatment or subgroup selection.
#[derive(Parser)]
#[command(name = "seamless", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Treatment selection designs.
    Treatsel {
        #[command(subcommand)]
        action: Action,
    },
    /// Subgroup selection designs.
    Subpop {
        #[command(subcommand)]
        action: Action,
    },
    /// Run the [sweep] section of a scenario.
    Sweep(Common),
}

#[derive(Subcommand)]
enum Action {
    /// Simulate one scenario.
    Run(Common),
}

#[derive(Args)]
struct Common {
    /// Scenario document (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Write the output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
    /// Worker threads; results do not depend on it.
    #[arg(long, default_value_t = default_threads())]
    threads: usize,
}

fn default_threads() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn read(path: &PathBuf) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn emit(text: &str, out: &Option<PathBuf>) -> CliResult<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn execute(cli: Cli) -> CliResult<()> {
    let (design, common) = match cli.command {
        Command::Treatsel { action: Action::Run(c) } => (Some(DesignKind::TreatmentSelection), c),
        Command::Subpop { action: Action::Run(c) } => (Some(DesignKind::SubgroupSelection), c),
        Command::Sweep(c) => (None, c),
    };
    let text = read(&common.config)?;
    let output = match design {
        Some(d) => run_document(&text, d, common.format, common.threads)?,
        None => sweep_document(&text, common.format, common.threads)?,
    };
    emit(&output, &common.out)
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
