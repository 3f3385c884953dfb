//! `surftrap` command-line front end.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use surftrap::app::{self, Format, Output};
use surftrap::config::{Analysis, ExperimentConfig};
use surftrap::{ConstantsRegistry, Error};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Command {
    Report,
    Tables,
    Spectrum,
    Contour,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Text,
    Json,
}

/// Design and characterize electrostatic atom guides and traps above an atom mirror.
///
/// Exit codes: 0 ok, 1 configuration, 2 no trap, 3 numerics, 4 i/o.
/// Set SURFTRAP_CONSTANTS to a TOML file to override species constants.
#[derive(Debug, Parser)]
#[command(name = "surftrap", version)]
struct Cli {
    command: Command,
    /// Experiment description (TOML)
    #[arg(long)]
    config: PathBuf,
    /// Directory for output files; spectrum and contour default to the current directory
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    format: OutputFormat,
}

fn matches(command: Command, analysis: &Analysis) -> bool {
    matches!(
        (command, analysis),
        (Command::Report, Analysis::Report(_))
            | (Command::Tables, Analysis::Tables(_))
            | (Command::Spectrum, Analysis::Spectrum(_))
            | (Command::Contour, Analysis::Contour(_))
    )
}

fn write_files(dir: &Path, output: &Output) -> Result<(), Error> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    for (name, bytes) in &output.files {
        let path = dir.join(name);
        std::fs::write(&path, bytes).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<(), Error> {
    let config = ExperimentConfig::load(&cli.config)?;
    if !matches(cli.command, &config.analysis) {
        return Err(Error::Config(format!(
            "command `{:?}` does not match the analysis block in {}",
            cli.command,
            cli.config.display()
        )
        .to_lowercase()));
    }
    let registry = ConstantsRegistry::from_env()?;
    let format = match cli.format {
        OutputFormat::Text => Format::Text,
        OutputFormat::Json => Format::Json,
    };
    let output = app::run(&config, &registry, format)?;
    let dir = match (cli.command, &cli.out) {
        (_, Some(d)) => Some(d.clone()),
        (Command::Spectrum | Command::Contour, None) => Some(PathBuf::from(".")),
        _ => None,
    };
    if let Some(dir) = dir {
        write_files(&dir, &output)?;
    }
    print!("{}", output.stdout);
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { app::EXIT_CONFIG } else { app::EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(app::exit_code(&e) as u8)
        }
    }
}
