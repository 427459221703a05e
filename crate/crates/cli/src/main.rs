use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use photonctx_cli::config::{ConfigIssue, Origin};
use photonctx_cli::{execute, exit, parse_config, parse_override, CliError, ConfigError};

/// Single-photon test of noncontextuality: exact checks and Monte Carlo runs.
///
/// Exit status: 0 success, 1 I/O or internal error, 2 configuration error,
/// 3 no detected counts in a context.
#[derive(Debug, Parser)]
#[command(name = "photonctx", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// Configuration file with one `key = value` per line.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Override a configuration key; repeatable, applied after the file.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE", value_parser = parse_override)]
    set: Vec<(String, String)>,
    /// Output format of `run` and `sweep`.
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,
    /// Write the report to a file instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Cmd {
    /// Exact detector probabilities, eigenstate relations and the ideal left-hand side.
    Ideal,
    /// Noncontextual and quantum maxima with the assignment table.
    Bounds,
    /// All sixteen value assignments with their constraints and detectors.
    NchvEnumerate,
    /// One Monte Carlo run of both measurement contexts.
    Run,
    /// Monte Carlo runs over the values of one imperfection parameter.
    Sweep,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Table,
    Csv,
}

impl Cmd {
    fn name(self) -> &'static str {
        match self {
            Cmd::Ideal => "ideal",
            Cmd::Bounds => "bounds",
            Cmd::NchvEnumerate => "nchv-enumerate",
            Cmd::Run => "run",
            Cmd::Sweep => "sweep",
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let text = match &cli.config {
        Some(path) => std::fs::read_to_string(path).map_err(|e| ConfigError {
            issues: vec![ConfigIssue {
                origin: Origin::Config,
                key: None,
                message: format!("cannot read {}: {e}", path.display()),
            }],
        })?,
        None => String::new(),
    };
    let mut overrides = cli.set;
    overrides.push(("command".into(), cli.command.name().into()));
    if let Some(f) = cli.format {
        let f = match f {
            FormatArg::Table => "table",
            FormatArg::Csv => "csv",
        };
        overrides.push(("format".into(), f.into()));
    }
    if let Some(out) = &cli.out {
        overrides.push(("out".into(), out.display().to_string()));
    }
    let cfg = parse_config(&text, &overrides)?;
    let report = execute(&cfg)?;
    match &cfg.out {
        Some(path) => std::fs::write(path, report)
            .map_err(|source| CliError::Io { context: format!("writing {}", path.display()), source }),
        None => {
            print!("{report}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::from(exit::OK),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
