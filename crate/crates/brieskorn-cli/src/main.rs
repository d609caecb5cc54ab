use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use brieskorn_cli::config::{self, Overrides};
use brieskorn_cli::report::{self, Format};
use brieskorn_cli::suites;

/// Batch verifier for the lattice-deformation library: reads a JSON
/// run configuration, executes the named suites, and writes a report.
#[derive(Parser)]
#[command(name = "verify", version)]
struct Cli {
    /// Path to the JSON run configuration.
    #[arg(long)]
    config: PathBuf,

    /// Suites to run, overriding the config's list. May repeat.
    #[arg(long = "suite")]
    suites: Vec<String>,

    /// Report format.
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,

    /// Random seed, overriding the config's seed.
    #[arg(long)]
    seed: Option<u64>,

    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Markdown,
}

impl From<FormatArg> for Format {
    fn from(value: FormatArg) -> Format {
        match value {
            FormatArg::Json => Format::Json,
            FormatArg::Markdown => Format::Markdown,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    let text = match fs::read_to_string(&cli.config) {
        Ok(text) => text,
        Err(err) => {
            eprintln!("error: cannot read {}: {err}", cli.config.display());
            return ExitCode::from(2);
        }
    };

    let raw = match config::parse_document(&text) {
        Ok(raw) => raw,
        Err(err) => {
            eprintln!("error: {err}");
            return ExitCode::from(2);
        }
    };

    let mut overrides = match Overrides::from_env() {
        Ok(overrides) => overrides,
        Err(err) => {
            eprintln!("error: {err}");
            return ExitCode::from(2);
        }
    };
    overrides.suites = cli.suites.clone();
    overrides.seed = cli.seed;

    let cfg = match config::resolve(raw, &overrides) {
        Ok(cfg) => cfg,
        Err(err) => {
            eprintln!("error: {err}");
            return ExitCode::from(2);
        }
    };

    let document = suites::run(&cfg);
    let body = report::emit(&document, cli.format.into());

    match &cli.out {
        Some(path) => {
            if let Err(err) = fs::write(path, &body) {
                eprintln!("error: cannot write {}: {err}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{body}"),
    }

    if document.all_passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
