use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use otto_cli::output::{write_table, write_table_to};
use otto_cli::{load_spec, run_experiment, CliError, OutputFormat, Preset};

#[derive(Parser)]
#[command(
    name = "sim",
    version,
    about = "Finite-time quantum Otto engine with collisional reservoirs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the sweep described by a spec file.
    Run {
        spec: PathBuf,
        /// Worker threads; defaults to all cores.
        #[arg(long, short)]
        jobs: Option<usize>,
        /// Output file; overrides `output.path`. Without either, rows go to stdout.
        #[arg(long, short)]
        out: Option<PathBuf>,
        #[arg(long)]
        format: Option<OutputFormat>,
        /// Override a spec key, e.g. `--set engine.tau_w=8`.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// Check a spec file and print it fully resolved.
    Validate {
        spec: PathBuf,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// List the presets, or print one as a spec file.
    Preset {
        name: Option<Preset>,
        /// Print the preset's full spec (the default when a name is given).
        #[arg(long)]
        print: bool,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                CliError::Parse { .. } | CliError::Invalid { .. } | CliError::Override(_) => ExitCode::from(2),
                _ => ExitCode::FAILURE,
            }
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Run {
            spec,
            jobs,
            out,
            format,
            overrides,
        } => {
            let spec = load_spec(&spec, &overrides)?;
            let table = run_experiment(&spec, jobs)?;
            let format = format.unwrap_or(spec.output.format);
            match out.or_else(|| spec.output.path.clone()) {
                Some(path) => write_table_to(&table, format, &path)?,
                None => write_table(&table, format, io::stdout().lock())?,
            }
            let failed = table
                .rows
                .iter()
                .filter(|r| matches!(r.last(), Some(otto_cli::Cell::Text(_))))
                .count();
            eprintln!(
                "{}: {} rows, {} failed, {:.1} s",
                spec.preset,
                table.rows.len(),
                failed,
                table.meta["wall_time_s"].as_f64().unwrap_or(0.0)
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Validate { spec, overrides } => {
            let spec = load_spec(&spec, &overrides)?;
            print!("{}", spec.to_toml());
            Ok(ExitCode::SUCCESS)
        }
        Command::Preset { name: Some(p), .. } => {
            print!("{}", p.spec().to_toml());
            Ok(ExitCode::SUCCESS)
        }
        Command::Preset { name: None, print } => {
            let mut out = io::stdout().lock();
            for p in Preset::ALL {
                if print {
                    writeln!(out, "# {}\n{}", p.name(), p.spec().to_toml())
                } else {
                    writeln!(out, "{:<24} {}", p.name(), p.description())
                }
                .map_err(|e| CliError::Output(e.to_string()))?;
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}
