//! `hamca` command-line driver.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use serde_json::json;

use crate::commands::{dispatch, Ctx, COMMANDS};
use crate::config::Format;
use crate::error::{CliError, Kind};
use crate::output::{sha256_hex, Manifest, OutDir};

#[derive(Parser, Debug)]
#[command(name = "hamca", version, about = "Exact Hamiltonian cellular automaton runs from a JSON config")]
struct Args {
    /// Run definition (JSON).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory; overrides `output.path`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for parallel sweeps.
    #[arg(long)]
    jobs: Option<usize>,
    /// Table format; overrides `output.format`.
    #[arg(long, value_enum)]
    format: Option<Format>,
}

fn run(args: Args) -> Result<(), CliError> {
    let started = Instant::now();
    let path = args
        .config
        .ok_or_else(|| CliError::new(Kind::Usage, "missing --config <path>"))?;
    let loaded = config::load(&path)?;
    let command = match loaded.config.command.as_deref().map(str::trim) {
        None | Some("") => {
            return Err(CliError::new(
                Kind::Usage,
                format!("config names no command; expected one of {}", COMMANDS.join(", ")),
            ))
        }
        Some(c) => c.to_string(),
    };
    if !COMMANDS.contains(&command.as_str()) {
        return Err(CliError::new(
            Kind::Usage,
            format!("unknown command {command:?}; expected one of {}", COMMANDS.join(", ")),
        ));
    }
    if let Some(jobs) = args.jobs {
        if jobs == 0 {
            return Err(CliError::new(Kind::Usage, "--jobs must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| CliError::new(Kind::Io, e.to_string()))?;
    }
    let seed = args.seed.or(loaded.config.seed).unwrap_or(0);
    let format = args.format.or(loaded.config.output.format).unwrap_or_default();
    let out_path = match (args.out, &loaded.config.output.path) {
        (Some(p), _) => p,
        (None, Some(p)) => loaded.resolve(p),
        (None, None) => PathBuf::from("out"),
    };
    let mut out = OutDir::create(out_path)?;
    let outcome = {
        let mut ctx = Ctx {
            cfg: &loaded,
            out: &mut out,
            seed,
            format,
        };
        dispatch(&command, &mut ctx)?
    };
    let timings = json!({
        "command": command,
        "total_s": started.elapsed().as_secs_f64(),
        "detail": outcome.timings,
    });
    out.write_untracked("timings.json", format!("{timings:#}\n").as_bytes())?;
    out.finish(Manifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        core_version: hamca::VERSION,
        command,
        seed,
        format,
        config_sha256: sha256_hex(&loaded.raw),
    })?;
    println!("{}", outcome.summary);
    match outcome.failure {
        Some(f) => Err(f),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .target(env_logger::Target::Stderr)
        .init();
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            let err = CliError::new(Kind::Usage, e.to_string().trim().to_string());
            eprintln!("{}", err.record());
            return ExitCode::from(err.kind.exit_code() as u8);
        }
    };
    match run(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.record());
            ExitCode::from(e.kind.exit_code() as u8)
        }
    }
}
