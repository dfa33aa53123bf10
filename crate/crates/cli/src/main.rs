use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cvqkd_cli::{cmd_buildcode, cmd_compare, cmd_fer, cmd_window, CliConfig, CliError, Format, Output, RunOptions};

#[derive(Parser)]
#[command(name = "cvqkd", version, about = "CV-QKD key-rate analysis and reconciliation benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed; overrides the one in the configuration.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file, or directory for commands with several outputs. Defaults to stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Worker threads (defaults to the number of cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Allow codes with block lengths below the production range.
    #[arg(long, global = true)]
    test_scale: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Distance window of each code rate.
    Window,
    /// Key rates of the adaptation methods over distance, plus the reference curve.
    Compare,
    /// Frame error rate against SNR.
    Fer,
    /// Build a rate-adaptive code and write its container.
    Buildcode,
}

fn write_outputs(outputs: &[Output], out: Option<&Path>) -> Result<(), CliError> {
    match out {
        None => {
            use std::io::Write;
            let first = outputs.first().ok_or_else(|| CliError::Runtime("command produced no output".into()))?;
            std::io::stdout().write_all(&first.bytes)?;
        }
        Some(path) if outputs.len() == 1 => std::fs::write(path, &outputs[0].bytes)?,
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            for o in outputs {
                std::fs::write(dir.join(&o.name), &o.bytes)?;
            }
        }
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<(), CliError> {
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build_global()
            .map_err(|e| CliError::Runtime(e.to_string()))?;
    }
    let path = cli.config.as_ref().ok_or_else(|| CliError::Config("--config is required".into()))?;
    let cfg = CliConfig::load(path)?;
    let opts = RunOptions { seed: cli.seed, format: cli.format, test_scale: cli.test_scale };
    let outputs = match cli.command {
        Command::Window => cmd_window(&cfg, &opts)?,
        Command::Compare => cmd_compare(&cfg, &opts)?,
        Command::Fer => cmd_fer(&cfg, &opts)?,
        Command::Buildcode => {
            if cli.out.is_none() {
                return Err(CliError::Config("buildcode needs --out".into()));
            }
            cmd_buildcode(&cfg, &opts)?
        }
    };
    write_outputs(&outputs, cli.out.as_deref())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
