use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use gunrock_cli::commands::{self, Format};
use gunrock_core::{Engine, EngineConfig};

#[derive(Parser)]
#[command(name = "gunrock", version, about = "Open-domain conversational engine")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the HTTP chat API.
    Serve {
        /// Data directory; the bundled data is used when absent.
        #[arg(long, env = "GUNROCK_CONFIG")]
        config: Option<PathBuf>,
        /// JSONL conversation log to append to.
        #[arg(long)]
        log: Option<PathBuf>,
        #[arg(long, env = "GUNROCK_PORT", default_value_t = 8080)]
        port: u16,
        /// JSON file with per-user attributes; kept in memory when absent.
        #[arg(long)]
        users: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Phonetically correct timed-token utterances against gazetteers.
    Correct {
        #[arg(long, required = true, num_args = 1..)]
        kb: Vec<PathBuf>,
        /// JSONL, one token array per line.
        #[arg(long)]
        input: PathBuf,
        #[arg(long, env = "GUNROCK_CONFIG")]
        config: Option<PathBuf>,
    },
    /// Engagement regressions over a conversation log.
    Analyze {
        #[arg(long)]
        log: PathBuf,
        #[arg(long, default_value_t = 3)]
        min_turns: u32,
        /// Directory for report.json, report.txt and points CSVs.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Write a seeded synthetic conversation log.
    Synth {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 2000)]
        conversations: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Serve { config, log, port, users, seed } => {
            let engine = Engine::new(EngineConfig {
                data: commands::data_source(config.as_deref()),
                log_path: log,
                user_store: users,
                seed,
                ..Default::default()
            })?;
            tokio::runtime::Runtime::new()?.block_on(gunrock_cli::server::serve(engine, port))
        }
        Command::Correct { kb, input, config } => {
            let stdout = std::io::stdout();
            let n = commands::correct(&kb, &input, config.as_deref(), &mut stdout.lock())?;
            log::info!("corrected {n} utterances");
            Ok(())
        }
        Command::Analyze { log, min_turns, out, format } => {
            let report = commands::analyze(&log, min_turns, out.as_deref())?;
            print!("{}", commands::render(&report, format));
            Ok(())
        }
        Command::Synth { out, conversations, seed } => {
            println!("{}", commands::synth(&out, conversations, seed)?);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
