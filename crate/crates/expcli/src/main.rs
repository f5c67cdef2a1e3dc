use clap::{Parser, Subcommand};
use expcli::{RunConfig, RunError, EXPERIMENTS};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, Parser)]
#[command(name = "causalsim", version, about = "Seeded causal-misspecification experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one experiment and write its report files.
    Run {
        experiment: String,
        /// Overrides the config file's seed (default 0).
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides the config file's sample size.
        #[arg(long)]
        n: Option<usize>,
        /// Output directory for this run.
        #[arg(long)]
        out: PathBuf,
        /// TOML file with `seed`, `n` and a `[params]` table.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// List registered experiments.
    List,
}

fn run(cli: Cli) -> Result<(), RunError> {
    match cli.command {
        Command::List => {
            for e in EXPERIMENTS {
                println!("{:<18} n={:<6} {}", e.name, e.default_n, e.description);
            }
            Ok(())
        }
        Command::Run { experiment, seed, n, out, config } => {
            let mut cfg = match config {
                Some(path) => RunConfig::from_file(&path)?,
                None => RunConfig::default(),
            };
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if n.is_some() {
                cfg.n = n;
            }
            for path in expcli::run_to_dir(&experiment, &cfg, &out)? {
                println!("{}", path.display());
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let payload = serde_json::json!({ "error": "UsageError", "message": e.render().to_string().trim_end() });
            eprintln!("{payload}");
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
