use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use conclique_cli::{cmd_benchmark, cmd_color, cmd_gof, cmd_simulate, CliError, Options};

#[derive(Parser)]
#[command(
    name = "conclique",
    version,
    about = "Conclique-based Gibbs sampling for Markov random fields"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Find a conclique cover and write it as JSON.
    Color(Common),
    /// Run a chain and write samples plus a timing sidecar.
    Simulate(Common),
    /// Time both samplers over a grid of sizes and chain lengths.
    Benchmark(Common),
    /// Monte Carlo goodness-of-fit p-value for an observed field.
    Gof(Common),
}

#[derive(Args)]
struct Common {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Overrides the seed in the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for large conclique updates. Output does not depend on it.
    #[arg(long, env = "CONCLIQUE_THREADS")]
    threads: Option<usize>,
    /// Overrides the output directory in the config.
    #[arg(long)]
    output: Option<PathBuf>,
}

impl Common {
    fn options(self) -> Result<Options, CliError> {
        let threads = match self.threads {
            Some(0) => return Err(CliError::Config("--threads must be at least 1".into())),
            Some(t) => t,
            None => std::thread::available_parallelism().map_or(1, |n| n.get()),
        };
        Ok(Options {
            config: self.config,
            seed: self.seed,
            threads,
            output: self.output,
        })
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let result = match cli.command {
        Command::Color(c) => c.options().and_then(|o| cmd_color(&o, &mut out).map(drop)),
        Command::Simulate(c) => c
            .options()
            .and_then(|o| cmd_simulate(&o, &mut out).map(drop)),
        Command::Benchmark(c) => c
            .options()
            .and_then(|o| cmd_benchmark(&o, &mut out).map(drop)),
        Command::Gof(c) => c.options().and_then(|o| cmd_gof(&o, &mut out).map(drop)),
    };
    let _ = out.flush();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            log::debug!("{e:?}");
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
