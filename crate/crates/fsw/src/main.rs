use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fsw::commands::{self, CliError, Context};
use fsw::config::load_config;

#[derive(Parser)]
#[command(
    name = "fsw",
    version,
    about = "Thermal model of friction stir welding"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Heat generation breakdown of the tool
    Heatgen(Common),
    /// Transient temperature field of the weld
    Simulate(Common),
    /// Tracer streamlines around the probe
    Flow(Common),
    /// Fit model parameters to measured traces
    Calibrate(Common),
}

#[derive(Args)]
struct Common {
    /// Run configuration file
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Output directory (overrides the config)
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Seed for randomised starting points
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    /// Log progress to standard error
    #[arg(long)]
    verbose: bool,
}

fn run(command: &Command, args: &Common) -> Result<String, CliError> {
    let config = load_config(&args.config)?;
    let ctx = Context {
        out: args
            .out
            .clone()
            .unwrap_or_else(|| config.output.directory.clone()),
        config_dir: args.config.parent().map(PathBuf::from).unwrap_or_default(),
        seed: args.seed,
        config,
    };
    match command {
        Command::Heatgen(_) => commands::heatgen(&ctx),
        Command::Simulate(_) => commands::simulate(&ctx),
        Command::Flow(_) => commands::flow(&ctx),
        Command::Calibrate(_) => commands::calibrate(&ctx),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let args = match &cli.command {
        Command::Heatgen(a) | Command::Simulate(a) | Command::Flow(a) | Command::Calibrate(a) => a,
    };
    env_logger::Builder::new()
        .filter_level(if args.verbose {
            log::LevelFilter::Info
        } else {
            log::LevelFilter::Warn
        })
        .format_timestamp(None)
        .init();

    match run(&cli.command, args) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
