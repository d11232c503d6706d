use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use urysohn::experiment::{self, ExperimentConfig, ExperimentError, OutputFormat};
use urysohn::problems;

const EXIT_CONFIG_ERROR: u8 = 2;
const EXIT_SOLVER_ERROR: u8 = 3;

#[derive(Parser)]
#[command(
    name = "urysohn",
    about = "Convergence studies for the discrete modified projection method",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a convergence experiment from a preset or a JSON config file
    Run(RunArgs),
    /// List the built-in experiment presets and problems
    ListPresets,
}

#[derive(Args)]
struct RunArgs {
    /// Path to a JSON experiment configuration
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    config: Option<PathBuf>,
    /// Name of a built-in configuration (see list-presets)
    #[arg(long)]
    preset: Option<String>,
    /// Write the report here instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
    /// Override the configured output format
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Numeric precision of the report cells
    #[arg(long, value_enum, default_value_t = PrecisionArg::Table)]
    precision: PrecisionArg,
}

#[derive(Copy, Clone, ValueEnum)]
enum FormatArg {
    Csv,
    Markdown,
}

impl From<FormatArg> for OutputFormat {
    fn from(value: FormatArg) -> Self {
        match value {
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Markdown => OutputFormat::Markdown,
        }
    }
}

#[derive(Copy, Clone, PartialEq, ValueEnum)]
enum PrecisionArg {
    /// Scientific notation with three significant digits
    Table,
    /// Full round-trip precision
    Full,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run(args) => run(args),
        Command::ListPresets => {
            println!("presets:");
            for name in experiment::PRESETS {
                println!("  {name}");
            }
            println!("problems:");
            for name in problems::REGISTRY {
                println!("  {name}");
            }
            ExitCode::SUCCESS
        }
    }
}

fn run(args: RunArgs) -> ExitCode {
    let config = match load_config(&args) {
        Ok(config) => config,
        Err(message) => {
            eprintln!("error: {message}");
            return ExitCode::from(EXIT_CONFIG_ERROR);
        }
    };
    let report = match experiment::run_experiment(&config) {
        Ok(report) => report,
        Err(err @ ExperimentError::Solve { .. }) => {
            eprintln!("error: {err}");
            return ExitCode::from(EXIT_SOLVER_ERROR);
        }
        Err(err) => {
            eprintln!("error: {err}");
            return ExitCode::from(EXIT_CONFIG_ERROR);
        }
    };
    let format = args
        .format
        .map(OutputFormat::from)
        .unwrap_or(config.output_format);
    let text = report.format(format, args.precision == PrecisionArg::Full);
    match args.output {
        Some(path) => {
            if let Err(err) = std::fs::write(&path, text) {
                eprintln!("error: cannot write {}: {err}", path.display());
                return ExitCode::FAILURE;
            }
        }
        None => print!("{text}"),
    }
    ExitCode::SUCCESS
}

fn load_config(args: &RunArgs) -> Result<ExperimentConfig, String> {
    if let Some(name) = &args.preset {
        return experiment::preset(name).ok_or_else(|| {
            format!(
                "unknown preset '{name}' (known: {})",
                experiment::PRESETS.join(", ")
            )
        });
    }
    let path = args.config.as_ref().expect("clap enforces config|preset");
    let text = std::fs::read_to_string(path)
        .map_err(|err| format!("cannot read {}: {err}", path.display()))?;
    ExperimentConfig::from_json(&text).map_err(|err| err.to_string())
}
