use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use cliquet::cli::{run, Command, GridSpec, OutputFormat, RunConfig, RunSpec};

/// Cliquet option pricing under a jump-diffusion Levy model.
#[derive(Parser)]
#[command(name = "cliquet", version, about)]
struct Args {
    /// Path to the JSON run configuration.
    #[arg(long, global = true, default_value = "cliquet.json")]
    config: String,

    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = OutputArg::Json)]
    output: OutputArg,

    /// One-parameter sweep, `param=start:stop:steps`.
    #[arg(long, global = true)]
    grid: Option<String>,

    /// Override the Monte Carlo seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Override the Monte Carlo path count.
    #[arg(long, global = true)]
    paths: Option<u64>,

    #[command(subcommand)]
    command: CommandArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputArg {
    Json,
    Csv,
}

#[derive(Subcommand, Clone, Copy)]
enum CommandArg {
    /// Price the contract by both semi-analytic routes.
    Price,
    /// Rho, Delta, Gamma and Vega by every method.
    Greeks,
    /// Density of the driving process over a grid.
    Density,
    /// Distribution function of the driving process over a grid.
    Cdf,
    /// Distribution of the per-period simple return.
    Returns,
    /// Drawdown probabilities over a percentile grid.
    Drawdown,
    /// Monte Carlo estimates with analytic references.
    Mc,
    /// Cross-method and Monte Carlo invariant suite.
    Validate,
}

impl From<CommandArg> for Command {
    fn from(c: CommandArg) -> Self {
        match c {
            CommandArg::Price => Command::Price,
            CommandArg::Greeks => Command::Greeks,
            CommandArg::Density => Command::Density,
            CommandArg::Cdf => Command::Cdf,
            CommandArg::Returns => Command::Returns,
            CommandArg::Drawdown => Command::Drawdown,
            CommandArg::Mc => Command::Mc,
            CommandArg::Validate => Command::Validate,
        }
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(&args) {
        Ok(code) => code,
        Err(e) => {
            let record = serde_json::json!({
                "error": { "kind": error_kind(&e), "message": e.to_string() }
            });
            eprintln!("{record}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(args: &Args) -> cliquet::Result<ExitCode> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| cliquet::Error::Config(format!("{}: {e}", args.config)))?;
    let spec = RunSpec {
        command: args.command.into(),
        config: RunConfig::from_json(&text)?,
        output: match args.output {
            OutputArg::Json => OutputFormat::Json,
            OutputArg::Csv => OutputFormat::Csv,
        },
        grid: args.grid.as_deref().map(GridSpec::parse).transpose()?,
        seed_override: args.seed,
        paths_override: args.paths,
    };
    let report = run(&spec)?;
    println!("{}", report.render(spec.output));
    if report.failed_checks > 0 {
        let record = serde_json::json!({
            "error": {
                "kind": "validation",
                "message": format!("{} validation check(s) failed", report.failed_checks)
            }
        });
        eprintln!("{record}");
        return Ok(ExitCode::from(4));
    }
    Ok(ExitCode::SUCCESS)
}

fn error_kind(e: &cliquet::Error) -> &'static str {
    match e.exit_code() {
        2 => "config",
        3 => "numerical",
        _ => "internal",
    }
}
