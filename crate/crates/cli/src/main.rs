use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lambda_fwm::config::{load_run_config, Format, Solver};
use lambda_fwm::figures::{self, Figure};
use lambda_fwm::output::{render, write_atomic};
use lambda_fwm::run::execute;
use lambda_fwm::sweep::{load_sweep_spec, run_sweep, thread_limit};
use lambda_fwm::validate::{run_suite, ValidateOptions};
use lambda_fwm::{CliError, CliResult};
use lambda_fwm_core::analytic::optimal_distance;
use lambda_fwm_core::model::spectral_response;

#[derive(Parser)]
#[command(name = "lambda-fwm", version, about = "Pulse propagation and four-wave mixing in a double-lambda medium")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct OutputArgs {
    /// Directory for output files; stdout when omitted (run only).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Comma-separated subset of spectral,analytic,oracle.
    #[arg(long)]
    solvers: Option<String>,
    /// Record the wall-clock time in the metadata.
    #[arg(long)]
    stamp: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run one configuration.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Write the dataset of a reference figure.
    Figure {
        #[arg(value_enum)]
        id: Figure,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run a parameter sweep.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run the invariant suite.
    Validate {
        /// Skip the time-domain cross-checks.
        #[arg(long)]
        skip_oracle: bool,
    },
    /// Print the first constructive-beat distance.
    OptimalZ {
        #[arg(long)]
        config: PathBuf,
    },
}

fn parse_solvers(list: &str) -> CliResult<Vec<Solver>> {
    let mut solvers = Vec::new();
    for name in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let solver = <Solver as clap::ValueEnum>::from_str(name, true)
            .map_err(|_| CliError::config("solvers", format!("unknown solver \"{name}\"")))?;
        solvers.push(solver);
    }
    if solvers.is_empty() {
        return Err(CliError::config("solvers", "at least one solver must be selected"));
    }
    Ok(solvers)
}

fn require_out(out: &Option<PathBuf>) -> CliResult<&Path> {
    out.as_deref().ok_or_else(|| CliError::config("--out", "an output directory is required"))
}

fn run(config: &Path, args: &OutputArgs) -> CliResult<()> {
    let mut cfg = load_run_config(config)?;
    if let Some(list) = &args.solvers {
        cfg.solvers = parse_solvers(list)?;
    }
    let configured = cfg.output.clone().unwrap_or_default();
    let format = args.format.unwrap_or(configured.format);
    if let Some(out) = cfg.output.as_mut() {
        out.format = format;
    }
    let resolved = cfg.resolve()?;
    let dataset = execute(&resolved, args.stamp)?;
    let text = render(&dataset, format)?;
    match &args.out {
        Some(dir) => {
            let name = configured
                .path
                .as_ref()
                .and_then(|p| p.file_name())
                .map(PathBuf::from)
                .unwrap_or_else(|| PathBuf::from(format!("run.{}", format.extension())));
            let path = dir.join(name);
            write_atomic(&path, &text)?;
            log::info!("wrote {}", path.display());
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn figure(id: Figure, args: &OutputArgs) -> CliResult<()> {
    let dir = require_out(&args.out)?;
    let solvers = match &args.solvers {
        Some(list) => parse_solvers(list)?,
        None => vec![Solver::Spectral, Solver::Analytic],
    };
    let data = figures::figure_data(id, &solvers, args.stamp)?;
    for (name, text) in figures::render(&data, args.format.unwrap_or_default())? {
        write_atomic(&dir.join(&name), &text)?;
        println!("{}", dir.join(name).display());
    }
    Ok(())
}

fn sweep(config: &Path, args: &OutputArgs) -> CliResult<()> {
    let dir = require_out(&args.out)?;
    let mut spec = load_sweep_spec(config)?;
    if let Some(list) = &args.solvers {
        spec.base.solvers = parse_solvers(list)?;
    }
    let index = run_sweep(&spec, dir, args.format.unwrap_or_default(), args.stamp, thread_limit()?)?;
    println!("{}", index.display());
    Ok(())
}

fn validate(skip_oracle: bool) -> CliResult<()> {
    let results = run_suite(spectral_response, ValidateOptions { oracle: !skip_oracle });
    for r in &results {
        println!("{}", serde_json::to_string(r).expect("plain data always serializes"));
    }
    let failed: Vec<&str> = results.iter().filter(|r| !r.passed).map(|r| r.name).collect();
    let summary = serde_json::json!({
        "passed": results.len() - failed.len(),
        "failed": failed.len(),
        "failures": failed,
    });
    println!("{summary}");
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Validation(failed.join(", ")))
    }
}

fn optimal_z(config: &Path) -> CliResult<()> {
    let cfg = load_run_config(config)?;
    let params = cfg.medium.params()?;
    let z = optimal_distance(&params)?;
    println!("z_over_c_tau = {z}");
    println!("z_cm = {}", z * cfg.c_tau_cm);
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run { config, output } => run(config, output),
        Command::Figure { id, output } => figure(*id, output),
        Command::Sweep { config, output } => sweep(config, output),
        Command::Validate { skip_oracle } => validate(*skip_oracle),
        Command::OptimalZ { config } => optimal_z(config),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
