use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

use swingsim::output::{summary, write_outputs, Format};
use swingsim::scenario::{run_scenario, Command, ScenarioSpec, PRESETS};
use swingsim::Error;

const EXIT_CONFIG: u8 = 1;
const EXIT_ACCEPTANCE: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

#[derive(Parser)]
#[command(name = "swingsim", version, about = "Improved swing equation simulator")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Integrate a preset or configured scenario.
    Run(Common),
    /// Sweep a grid of initial states and check it against the analytic region of attraction.
    Sweep(Common),
    /// Sample the boundary of a Lyapunov level set.
    Levelset(Common),
    /// Print the closed-form constants as JSON.
    Constants(Common),
    /// List the built-in presets.
    Presets,
}

#[derive(Args)]
struct Common {
    /// Built-in preset name.
    preset: Option<String>,
    /// Scenario document (JSON).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Data file format.
    #[arg(long, default_value = "csv", value_parser = ["csv", "json"])]
    format: String,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidConfig(_) | Error::InvalidParams(_) | Error::ShapeMismatch(_) => EXIT_CONFIG,
        _ => EXIT_NUMERICAL,
    }
}

fn load(c: &Common) -> Result<ScenarioSpec, Error> {
    match (&c.preset, &c.config) {
        (Some(name), None) => ScenarioSpec::preset(name),
        (None, Some(path)) => ScenarioSpec::from_file(path),
        _ => Err(Error::InvalidConfig("give a preset name or --config FILE".into())),
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var("SWINGSIM_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

fn execute(command: Command, c: &Common) -> Result<u8, Error> {
    let spec = load(c)?;
    let format: Format = c.format.parse()?;
    let result = run_scenario(&spec, command)?;
    if command == Command::Constants {
        let report = result.constants.as_ref().expect("constants command fills the report");
        println!("{}", serde_json::to_string_pretty(report).map_err(std::io::Error::from)?);
        return Ok(0);
    }
    let written = write_outputs(&spec, &result, &c.out, format)?;
    print!("{}", summary(&spec, &result));
    for path in written {
        println!("  wrote {}", path.display());
    }
    let violations = result.basin_violations();
    if violations > 0 {
        eprintln!("error: {violations} in-set cells did not converge to the equilibrium");
        return Ok(EXIT_ACCEPTANCE);
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    let (command, common) = match &cli.command {
        Cmd::Run(c) => (Command::Run, c),
        Cmd::Sweep(c) => (Command::Sweep, c),
        Cmd::Levelset(c) => (Command::LevelSet, c),
        Cmd::Constants(c) => (Command::Constants, c),
        Cmd::Presets => {
            for p in PRESETS {
                println!("{p}");
            }
            return ExitCode::SUCCESS;
        }
    };
    match execute(command, common) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
