use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use qflow::experiments::{parse_config, run_scenario, ConfigOverrides, ScenarioId};
use qflow::{Error, ErrorKind};

/// Run a simulation scenario and write its CSV series.
#[derive(Debug, Parser)]
#[command(name = "simulate", version)]
struct Args {
    /// fig2, fig3, sm_inequality, sm_sweep_je, sm_sweep_jse, sm_mi_time,
    /// sm_discord or custom
    scenario: String,

    /// key = value config file; flags take precedence
    #[arg(long)]
    config: Option<PathBuf>,

    /// qubits per chain
    #[arg(long)]
    n: Option<usize>,

    /// coupling ratio J_SE / J_E
    #[arg(long)]
    ratio: Option<f64>,

    /// final time in units of 1/J_E
    #[arg(long)]
    tmax: Option<f64>,

    /// number of time steps
    #[arg(long)]
    steps: Option<usize>,

    /// output directory
    #[arg(long)]
    out: Option<PathBuf>,

    /// worker threads
    #[arg(long, env = "SIMULATE_THREADS")]
    threads: Option<usize>,
}

fn exit_code(err: &Error) -> u8 {
    match err.kind() {
        ErrorKind::Config => 1,
        ErrorKind::Physics => 2,
        ErrorKind::Io => 3,
    }
}

fn run(args: Args) -> Result<(), Error> {
    let text = match &args.config {
        Some(path) => Some(std::fs::read_to_string(path).map_err(|e| {
            Error::Config(format!("cannot read config {}: {e}", path.display()))
        })?),
        None => None,
    };
    let flags = ConfigOverrides {
        scenario: Some(args.scenario.parse::<ScenarioId>()?),
        n: args.n,
        ratio: args.ratio,
        t_max: args.tmax,
        n_steps: args.steps,
        out_dir: args.out,
        threads: args.threads,
        ..Default::default()
    };
    let cfg = parse_config(text.as_deref(), flags)?;
    if let Some(threads) = cfg.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    }
    for path in run_scenario(&cfg)? {
        println!("{}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("simulate: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
