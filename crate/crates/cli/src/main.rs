mod args;
mod config;
mod run;

use clap::Parser;

use args::{Cli, Command};
use config::ConfigFile;
use run::Invocation;

/// CLI failure carrying its exit code: 1 for validation problems,
/// 2 for numerical failures.
#[derive(Debug)]
pub struct CliError {
    message: String,
    exit_code: i32,
}

impl CliError {
    pub fn validation(message: String) -> Self {
        Self { message, exit_code: 1 }
    }

    pub fn numerical(message: String) -> Self {
        Self { message, exit_code: 2 }
    }
}

impl From<susyzeta::Error> for CliError {
    fn from(e: susyzeta::Error) -> Self {
        if e.is_numerical() {
            Self::numerical(e.to_string())
        } else {
            Self::validation(e.to_string())
        }
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help / --version are not errors
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    match execute(cli) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {}", e.message);
            std::process::exit(e.exit_code);
        }
    }
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let file = ConfigFile::load(cli.config.as_deref())?;
    let outdir = cli
        .outdir
        .or_else(|| file.global.outdir.clone())
        .unwrap_or_else(|| "runs".into());
    let label = cli
        .label
        .or_else(|| file.global.label.clone())
        .unwrap_or_else(|| chrono::Utc::now().format("%Y%m%dT%H%M%S%.3fZ").to_string());
    let threads = cli
        .threads
        .or(file.global.threads)
        .or_else(|| std::env::var("SUSYZETA_THREADS").ok().and_then(|v| v.parse().ok()));
    if let Some(t) = threads {
        if t == 0 {
            return Err(CliError::validation("thread count must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::validation(format!("cannot configure thread pool: {e}")))?;
    }

    let inv = Invocation { file: &file, outdir, label };
    match &cli.command {
        Command::Zeros(a) => run::run_zeros(&inv, a),
        Command::TurningPoints(a) => run::run_turning_points(&inv, a),
        Command::Weier(a) => run::run_weier(&inv, a),
        Command::CbcRatios(a) => run::run_cbc_ratios(&inv, a),
        Command::Adjust(a) => run::run_adjust(&inv, a),
        Command::Fit(a) => run::run_fit(&inv, a),
        Command::Replay(a) => run::run_replay(&inv, a),
        Command::Iterate(a) => run::run_iterate(&inv, a),
        Command::Analyze(a) => run::run_analyze(&inv, a),
        Command::Identities(a) => run::run_identities(&inv, a),
        Command::Dominici(a) => run::run_dominici(&inv, a),
    }
}
