use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use klab::harness::{self, Command, EllPolicy, ExperimentConfig, Format, LengthSpec};
use klab::GenMode;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CommandArg {
    VerifyLemma1,
    VerifyIdentity,
    VerifyMvt,
    VerifyWeil,
    Solve,
    ScanHooley,
    Bench,
}

impl From<CommandArg> for Command {
    fn from(c: CommandArg) -> Self {
        match c {
            CommandArg::VerifyLemma1 => Command::VerifyLemma1,
            CommandArg::VerifyIdentity => Command::VerifyIdentity,
            CommandArg::VerifyMvt => Command::VerifyMvt,
            CommandArg::VerifyWeil => Command::VerifyWeil,
            CommandArg::Solve => Command::Solve,
            CommandArg::ScanHooley => Command::ScanHooley,
            CommandArg::Bench => Command::Bench,
        }
    }
}

/// Kloosterman-sum bound verification and interval-family solving modulo a prime.
///
/// Exit status: 0 when every row passes, 2 when any row records a
/// falsification, 1 on a usage or configuration error.
#[derive(Debug, Parser)]
#[command(name = "klab", version)]
struct Cli {
    command: CommandArg,

    /// Comma-separated primes.
    #[arg(long = "p", value_name = "LIST")]
    p: String,

    /// Window/interval lengths: integers, a..b ranges, `dyadic`, `all`.
    #[arg(long = "H", value_name = "LIST")]
    h: Option<String>,

    /// Second-interval lengths for `solve` (defaults to the H list).
    #[arg(long = "K", value_name = "LIST")]
    k: Option<String>,

    /// Twists: all | sample:<n> | <value>.
    #[arg(long, default_value = "1")]
    ell: String,

    /// Family size for verify-mvt and solve.
    #[arg(long = "J")]
    j: Option<u64>,

    /// Implied constant of the solubility threshold.
    #[arg(long, default_value_t = 1.0)]
    c: f64,

    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// random-disjoint | equally-spaced | adversarial-clustered.
    #[arg(long, default_value = "random-disjoint")]
    mode: String,

    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,

    #[arg(long, default_value = "csv")]
    format: String,

    /// Worker threads (default: all cores).
    #[arg(long)]
    workers: Option<usize>,

    /// Omit the timestamp header and report wall_time_ms as 0.
    #[arg(long)]
    deterministic: bool,
}

fn build_config(cli: &Cli) -> Result<ExperimentConfig, harness::HarnessError> {
    let mut config = ExperimentConfig::new(cli.command.into(), harness::parse_p_list(&cli.p)?);
    if let Some(h) = &cli.h {
        config.h_list = LengthSpec::parse_list("--H", h)?;
    }
    if let Some(k) = &cli.k {
        config.k_list = LengthSpec::parse_list("--K", k)?;
    }
    config.ell = cli.ell.parse::<EllPolicy>()?;
    config.j = cli.j;
    config.c = cli.c;
    config.seed = cli.seed;
    config.mode = cli
        .mode
        .parse::<GenMode>()
        .map_err(|reason| harness::HarnessError::Parse {
            what: "--mode",
            input: cli.mode.clone(),
            reason,
        })?;
    config.format = cli.format.parse::<Format>()?;
    config.workers = cli.workers;
    config.deterministic = cli.deterministic;
    Ok(config)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let outcome = match build_config(&cli).and_then(|c| harness::run(&c)) {
        Ok(outcome) => outcome,
        Err(e) => {
            eprintln!("klab: error: {e}");
            return ExitCode::from(1);
        }
    };
    let written = match &cli.out {
        Some(path) => outcome.write_to(path),
        None => outcome
            .render()
            .and_then(|bytes| Ok(std::io::stdout().lock().write_all(&bytes)?)),
    };
    if let Err(e) = written {
        eprintln!("klab: error: {e}");
        return ExitCode::from(1);
    }
    for row in outcome.failures() {
        eprintln!("klab: FALSIFIED: {}", outcome.describe(row));
    }
    eprintln!(
        "klab: {} rows, {} falsified",
        outcome.rows.len(),
        outcome.failures().count()
    );
    ExitCode::from(outcome.status().code() as u8)
}
