use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use cmpairs::exec::Execution;
use cmpairs::harness::config::ScenarioConfig;
use cmpairs::harness::{load_config, run, HarnessError, Mode, RunOptions};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CliMode {
    Full,
    Reduced,
    Compare,
    Spectral,
    Selftest,
    #[value(hide = true)]
    SelftestElliptic,
}

impl From<CliMode> for Mode {
    fn from(m: CliMode) -> Self {
        match m {
            CliMode::Full => Mode::Full,
            CliMode::Reduced => Mode::Reduced,
            CliMode::Compare => Mode::Compare,
            CliMode::Spectral => Mode::Spectral,
            CliMode::Selftest => Mode::Selftest,
            CliMode::SelftestElliptic => Mode::SelftestElliptic,
        }
    }
}

/// Elliptic Calogero-Moser pair dynamics and BKP pole flows.
#[derive(Debug, Parser)]
#[command(name = "cmpairs", version)]
struct Cli {
    mode: CliMode,
    /// Scenario configuration (JSON). Optional for the self-tests.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = "cmpairs-out")]
    out_dir: PathBuf,
    /// Worker threads; all cores by default.
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Run every sub-study on the calling thread.
    #[arg(long)]
    sequential: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mode = Mode::from(cli.mode);
    let cfg = match (&cli.config, mode) {
        (Some(path), _) => load_config(path),
        (None, Mode::Selftest | Mode::SelftestElliptic) => Ok(ScenarioConfig::default()),
        (None, _) => Err(HarnessError::ConfigInvalid("--config is required for this mode".into())),
    };
    let opts = RunOptions {
        out_dir: cli.out_dir,
        jobs: cli.jobs,
        seed: cli.seed,
        exec: if cli.sequential { Execution::Sequential } else { Execution::Parallel },
    };
    let outcome = cfg.and_then(|cfg| run(mode, &cfg, &opts));
    match outcome {
        Ok(out) => {
            for line in &out.lines {
                println!("{line}");
            }
            let failed = out.verdict.checks.iter().filter(|c| !c.passed).count();
            println!(
                "{} checks, {} failed; artifacts in {}",
                out.verdict.checks.len(),
                failed,
                opts.out_dir.display()
            );
            if out.verdict.passed {
                ExitCode::SUCCESS
            } else {
                eprintln!("error: {}", HarnessError::ChecksFailed(format!("{mode:?} run")));
                ExitCode::from(3)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
