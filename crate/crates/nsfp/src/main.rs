use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nsfp::commands;
use nsfp::output::format_float;
use nsfp::AppError;

// A closed pipe (`nsfp diagnose ... | head`) is not an error.
macro_rules! say {
    ($($arg:tt)*) => {{
        let _ = writeln!(std::io::stdout().lock(), $($arg)*);
    }};
}

#[derive(Parser)]
#[command(name = "nsfp", version, about = "Navier–Stokes–Fokker–Planck rod suspensions on the 2-torus")]
struct Cli {
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Overrides initial.seed, and lab.seed for verify-inequalities.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the commented default configuration.
    InitConfig {
        #[arg(long, default_value = "nsfp.toml")]
        config: PathBuf,
        /// Overwrite an existing file.
        #[arg(long)]
        force: bool,
    },
    /// Integrate and write diagnostics.csv, diagnostics.json and checkpoints.
    Run {
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Sweep the Besov-space inequalities over a family of test functions.
    VerifyInequalities {
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Recompute the diagnostics record stored with a checkpoint.
    Diagnose { checkpoint: PathBuf },
}

fn execute(cli: Cli) -> Result<(), AppError> {
    match cli.command {
        Command::InitConfig { config, force } => {
            commands::init_config(&config, force)?;
            say!("wrote {}", config.display());
        }
        Command::Run { config } => {
            let (mut cfg, base) = commands::load_config(config.as_deref())?;
            if let Some(s) = cli.seed {
                cfg.initial.seed = s;
            }
            let res = commands::run(&cfg, base.as_deref())?;
            let out = &res.output;
            say!("{} steps to t = {}, {} records in {}", out.steps, out.state.t, out.records.len(), res.dir.display());
            say!("empirical K = {}, C_YZ = {}", format_float(out.empirical_k), format_float(out.empirical_c_yz));
        }
        Command::VerifyInequalities { config } => {
            let (mut cfg, base) = commands::load_config(config.as_deref())?;
            if let Some(s) = cli.seed {
                cfg.lab.seed = s;
            }
            let (report, dir) = commands::verify_inequalities(&cfg, base.as_deref())?;
            for s in &report.summary {
                say!("{:<20} r = {:<4} sup ratio {:.6e}  ({})", s.inequality.name(), s.r, s.sup_ratio, s.argmax);
            }
            say!("{} rows in {}", report.rows.len(), dir.display());
        }
        Command::Diagnose { checkpoint } => {
            let v = commands::diagnose_json(&checkpoint)?;
            say!("{}", serde_json::to_string_pretty(&v).expect("json"));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let pool = match cli.threads {
        Some(0) => Err(AppError::Config("--threads must be positive".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map(Some)
            .map_err(|e| AppError::Config(e.to_string())),
        None => Ok(None),
    };
    let result = pool.and_then(|p| match p {
        Some(p) => p.install(|| execute(cli)),
        None => execute(cli),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("nsfp: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
