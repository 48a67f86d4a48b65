use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use pairdfs::runner::{check_goldens, load_config, run_scenario, RunError};

/// Simulates qubit-pair encodings that keep coherence under collective bath coupling.
#[derive(Debug, Parser)]
#[command(name = "pairdfs", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a scenario file and write CSVs plus summary.json.
    Run {
        config: PathBuf,
        /// Worker threads for independent runs (defaults to the config, then 1).
        #[arg(long)]
        workers: Option<usize>,
        /// Output directory (defaults to the config's output_dir, then out/<stem>).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides the config seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Validate a scenario file and report every problem found.
    Validate { config: PathBuf },
    /// Re-run bundled scenarios and compare their CSVs with stored goldens.
    Goldens {
        /// Overwrite the goldens instead of comparing.
        #[arg(long)]
        update: bool,
        #[arg(long, default_value = concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios"))]
        scenarios: PathBuf,
        #[arg(long, default_value = concat!(env!("CARGO_MANIFEST_DIR"), "/goldens"))]
        goldens: PathBuf,
        /// Scratch directory for the fresh outputs.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match execute(Cli::parse().command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn execute(command: Command) -> Result<bool, RunError> {
    match command {
        Command::Validate { config } => {
            let cfg = load_config(&config)?;
            println!("{}: ok ({:?})", config.display(), cfg.scenario);
            Ok(true)
        }
        Command::Run {
            config,
            workers,
            out,
            seed,
        } => {
            let mut cfg = load_config(&config)?;
            if let Some(s) = seed {
                cfg.seed = s;
                cfg.raw.seed = s;
            }
            let out = out
                .or_else(|| cfg.raw.output_dir.clone())
                .unwrap_or_else(|| {
                    PathBuf::from("out").join(config.file_stem().unwrap_or_default())
                });
            let workers = workers.or(cfg.raw.workers).unwrap_or(1);
            if workers == 0 {
                return Err(RunError::Pool("--workers must be at least 1".into()));
            }
            let report = run_scenario(&cfg, &out, workers)?;
            for c in &report.checks {
                let mark = if c.passed { "PASS" } else { "FAIL" };
                println!(
                    "{mark} {} = {:e} ({} {:e})",
                    c.name, c.value, c.comparison, c.threshold
                );
            }
            for w in &report.warnings {
                println!("WARN {w}");
            }
            println!(
                "wrote {} file(s) and summary.json to {}",
                report.files.len(),
                out.display()
            );
            Ok(report.passed())
        }
        Command::Goldens {
            update,
            scenarios,
            goldens,
            out,
            workers,
        } => {
            let scratch = out.unwrap_or_else(|| {
                std::env::temp_dir().join(format!("pairdfs-goldens-{}", std::process::id()))
            });
            let results = check_goldens(&scenarios, &goldens, &scratch, workers.max(1), update)?;
            let mut ok = true;
            for r in &results {
                let status = if !r.mismatches.is_empty() || !r.checks_passed {
                    ok = false;
                    "FAIL"
                } else if update {
                    "UPDATED"
                } else {
                    "PASS"
                };
                println!("{status} {}", r.scenario);
                for m in &r.mismatches {
                    println!("    {m}");
                }
                if !r.checks_passed {
                    println!(
                        "    scenario checks failed; see {}",
                        scratch.join(&r.scenario).join("summary.json").display()
                    );
                }
            }
            Ok(ok)
        }
    }
}
