use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use odse::bench::{bench_efficiency, bench_oracles, bench_theorem1, bench_theorem3, BenchReport};
use odse::ingest::{generate_synthetic, write_native_dataset, DatasetFormat, SyntheticSpec};
use odse::run::{eval_model, persist, train, RunConfig};
use odse::Result;

#[derive(Parser)]
#[command(
    name = "odse",
    about = "Labeled-graph classification via optimized dissimilarity-space embedding",
    version
)]
struct Cli {
    /// Cap on internal parallelism; 1 reproduces multi-threaded results
    /// exactly, 0 uses all cores.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize a model on a dataset and write model + metrics JSON.
    Train {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Overrides the seed from the config file.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Evaluate a persisted model on the test split of a dataset.
    Eval {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value = "native")]
        format: String,
    },
    /// Run a verification suite; exits nonzero on any failed case.
    Bench {
        /// One of: efficiency, theorem1, theorem3, oracles.
        #[arg(long)]
        suite: String,
    },
    /// Generate a synthetic letter-like dataset in native format.
    Generate {
        #[arg(long)]
        classes: usize,
        #[arg(long = "per-class")]
        per_class: usize,
        #[arg(long)]
        noise: f64,
        #[arg(long)]
        seed: u64,
        /// Master manifest path; split files are written next to it.
        #[arg(long)]
        out: PathBuf,
    },
}

fn print_report(report: &BenchReport) {
    println!("suite: {}", report.suite);
    for case in &report.cases {
        println!(
            "  [{}] {} -> {} (expected {})",
            if case.pass { "PASS" } else { "FAIL" },
            case.name,
            case.measured,
            case.expected
        );
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Train { config, out, seed } => {
            let mut cfg = RunConfig::load_json(&config)?.anchored_to(&config);
            if let Some(seed) = seed {
                cfg.ga.seed = seed;
            }
            let outcome = train(&cfg, |stats| {
                eprintln!(
                    "generation {:>3}: best={:.6} mean={:.6} rs={} stall={}",
                    stats.generation,
                    stats.best_fitness,
                    stats.mean_fitness,
                    stats.best_rs_size,
                    stats.stall
                );
            })?;
            let (model_path, metrics_path) = persist(&outcome, &out)?;
            println!(
                "test accuracy {:.4} | rs size {} | generations {} | model {} | metrics {}",
                outcome.metrics.accuracy,
                outcome.metrics.rs_size,
                outcome.metrics.generations_run,
                model_path.display(),
                metrics_path.display()
            );
            Ok(true)
        }
        Command::Eval { model, data, format } => {
            let format: DatasetFormat = format.parse()?;
            let report = eval_model(&model, &data, format)?;
            println!("{}", serde_json::to_string_pretty(&report).unwrap());
            Ok(true)
        }
        Command::Bench { suite } => {
            let report = match suite.as_str() {
                "efficiency" => bench_efficiency()?,
                "theorem1" => bench_theorem1(1000, 0xD5)?,
                "theorem3" => bench_theorem3(500, 0xD5)?,
                "oracles" => bench_oracles(0xD5)?,
                other => {
                    return Err(odse::OdseError::Config(format!(
                        "unknown suite `{other}` (expected efficiency, theorem1, theorem3, oracles)"
                    )))
                }
            };
            print_report(&report);
            Ok(report.passed())
        }
        Command::Generate {
            classes,
            per_class,
            noise,
            seed,
            out,
        } => {
            let dataset = generate_synthetic(&SyntheticSpec {
                classes,
                per_class,
                noise,
                seed,
            })?;
            write_native_dataset(&dataset, &out)?;
            println!(
                "wrote {} classes x {} per class per split -> {}",
                classes,
                per_class,
                out.display()
            );
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build()
    {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("error: failed to build thread pool: {e}");
            return ExitCode::FAILURE;
        }
    };
    match pool.install(|| run(cli)) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
