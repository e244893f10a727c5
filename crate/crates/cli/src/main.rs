use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mmlab::par::with_workers;
use mmlab::report::{dump_samples, list_fixtures, run_source, Overrides, SpaceSpec};

const EXIT_VALIDATION: u8 = 1;
const EXIT_RUNTIME: u8 = 2;

#[derive(Parser)]
#[command(
    name = "mmlab",
    version,
    about = "Concentration of measure experiments with reproducible CSV reports"
)]
struct Cli {
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true, env = "MMLAB_WORKERS")]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a JSON config (path, or `-` for stdin).
    Run {
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Output path prefix; writes <out>.csv and <out>.manifest.json.
        #[arg(long)]
        out: Option<String>,
    },
    /// List spaces, functions, bound curves and fixtures.
    Fixtures {
        #[arg(long)]
        json: bool,
    },
    /// Dump seeded samples of a space as CSV with a JSON manifest.
    Sample {
        #[arg(long)]
        space: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

enum Failure {
    Validation(String),
    Runtime(String),
}

impl From<mmlab::Error> for Failure {
    fn from(e: mmlab::Error) -> Self {
        if e.is_validation() {
            Failure::Validation(e.to_string())
        } else {
            Failure::Runtime(e.to_string())
        }
    }
}

fn read_config(path: Option<&PathBuf>) -> Result<(String, String), Failure> {
    let mut text = String::new();
    match path {
        None => {
            std::io::stdin()
                .read_to_string(&mut text)
                .map_err(|e| Failure::Validation(format!("stdin: {e}")))?;
            Ok(("<stdin>".into(), text))
        }
        Some(p) if p.as_os_str() == "-" => read_config(None),
        Some(p) => std::fs::read_to_string(p)
            .map(|t| (p.display().to_string(), t))
            .map_err(|e| Failure::Validation(format!("{}: {e}", p.display()))),
    }
}

fn execute(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Run { config, seed, out } => {
            let (name, source) = read_config(config.as_ref())?;
            let overrides = Overrides { seed, out };
            let outcome = run_source(&source, &overrides).map_err(|e| match Failure::from(e) {
                Failure::Validation(m) => Failure::Validation(format!("{name}: {m}")),
                other => other,
            })?;
            println!("wrote {}", outcome.csv.display());
            println!("wrote {}", outcome.manifest.display());
            if let Some(v) = outcome.verdict {
                println!("wrote {}", v.display());
            }
            println!("{}", outcome.results);
        }
        Command::Fixtures { json } => {
            let catalog = list_fixtures();
            if json {
                let text = serde_json::to_string_pretty(&catalog)
                    .map_err(|e| Failure::Runtime(e.to_string()))?;
                println!("{text}");
            } else {
                for e in catalog {
                    println!("{:<11} {:<31} {}", e.category, e.name, e.doc);
                }
            }
        }
        Command::Sample {
            space,
            n,
            k,
            count,
            seed,
            out,
        } => {
            let spec = SpaceSpec { kind: space, n, k };
            let (csv, manifest) = dump_samples(&spec, count, seed, &out)?;
            println!("wrote {}", csv.display());
            println!("wrote {}", manifest.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_VALIDATION } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.workers {
        Some(0) => Err(Failure::Validation("--workers must be at least 1".into())),
        Some(w) => with_workers(w, || execute(cli)),
        None => execute(cli),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_VALIDATION)
        }
        Err(Failure::Runtime(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_RUNTIME)
        }
    }
}
