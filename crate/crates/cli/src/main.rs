use bethe_cli::{compare_reports, read_jsonl, ExperimentConfig, Overrides, EXIT_CONFIG, EXIT_OK, EXIT_VERIFY};
use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

/// Solve Bethe ansatz equations, verify eigenvectors and cross-check
/// Baxter equations. Flags override keys of the config file.
#[derive(Parser, Debug)]
#[command(name = "bethe", version)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    /// Flat TOML config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// bethe, basis, ortho, baxter, qbaxter, sovcheck or sweep.
    #[arg(long)]
    experiment: Option<String>,
    /// Levels: `all` or a comma-separated list.
    #[arg(long)]
    ell: Option<String>,
    /// `generic`, `one` or a complex value such as `0.8+1.1i`.
    #[arg(long, allow_hyphen_values = true)]
    kappa: Option<String>,
    /// Multiplicative twist; same syntax as `--kappa`.
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<String>,
    /// Deformation parameter of the multiplicative variant
    #[arg(long, allow_hyphen_values = true)]
    q: Option<String>,
    /// Seed for the drawn inhomogeneities and twist
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; output does not depend on this
    #[arg(long)]
    workers: Option<usize>,
    /// Output prefix for `.jsonl`, `.summary.csv` and `.meta.json`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compare two JSON-lines reports orbit by orbit.
    Compare {
        a: PathBuf,
        b: PathBuf,
        /// Coordinate distance below which two solutions are the same
        #[arg(long, default_value_t = 1e-7)]
        tol: f64,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    if let Some(Command::Compare { a, b, tol }) = &cli.command {
        let (ra, rb) = match (read_jsonl(a), read_jsonl(b)) {
            (Ok(x), Ok(y)) => (x, y),
            (Err(e), _) | (_, Err(e)) => {
                eprintln!("error: {e}");
                return ExitCode::from(EXIT_CONFIG as u8);
            }
        };
        let diff = compare_reports(&ra, &rb, *tol);
        println!("{}", serde_json::to_string_pretty(&diff).expect("diff serializes"));
        return ExitCode::from(if diff.is_empty(*tol) { EXIT_OK } else { EXIT_VERIFY } as u8);
    }
    let base = match &cli.config {
        Some(p) => ExperimentConfig::from_file(p),
        None => Ok(ExperimentConfig::default()),
    };
    let overrides = Overrides {
        experiment: cli.experiment,
        ell: cli.ell,
        kappa: cli.kappa,
        theta: cli.theta,
        q: cli.q,
        seed: cli.seed,
        workers: cli.workers,
        output: cli.out,
    };
    let cfg = match base.and_then(|c| c.apply(&overrides)) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG as u8);
        }
    };
    ExitCode::from(bethe_cli::run(&cfg) as u8)
}
