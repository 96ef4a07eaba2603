//! Experiment runner around `bethe-core`: configuration, instance
//! generation, parallel sweeps and report files.

pub mod config;
pub mod generate;
pub mod report;
pub mod run;

pub use config::{ConfigError, EllList, Experiment, ExperimentConfig, Overrides, Thresholds, TwistPolicy};
pub use generate::{generate_spec, Draw, GenerateError};
pub use report::{compare_reports, read_jsonl, write_outputs, DiffSummary};
pub use run::{execute, RunReport, SolutionRecord, SummaryRow, EXIT_CONFIG, EXIT_OK, EXIT_PATHS, EXIT_VERIFY};

/// Load, run and write artifacts; returns the process exit code.
pub fn run(cfg: &ExperimentConfig) -> i32 {
    match execute(cfg) {
        Ok(report) => {
            if let Err(e) = write_outputs(&report, &cfg.output) {
                eprintln!("error: cannot write outputs: {e}");
                return EXIT_CONFIG;
            }
            for f in &report.failures {
                eprintln!("check failed: {f}");
            }
            report.exit_code
        }
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                run::RunError::Sov(_) => EXIT_VERIFY,
                _ => EXIT_CONFIG,
            }
        }
    }
}
