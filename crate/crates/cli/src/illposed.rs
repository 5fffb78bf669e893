//! `illposed`: the two-breather scan, written as `scan.csv` and `verdict.json`.

use std::path::PathBuf;

use clap::Args;
use gardner5::experiment::{run_scan, write_scan_csv};
use gardner5::ExperimentConfig;

use crate::args::{ensure_dir, read_json, write_bytes, write_json};
use crate::failure::{Failure, Outcome};

#[derive(Debug, Args)]
pub struct IllposedArgs {
    /// JSON experiment document; every key is optional and defaults to the headline scan.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Directory for scan.csv and verdict.json.
    #[arg(long = "out-dir", default_value = ".")]
    out_dir: PathBuf,
}

pub fn run(args: &IllposedArgs) -> Outcome {
    let config: ExperimentConfig = match &args.config {
        Some(path) => read_json(path)?,
        None => ExperimentConfig::default(),
    };
    config.validate()?;
    let report = run_scan(&config)?;
    for row in report.rows.iter().filter(|r| r.overlap_fallback) {
        eprintln!("warning: alpha = {}: time-T windows overlap, distance taken on one common grid", row.alpha);
    }
    ensure_dir(&args.out_dir)?;
    let mut csv = Vec::new();
    write_scan_csv(&mut csv, &report.rows).map_err(Failure::io("<buffer>"))?;
    write_bytes(&args.out_dir.join("scan.csv"), &csv)?;
    write_json(&args.out_dir.join("verdict.json"), &report)?;
    eprintln!("verdict: {}", serde_json::to_string(&report.verdict)?.trim_matches('"'));
    Ok(())
}
