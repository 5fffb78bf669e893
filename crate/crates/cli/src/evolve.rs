//! `evolve`: run the pseudospectral solver from a JSON document.

use std::path::{Path, PathBuf};

use clap::Args;
use gardner5::breather::{sech_profile, Breather};
use gardner5::fourier::l2_norm;
use gardner5::output::write_field_csv;
use gardner5::solver::{breather_grid, evolve, EvolutionTrace};
use gardner5::{BreatherParams, Grid, SampledField, SolverConfig};
use serde::{Deserialize, Serialize};

use crate::args::{ensure_dir, read_json, write_bytes, write_json};
use crate::failure::{Failure, Outcome};

/// Spectral tail target when a breather run omits the grid.
const DEFAULT_TAIL: f64 = 1e-7;

#[derive(Debug, Args)]
pub struct EvolveArgs {
    /// JSON run document.
    #[arg(long)]
    config: PathBuf,
    /// Directory for diagnostics.json and checkpoint CSVs.
    #[arg(long = "out-dir", default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialData {
    Breather {
        alpha: f64,
        beta: f64,
        #[serde(default)]
        x1: f64,
        #[serde(default)]
        x2: f64,
    },
    Zero,
    /// `amplitude·sech((x − center)/width)`.
    Sech {
        amplitude: f64,
        width: f64,
        #[serde(default)]
        center: f64,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveDocument {
    pub mu: f64,
    /// Required unless the initial data is a breather.
    #[serde(default)]
    pub grid: Option<Grid>,
    pub initial: InitialData,
    pub solver: SolverConfig,
    #[serde(default)]
    pub write_checkpoints: bool,
}

#[derive(Debug, Serialize)]
struct Diagnostics {
    mu: f64,
    grid: Grid,
    solver: SolverConfig,
    steps: usize,
    dt: f64,
    times: Vec<f64>,
    mass_drift: f64,
    l2_drift: f64,
    l2_drift_relative: f64,
    max_imag_residue: f64,
    /// Relative L² distance to the closed form at the final time, for breather data.
    closed_form_error: Option<f64>,
    checkpoints: Vec<String>,
}

fn initial_field(doc: &EvolveDocument) -> Outcome<(SampledField, Option<BreatherParams>)> {
    if !(doc.mu >= 0.0 && doc.mu.is_finite()) {
        return Err(Failure::Invalid(format!("mu must be finite and >= 0, got {}", doc.mu)));
    }
    let need_grid =
        || doc.grid.ok_or_else(|| Failure::Invalid("grid is required for non-breather initial data".into()));
    Ok(match doc.initial {
        InitialData::Breather { alpha, beta, x1, x2 } => {
            let p = BreatherParams::new(alpha, beta, doc.mu, x1, x2)?;
            let grid = match doc.grid {
                Some(g) => g,
                None => breather_grid(&p, 0.0, DEFAULT_TAIL)?,
            };
            (Breather::new(p).sample_rational(0.0, &grid)?, Some(p))
        }
        InitialData::Zero => (SampledField::zeros(need_grid()?), None),
        InitialData::Sech { amplitude, width, center } => {
            if !(width > 0.0) {
                return Err(Failure::Invalid(format!("sech width must be > 0, got {width}")));
            }
            (SampledField::from_fn(need_grid()?, |x| amplitude * sech_profile(1.0, (x - center) / width))?, None)
        }
    })
}

fn write_checkpoints(dir: &Path, trace: &EvolutionTrace) -> Outcome<Vec<String>> {
    trace
        .fields
        .iter()
        .enumerate()
        .map(|(i, field)| {
            let name = format!("checkpoint_{i:04}.csv");
            let mut csv = Vec::new();
            write_field_csv(&mut csv, field, "v").map_err(Failure::io(&name))?;
            write_bytes(&dir.join(&name), &csv)?;
            Ok(name)
        })
        .collect()
}

pub fn run(args: &EvolveArgs) -> Outcome {
    let doc: EvolveDocument = read_json(&args.config)?;
    doc.solver.validate()?;
    let (v0, breather) = initial_field(&doc)?;
    let trace = evolve(&v0, doc.mu, &doc.solver)?;
    let t_end = *trace.times.last().expect("trace holds the initial time");
    let closed_form_error = match breather {
        Some(p) => {
            let exact = Breather::new(p).sample_rational(t_end, v0.grid())?;
            Some(l2_norm(&trace.final_field().sub(&exact)?) / l2_norm(&exact))
        }
        None => None,
    };
    ensure_dir(&args.out_dir)?;
    let checkpoints = if doc.write_checkpoints { write_checkpoints(&args.out_dir, &trace)? } else { Vec::new() };
    let diagnostics = Diagnostics {
        mu: doc.mu,
        grid: *v0.grid(),
        solver: doc.solver,
        steps: trace.steps,
        dt: trace.dt,
        times: trace.times.clone(),
        mass_drift: trace.mass_drift,
        l2_drift: trace.l2_drift,
        l2_drift_relative: trace.l2_drift_relative(),
        max_imag_residue: trace.max_imag_residue,
        closed_form_error,
        checkpoints,
    };
    write_json(&args.out_dir.join("diagnostics.json"), &diagnostics)
}
