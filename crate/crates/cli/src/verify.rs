//! `verify`: residual, mass and dual-form checks for one breather, as JSON.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::Args;
use gardner5::breather::{envelope_center, eval_arctan_derivative, sech_profile, Breather};
use gardner5::fourier::{l2_norm, mean};
use gardner5::residuals::{elliptic_residual_of, mkdv5_residual, pde_residual_field, ResidualOptions};
use gardner5::solver::breather_grid;
use gardner5::{BreatherParams, Grid, ResidualReport, SampledField};
use serde::Serialize;

use crate::args::{emit, GridArg, ParamsArg, ToleranceArg};
use crate::failure::{Failure, Outcome};

/// Spectral tail target of the default adaptive grid.
const DEFAULT_TAIL: f64 = 1e-13;

const DEFAULT_TOLERANCES: [(&str, f64); 5] =
    [("pde", 1e-6), ("elliptic", 1e-7), ("mass", 1e-10), ("dual_form", 1e-9), ("mkdv5", 1e-6)];

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// alpha,beta,mu[,x1,x2]
    #[arg(long, allow_hyphen_values = true)]
    params: ParamsArg,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    time: f64,
    /// center,length,points; defaults to an adaptive grid resolving the breather spectrum.
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<GridArg>,
    /// Override a tolerance, e.g. `pde=1e-5`; names: pde, elliptic, mass, dual_form, mkdv5.
    #[arg(long = "tolerance")]
    tolerances: Vec<ToleranceArg>,
    /// Add `amplitude·sech(x − center)` to the field before the PDE check.
    #[arg(long, allow_hyphen_values = true)]
    corrupt: Option<f64>,
    /// JSON destination; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct Check {
    /// Compared against `tolerance`.
    measured: f64,
    tolerance: f64,
    pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    report: Option<ResidualReport>,
    #[serde(flatten)]
    extra: BTreeMap<&'static str, f64>,
}

impl Check {
    fn new(measured: f64, tolerance: f64) -> Self {
        Self { measured, tolerance, pass: measured <= tolerance, report: None, extra: BTreeMap::new() }
    }

    fn residual(report: ResidualReport, tolerance: f64) -> Self {
        Self { report: Some(report), ..Self::new(report.sup_rel, tolerance) }
    }
}

#[derive(Debug, Serialize)]
struct VerifyReport {
    params: BreatherParams,
    time: f64,
    grid: Grid,
    corrupt: Option<f64>,
    checks: BTreeMap<&'static str, Check>,
    pass: bool,
}

fn tolerances(overrides: &[ToleranceArg]) -> Outcome<BTreeMap<&'static str, f64>> {
    let mut table: BTreeMap<&'static str, f64> = DEFAULT_TOLERANCES.into_iter().collect();
    for o in overrides {
        let slot = table
            .iter_mut()
            .find(|(k, _)| **k == o.name)
            .ok_or_else(|| Failure::Invalid(format!("unknown tolerance '{}'", o.name)))?;
        *slot.1 = o.value;
    }
    Ok(table)
}

pub fn run(args: &VerifyArgs) -> Outcome {
    let params = args.params.validate()?;
    let tol = tolerances(&args.tolerances)?;
    let t = args.time;
    if !t.is_finite() {
        return Err(Failure::Invalid(format!("time must be finite, got {t}")));
    }
    let grid = match args.grid {
        Some(g) => g.validate()?,
        None => breather_grid(&params, t, DEFAULT_TAIL)?,
    };
    let b = Breather::new(params);
    let field = b.sample_rational(t, &grid)?;
    let mut checks = BTreeMap::new();

    let perturbation = match args.corrupt {
        Some(a) if !a.is_finite() => {
            return Err(Failure::Invalid(format!("corrupt amplitude must be finite, got {a}")))
        }
        Some(a) => {
            let c = envelope_center(&params, t);
            Some(SampledField::from_fn(grid, |x| a * sech_profile(1.0, x - c))?)
        }
        None => None,
    };
    let opts = ResidualOptions { perturbation, ..Default::default() };
    let (_, pde) = pde_residual_field(&params, t, &grid, &opts)?;
    checks.insert("pde", Check::residual(pde, tol["pde"]));

    let (_, elliptic) = elliptic_residual_of(&field, &params)?;
    checks.insert("elliptic", Check::residual(elliptic, tol["elliptic"]));

    // The integral is compared with its closed-form value 2·atan(−4μβ/Δ), which is 0 at μ = 0.
    let integral = mean(&field);
    let predicted = params.mass();
    let mut mass = Check::new((integral - predicted).abs() / (1.0 + l2_norm(&field)), tol["mass"]);
    mass.extra.insert("integral", integral);
    mass.extra.insert("predicted", predicted);
    checks.insert("mass", mass);

    let arctan = eval_arctan_derivative(&params, t, &grid)?;
    let gap = field.sub(&arctan)?.max_abs() / (1.0 + field.max_abs());
    checks.insert("dual_form", Check::new(gap, tol["dual_form"]));

    if params.mu() == 0.0 {
        let (_, mkdv5) = mkdv5_residual(&params, t, &grid)?;
        checks.insert("mkdv5", Check::residual(mkdv5, tol["mkdv5"]));
    }

    let failed: Vec<&str> = checks.iter().filter(|(_, c)| !c.pass).map(|(k, _)| *k).collect();
    let report = VerifyReport { params, time: t, grid, corrupt: args.corrupt, pass: failed.is_empty(), checks };
    let mut json = serde_json::to_string_pretty(&report)?;
    json.push('\n');
    emit(args.out.as_deref(), json.as_bytes())?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::CheckFailed(failed.join(", ")))
    }
}
