//! `eval`: sample one breather form on a grid and write `x,B` rows.

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use gardner5::breather::{envelope_window, eval_arctan_derivative, Breather};
use gardner5::output::write_field_csv;

use crate::args::{emit, GridArg, ParamsArg};
use crate::failure::{Failure, Outcome};

/// Envelope widths and points per carrier period of the default window.
const DEFAULT_WIDTHS: f64 = 80.0;
const DEFAULT_POINTS_PER_PERIOD: f64 = 16.0;

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Form {
    /// Closed form 2M/N.
    Rational,
    /// Spectral derivative of the sampled arctangent antiderivative.
    Arctan,
    /// Modulated sech envelope.
    Approx,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// alpha,beta,mu[,x1,x2]
    #[arg(long, allow_hyphen_values = true)]
    params: ParamsArg,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    time: f64,
    /// center,length,points; defaults to a window of 80 envelope widths around the envelope.
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<GridArg>,
    #[arg(long, value_enum, default_value_t = Form::Rational)]
    form: Form,
    /// CSV destination; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn run(args: &EvalArgs) -> Outcome {
    let params = args.params.validate()?;
    if !args.time.is_finite() {
        return Err(Failure::Invalid(format!("time must be finite, got {}", args.time)));
    }
    let grid = match args.grid {
        Some(g) => g.validate()?,
        None => envelope_window(&params, args.time, DEFAULT_WIDTHS, DEFAULT_POINTS_PER_PERIOD)?,
    };
    let b = Breather::new(params);
    let field = match args.form {
        Form::Rational => b.sample_rational(args.time, &grid)?,
        Form::Arctan => eval_arctan_derivative(&params, args.time, &grid)?,
        Form::Approx => b.sample_approx(args.time, &grid)?,
    };
    // Rendered in memory first so a failure never leaves a partial file.
    let mut csv = Vec::new();
    write_field_csv(&mut csv, &field, "B").map_err(Failure::io("<buffer>"))?;
    emit(args.out.as_deref(), &csv)
}
