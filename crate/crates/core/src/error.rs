use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("frequency alpha must be > 0, got {0}")]
    NonPositiveAlpha(f64),
    #[error("amplitude beta must be > 0, got {0}")]
    NonPositiveBeta(f64),
    #[error("background mu must be >= 0, got {0}")]
    NegativeMu(f64),
    #[error("discriminant alpha^2 + beta^2 - 4 mu^2 must be > 0, got {0}")]
    NonPositiveDiscriminant(f64),
    #[error("non-finite parameter {name} = {value}")]
    NonFinite { name: &'static str, value: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("field has {got} samples, grid has {expected} points")]
    LengthMismatch { expected: usize, got: usize },
    #[error("field contains a non-finite sample at index {0}")]
    NonFiniteSample(usize),
    #[error("derivative order {0} outside 1..=5")]
    DerivativeOrder(u32),
    #[error("field is not numerically periodic on its window (spectral tail {tail:.3e} of peak)")]
    NotPeriodic { tail: f64 },
    #[error("window too narrow: envelope is {edge_decay:.3e} at the edges (need <= {required:.1e})")]
    GridTooNarrow { edge_decay: f64, required: f64 },
    #[error("imaginary residue {0:.3e} after inverse transform")]
    ImaginaryResidue(f64),
    #[error("windows overlap by {0:.1}%, zero-extension not applicable")]
    WindowOverlap(f64),

    #[error("denominator N = {0:.3e} at or below machine tolerance")]
    DegenerateDenominator(f64),
    #[error("time-difference step {step:.3e}: Richardson pair ratio {ratio:.2} (expected ~16)")]
    TimeStep { step: f64, ratio: f64 },

    #[error("invalid solver configuration: {0}")]
    SolverConfig(String),
    #[error("blow-up guard tripped at t = {time}: sup|v| = {sup:.3e}")]
    BlowUp { time: f64, sup: f64 },
    #[error("non-finite value in solution at t = {0}")]
    SolutionNaN(f64),

    #[error("invalid experiment configuration: {0}")]
    ExperimentConfig(String),
    #[error("frequency alpha2 = {0} must stay positive")]
    NonPositiveAlpha2(f64),
}

pub(crate) fn finite(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite { name, value })
    }
}
