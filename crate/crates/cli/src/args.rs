//! Parsers for comma-separated flag values and small output helpers.

use std::fs;
use std::path::Path;
use std::str::FromStr;

use gardner5::{BreatherParams, Grid};
use serde::Serialize;

use crate::failure::{Failure, Outcome};

fn numbers(text: &str) -> Result<Vec<f64>, String> {
    text.split(',').map(|p| p.trim().parse::<f64>().map_err(|e| format!("'{p}': {e}"))).collect()
}

/// `a,b,mu[,x1,x2]`, stored unvalidated so that validation errors map to exit 2.
#[derive(Clone, Copy, Debug)]
pub struct ParamsArg([f64; 5]);

impl FromStr for ParamsArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let v = numbers(s)?;
        match *v.as_slice() {
            [a, b, mu] => Ok(Self([a, b, mu, 0.0, 0.0])),
            [a, b, mu, x1, x2] => Ok(Self([a, b, mu, x1, x2])),
            _ => Err(format!("expected alpha,beta,mu[,x1,x2], got {} values", v.len())),
        }
    }
}

impl ParamsArg {
    pub fn validate(self) -> Outcome<BreatherParams> {
        let [a, b, mu, x1, x2] = self.0;
        Ok(BreatherParams::new(a, b, mu, x1, x2)?)
    }
}

/// `center,length,points`.
#[derive(Clone, Copy, Debug)]
pub struct GridArg {
    center: f64,
    length: f64,
    points: f64,
}

impl FromStr for GridArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match numbers(s)?.as_slice() {
            &[center, length, points] => Ok(Self { center, length, points }),
            other => Err(format!("expected center,length,points, got {} values", other.len())),
        }
    }
}

impl GridArg {
    pub fn validate(self) -> Outcome<Grid> {
        if self.points.fract() != 0.0 || self.points < 0.0 {
            return Err(Failure::Invalid(format!("grid points must be a whole number, got {}", self.points)));
        }
        Ok(Grid::new(self.center, self.length, self.points as usize)?)
    }
}

/// `name=value` tolerance override.
#[derive(Clone, Debug)]
pub struct ToleranceArg {
    pub name: String,
    pub value: f64,
}

impl FromStr for ToleranceArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (name, value) = s.split_once('=').ok_or_else(|| format!("expected name=value, got '{s}'"))?;
        let value: f64 = value.trim().parse().map_err(|e| format!("'{value}': {e}"))?;
        if !(value > 0.0 && value.is_finite()) {
            return Err(format!("tolerance must be positive, got {value}"));
        }
        Ok(Self { name: name.trim().to_string(), value })
    }
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Outcome<T> {
    let text = fs::read_to_string(path).map_err(Failure::io(path))?;
    serde_json::from_str(&text).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Outcome {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_bytes(path, text.as_bytes())
}

pub fn write_bytes(path: &Path, bytes: &[u8]) -> Outcome {
    fs::write(path, bytes).map_err(Failure::io(path))
}

/// Writes to `path`, or to stdout when absent.
pub fn emit(path: Option<&Path>, bytes: &[u8]) -> Outcome {
    match path {
        Some(p) => write_bytes(p, bytes),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(bytes).map_err(Failure::io("<stdout>"))
        }
    }
}

pub fn ensure_dir(path: &Path) -> Outcome {
    fs::create_dir_all(path).map_err(Failure::io(path))
}
