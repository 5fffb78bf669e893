//! CSV serialization with fixed float formatting.
//!
//! Every float is written with 17 significant digits in scientific notation,
//! so identical inputs give byte-identical files.

use std::io::{self, Write};

use crate::fourier::SampledField;

pub fn fmt_float(value: f64) -> String {
    format!("{value:.16e}")
}

/// Writes `x,value` rows for every node of the field.
pub fn write_field_csv<W: Write>(mut out: W, field: &SampledField, column: &str) -> io::Result<()> {
    writeln!(out, "x,{column}")?;
    let grid = field.grid();
    for (j, v) in field.values().iter().enumerate() {
        writeln!(out, "{},{}", fmt_float(grid.node(j)), fmt_float(*v))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(fmt_float(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_float(-2.0), "-2.0000000000000000e0");
        let s = fmt_float(std::f64::consts::PI);
        assert_eq!(s.parse::<f64>().unwrap(), std::f64::consts::PI);
    }
}
