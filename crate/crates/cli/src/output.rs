//! Text, JSON and CSV emission. Complex numbers in JSON are `"re+imi"`
//! strings; every number carries up to 17 significant digits.

use matsubara::model::{format_complex, format_real};
use matsubara::{Poly, C64};
use serde::{Serialize, Serializer};
use std::io::Write;
use std::path::Path;

#[derive(Clone, Copy, Debug)]
pub struct Cx(pub C64);

impl Serialize for Cx {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_complex(self.0))
    }
}

pub fn coeffs(p: &Poly) -> Vec<Cx> {
    p.coeffs().iter().map(|&c| Cx(c)).collect()
}

pub fn cxs(v: &[C64]) -> Vec<Cx> {
    v.iter().map(|&c| Cx(c)).collect()
}

pub const GRID_HEADER: &str = "zeta2_re,zeta2_im,xi2_re,xi2_im,value_re,value_im";

/// One CSV row; a failed evaluation (a pole) is written as `NaN`.
pub fn grid_row(zeta2: C64, xi2: C64, value: Option<C64>) -> String {
    let v = value.unwrap_or(C64::new(f64::NAN, f64::NAN));
    [zeta2.re, zeta2.im, xi2.re, xi2.im, v.re, v.im]
        .iter()
        .map(|&x| format_real(x))
        .collect::<Vec<_>>()
        .join(",")
}

/// Writes to `path`, or to stdout when it is `None`.
pub fn emit(path: Option<&Path>, text: &str) -> std::io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()
        }
    }
}

pub fn json<T: Serialize>(value: &T) -> serde_json::Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn row_format() {
        let row = grid_row(C64::new(0.5, 0.0), C64::new(-1.0, 2.0), None);
        assert_eq!(row, "5e-1,0,-1,2,NaN,NaN");
        assert_eq!(GRID_HEADER.split(',').count(), row.split(',').count());
    }

    #[test]
    fn complex_as_string() {
        assert_eq!(serde_json::to_string(&Cx(C64::new(1.0, -0.5))).unwrap(), "\"1-5e-1i\"");
    }
}
