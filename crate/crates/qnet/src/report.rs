//! Shared report formatting: 12-significant-digit floats and row-major
//! matrix dumps with `re+imi` cells.

use crate::qmat::{CMat, C64};

/// Format a float with 12 significant digits.
pub fn sig12(x: f64) -> String {
    format!("{x:.11e}")
}

/// One complex cell in `re+imi` form, e.g. `5.0e-1-2.5e-1i`.
pub fn cell(z: C64) -> String {
    if z.im >= 0.0 {
        format!("{}+{}i", sig12(z.re), sig12(z.im))
    } else {
        format!("{}-{}i", sig12(z.re), sig12(-z.im))
    }
}

/// Row-major dump of a complex matrix.
pub fn matrix_dump(m: &CMat) -> Vec<Vec<String>> {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| cell(m[(r, c)])).collect())
        .collect()
}
