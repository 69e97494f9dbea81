use proptest::prelude::*;

use crate::numerics::{Complex64, ComplexMatrix};

/// `rows × cols` matrices with entries in the unit box, bounded away from
/// exact degeneracy by an identity-like diagonal shift.
pub fn complex_matrix(rows: usize, cols: usize) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), rows * cols).prop_map(move |v| {
        ComplexMatrix::from_fn(rows, cols, |i, j| {
            let (re, im) = v[i * cols + j];
            let shift = if i == j { 1.5 } else { 0.0 };
            Complex64::new(re + shift, im)
        })
    })
}

pub fn rel_close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs())
}
