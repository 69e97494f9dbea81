use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::de::{self, Deserializer};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Complex scalar in its JSON form `{"re": .., "im": ..}`.
///
/// Deserialization also accepts a bare number as a real scalar.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JsonScalar(pub Complex64);

#[derive(Serialize, Deserialize)]
struct ReIm {
    re: f64,
    #[serde(default)]
    im: f64,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ScalarRepr {
    Complex(ReIm),
    Real(f64),
}

impl Serialize for JsonScalar {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ReIm {
            re: self.0.re,
            im: self.0.im,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for JsonScalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Ok(match ScalarRepr::deserialize(d)? {
            ScalarRepr::Complex(ReIm { re, im }) => JsonScalar(Complex64::new(re, im)),
            ScalarRepr::Real(re) => JsonScalar(Complex64::new(re, 0.0)),
        })
    }
}

/// Dense complex matrix. Every operator in the crate (Λᵢ, K, U, V, T_Λ, S_Λ, …)
/// is one of these.
///
/// Entries are always finite; constructors that take external data check it.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<Complex64>);

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self(DMatrix::zeros(rows, cols))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> Complex64) -> Self {
        Self(DMatrix::from_fn(rows, cols, f))
    }

    /// Wraps an nalgebra matrix, rejecting NaN or infinite entries.
    pub fn from_inner(inner: DMatrix<Complex64>) -> Result<Self> {
        for j in 0..inner.ncols() {
            for i in 0..inner.nrows() {
                let z = inner[(i, j)];
                if !(z.re.is_finite() && z.im.is_finite()) {
                    return Err(Error::NonFinite { row: i, col: j });
                }
            }
        }
        Ok(Self(inner))
    }

    /// Builds a `rows × cols` matrix from row-major entries.
    pub fn from_row_major(rows: usize, cols: usize, entries: &[Complex64]) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}×{cols} matrix",
                entries.len()
            )));
        }
        Self::from_inner(DMatrix::from_row_slice(rows, cols, entries))
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some((i, row)) = rows.iter().enumerate().find(|(_, r)| r.len() != cols) {
            return Err(Error::DimensionMismatch(format!(
                "row {i} has {} entries, expected {cols}",
                row.len()
            )));
        }
        let flat: Vec<Complex64> = rows.iter().flatten().copied().collect();
        Self::from_row_major(rows.len(), cols, &flat)
    }

    /// Real matrix from row-major entries. Panics on a length mismatch; meant
    /// for literals in code and tests.
    pub fn real(rows: usize, cols: usize, entries: &[f64]) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count");
        Self::from_fn(rows, cols, |i, j| Complex64::new(entries[i * cols + j], 0.0))
    }

    pub fn diag_real(values: &[f64]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(values[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    pub fn column(v: &[Complex64]) -> Self {
        Self(DMatrix::from_column_slice(v.len(), 1, v))
    }

    pub fn nrows(&self) -> usize {
        self.0.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.0.ncols()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.0.shape()
    }

    pub fn is_square(&self) -> bool {
        self.nrows() == self.ncols()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.0[(i, j)]
    }

    pub fn inner(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<Complex64> {
        self.0
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.norm()
    }

    /// All entries exactly zero.
    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self(&self.0 * s)
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    /// Matrix–vector product.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.ncols(), "vector length");
        let x = nalgebra::DVector::from_column_slice(v);
        (&self.0 * x).iter().copied().collect()
    }

    /// Horizontal concatenation `[A | B | …]`; all parts need equal row counts.
    pub fn hstack(parts: &[&ComplexMatrix], rows: usize) -> Result<Self> {
        if let Some(p) = parts.iter().find(|p| p.nrows() != rows) {
            return Err(Error::DimensionMismatch(format!(
                "hstack part has {} rows, expected {rows}",
                p.nrows()
            )));
        }
        let cols = parts.iter().map(|p| p.ncols()).sum();
        let mut out = DMatrix::zeros(rows, cols);
        let mut at = 0;
        for p in parts {
            out.view_mut((0, at), (rows, p.ncols())).copy_from(&p.0);
            at += p.ncols();
        }
        Ok(Self(out))
    }

    /// Vertical concatenation; all parts need equal column counts.
    pub fn vstack(parts: &[&ComplexMatrix], cols: usize) -> Result<Self> {
        if let Some(p) = parts.iter().find(|p| p.ncols() != cols) {
            return Err(Error::DimensionMismatch(format!(
                "vstack part has {} columns, expected {cols}",
                p.ncols()
            )));
        }
        let rows = parts.iter().map(|p| p.nrows()).sum();
        let mut out = DMatrix::zeros(rows, cols);
        let mut at = 0;
        for p in parts {
            out.view_mut((at, 0), (p.nrows(), cols)).copy_from(&p.0);
            at += p.nrows();
        }
        Ok(Self(out))
    }

    pub fn row_block(&self, start: usize, len: usize) -> Self {
        Self(self.0.rows(start, len).into_owned())
    }

    pub fn column_block(&self, start: usize, len: usize) -> Self {
        Self(self.0.columns(start, len).into_owned())
    }

    pub fn column_vec(&self, j: usize) -> Vec<Complex64> {
        self.0.column(j).iter().copied().collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Complex64>> {
        (0..self.nrows())
            .map(|i| (0..self.ncols()).map(|j| self.0[(i, j)]).collect())
            .collect()
    }

    /// Hermitian part `(M + M*)/2`.
    pub fn hermitian_part(&self) -> Self {
        Self((&self.0 + self.0.adjoint()) * Complex64::new(0.5, 0.0))
    }

    pub fn pow(&self, n: u32) -> Self {
        assert!(self.is_square(), "power of a non-square matrix");
        let mut out = Self::identity(self.nrows());
        for _ in 0..n {
            out = &out * self;
        }
        out
    }
}

/// `‖a − b‖_F / max(‖a‖_F, ‖b‖_F)`, and 0 when both are zero.
pub fn relative_difference(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    let scale = a.frobenius_norm().max(b.frobenius_norm());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).frobenius_norm() / scale
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ComplexMatrix {}×{} [", self.nrows(), self.ncols())?;
        for i in 0..self.nrows() {
            write!(f, "[")?;
            for j in 0..self.ncols() {
                let z = self.0[(i, j)];
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}{:+}i", z.re, z.im)?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $op:tt) => {
        impl $tr<&ComplexMatrix> for &ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, rhs: &ComplexMatrix) -> ComplexMatrix {
                ComplexMatrix(&self.0 $op &rhs.0)
            }
        }
        impl $tr<ComplexMatrix> for ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, rhs: ComplexMatrix) -> ComplexMatrix {
                ComplexMatrix(self.0 $op rhs.0)
            }
        }
        impl $tr<&ComplexMatrix> for ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, rhs: &ComplexMatrix) -> ComplexMatrix {
                ComplexMatrix(self.0 $op &rhs.0)
            }
        }
        impl $tr<ComplexMatrix> for &ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, rhs: ComplexMatrix) -> ComplexMatrix {
                ComplexMatrix(&self.0 $op rhs.0)
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        ComplexMatrix(-&self.0)
    }
}

impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.nrows()))?;
        for i in 0..self.nrows() {
            let row: Vec<JsonScalar> = (0..self.ncols()).map(|j| JsonScalar(self.0[(i, j)])).collect();
            seq.serialize_element(&row)?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<Vec<JsonScalar>> = Vec::deserialize(d)?;
        let rows: Vec<Vec<Complex64>> = rows
            .into_iter()
            .map(|r| r.into_iter().map(|z| z.0).collect())
            .collect();
        ComplexMatrix::from_rows(&rows).map_err(de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn row_major_layout() {
        let m = ComplexMatrix::real(2, 3, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        assert_eq!(m.get(0, 2), c(3.0, 0.0));
        assert_eq!(m.get(1, 0), c(4.0, 0.0));
        assert_eq!(m.to_rows()[1][1], c(5.0, 0.0));
    }

    #[test]
    fn rejects_non_finite() {
        let err = ComplexMatrix::from_row_major(1, 2, &[c(1.0, 0.0), c(f64::NAN, 0.0)]).unwrap_err();
        assert!(matches!(err, Error::NonFinite { row: 0, col: 1 }));
        assert!(ComplexMatrix::from_row_major(2, 2, &[c(1.0, 0.0)]).is_err());
    }

    #[test]
    fn ragged_rows_rejected() {
        let err = ComplexMatrix::from_rows(&[vec![c(1.0, 0.0)], vec![c(1.0, 0.0), c(2.0, 0.0)]]).unwrap_err();
        assert!(err.to_string().contains("row 1"));
    }

    #[test]
    fn stacking() {
        let a = ComplexMatrix::real(2, 1, &[1.0, 2.0]);
        let b = ComplexMatrix::real(2, 2, &[3.0, 4.0, 5.0, 6.0]);
        let h = ComplexMatrix::hstack(&[&a, &b], 2).unwrap();
        assert_eq!(h, ComplexMatrix::real(2, 3, &[1.0, 3.0, 4.0, 2.0, 5.0, 6.0]));
        let v = ComplexMatrix::vstack(&[&a.adjoint(), &b], 2).unwrap();
        assert_eq!(v.shape(), (3, 2));
        assert!(ComplexMatrix::hstack(&[&a, &b.adjoint().row_block(0, 1)], 2).is_err());
        let empty = ComplexMatrix::hstack(&[], 3).unwrap();
        assert_eq!(empty.shape(), (3, 0));
    }

    #[test]
    fn json_format() {
        let m = ComplexMatrix::from_row_major(1, 2, &[c(1.0, -2.0), c(0.5, 0.0)]).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"[[{"re":1.0,"im":-2.0},{"re":0.5,"im":0.0}]]"#);
        let back: ComplexMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
        let real: ComplexMatrix = serde_json::from_str("[[1, 2], [3, 4.5]]").unwrap();
        assert_eq!(real, ComplexMatrix::real(2, 2, &[1.0, 2.0, 3.0, 4.5]));
        assert!(serde_json::from_str::<ComplexMatrix>("[[1], [2, 3]]").is_err());
    }

    #[test]
    fn powers() {
        let m = ComplexMatrix::diag_real(&[2.0, 3.0]);
        assert_eq!(m.pow(0), ComplexMatrix::identity(2));
        assert_eq!(m.pow(3), ComplexMatrix::diag_real(&[8.0, 27.0]));
    }
}
