//! Spectral machinery: Hermitian eigendecomposition, SVD, and everything
//! derived from the SVD under the shared rank cutoff.
//!
//! Both factorizations go through LAPACK (`zheevd`, `zgesvd`). nalgebra's
//! bidiagonal QR sweep aborts early on rank-deficient complex input and
//! returns factors that do not reconstruct the matrix, and rank-deficient
//! input is the normal case here.

use ndarray::{s, Array2, ShapeBuilder};
use num_complex::Complex64;
use ndarray_linalg::{Eigh, SVD, UPLO};

use super::matrix::ComplexMatrix;
use super::tolerance::ToleranceConfig;
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct HermitianEig {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Unitary; column `k` belongs to `eigenvalues[k]`.
    pub eigenvectors: ComplexMatrix,
}

/// Thin SVD `M = U·diag(σ)·V*` with σ descending.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: ComplexMatrix,
    pub singular_values: Vec<f64>,
    pub v: ComplexMatrix,
}

impl Svd {
    /// σ_max, or 0 for an empty or zero matrix.
    pub fn max_singular_value(&self) -> f64 {
        self.singular_values.first().copied().unwrap_or(0.0)
    }

    /// Number of singular values at or above `rank_rel·σ_max`.
    pub fn rank(&self, tol: &ToleranceConfig) -> usize {
        let smax = self.max_singular_value();
        if smax == 0.0 {
            return 0;
        }
        let cutoff = tol.rank_rel * smax;
        self.singular_values.iter().take_while(|&&s| s >= cutoff).count()
    }

    /// Smallest singular value kept by the rank cutoff (σ⁺_min), 0 if rank 0.
    pub fn min_positive_singular_value(&self, tol: &ToleranceConfig) -> f64 {
        match self.rank(tol) {
            0 => 0.0,
            r => self.singular_values[r - 1],
        }
    }
}

pub fn adjoint(m: &ComplexMatrix) -> ComplexMatrix {
    m.adjoint()
}

fn check_hermitian(m: &ComplexMatrix, tol: &ToleranceConfig) -> Result<()> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "Hermitian input must be square, got {}×{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let norm = m.frobenius_norm();
    let asym = (m - &m.adjoint()).frobenius_norm();
    if asym > tol.residual_rel * norm {
        return Err(Error::NotHermitian(if norm > 0.0 { asym / norm } else { asym }));
    }
    Ok(())
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
///
/// The input is symmetrized before factoring, so asymmetry below the
/// `residual_rel` precondition never leaks into complex eigenvalues.
pub fn hermitian_eig(m: &ComplexMatrix, tol: &ToleranceConfig) -> Result<HermitianEig> {
    check_hermitian(m, tol)?;
    let n = m.nrows();
    if n == 0 {
        return Ok(HermitianEig {
            eigenvalues: Vec::new(),
            eigenvectors: ComplexMatrix::zeros(0, 0),
        });
    }
    let (values, vectors) = to_array(&m.hermitian_part())
        .eigh(UPLO::Lower)
        .map_err(|_| Error::ConvergenceFailure)?;
    Ok(HermitianEig {
        eigenvalues: values.to_vec(),
        eigenvectors: from_array(&vectors)?,
    })
}

fn to_array(m: &ComplexMatrix) -> Array2<Complex64> {
    // Column-major, so LAPACK sees the matrix itself rather than its transpose.
    Array2::from_shape_fn(m.shape().f(), |(i, j)| m.get(i, j))
}

fn from_array(a: &Array2<Complex64>) -> Result<ComplexMatrix> {
    let (rows, cols) = a.dim();
    let m = ComplexMatrix::from_fn(rows, cols, |i, j| a[(i, j)]);
    if m.inner().iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(m)
    } else {
        Err(Error::ConvergenceFailure)
    }
}

pub fn svd(m: &ComplexMatrix) -> Result<Svd> {
    let (rows, cols) = m.shape();
    let k = rows.min(cols);
    if k == 0 {
        return Ok(Svd {
            u: ComplexMatrix::zeros(rows, 0),
            singular_values: Vec::new(),
            v: ComplexMatrix::zeros(cols, 0),
        });
    }
    let (u, sigma, v_t) = to_array(m).svd(true, true).map_err(|_| Error::ConvergenceFailure)?;
    let (u, v_t) = u.zip(v_t).ok_or(Error::ConvergenceFailure)?;
    let v = v_t.slice(s![..k, ..]).t().mapv(|z| z.conj());
    // LAPACK returns σ descending.
    Ok(Svd {
        u: from_array(&u.slice(s![.., ..k]).to_owned())?,
        singular_values: sigma.to_vec(),
        v: from_array(&v)?,
    })
}

/// Moore–Penrose pseudoinverse with singular values below `rank_rel·σ_max` discarded.
pub fn pinv(m: &ComplexMatrix, tol: &ToleranceConfig) -> Result<ComplexMatrix> {
    let dec = svd(m)?;
    let r = dec.rank(tol);
    let (rows, cols) = m.shape();
    if r == 0 {
        return Ok(ComplexMatrix::zeros(cols, rows));
    }
    let inv = ComplexMatrix::diag_real(
        &dec.singular_values[..r].iter().map(|s| 1.0 / s).collect::<Vec<_>>(),
    );
    let v = dec.v.column_block(0, r);
    let u = dec.u.column_block(0, r);
    Ok(&(&v * &inv) * &u.adjoint())
}

pub fn operator_norm(m: &ComplexMatrix) -> Result<f64> {
    Ok(svd(m)?.max_singular_value())
}

/// PSD test with the floor `λ_min ≥ −psd_rel·max(λ_max, 1)`; returns the flag and λ_min.
pub fn psd_min_shift(m: &ComplexMatrix, tol: &ToleranceConfig) -> Result<(bool, f64)> {
    let eig = hermitian_eig(m, tol)?;
    let (Some(&lmin), Some(&lmax)) = (eig.eigenvalues.first(), eig.eigenvalues.last()) else {
        return Ok((true, 0.0));
    };
    Ok((lmin >= -tol.psd_rel * lmax.max(1.0), lmin))
}

pub fn rank(m: &ComplexMatrix, tol: &ToleranceConfig) -> Result<usize> {
    Ok(svd(m)?.rank(tol))
}

/// Orthonormal basis of `range(M)` as the columns of an `nrows × rank` matrix.
pub fn range_basis(m: &ComplexMatrix, tol: &ToleranceConfig) -> Result<ComplexMatrix> {
    let dec = svd(m)?;
    let r = dec.rank(tol);
    Ok(dec.u.column_block(0, r))
}

/// Orthogonal projector onto `range(M)`.
pub fn orth_projector(m: &ComplexMatrix, tol: &ToleranceConfig) -> Result<ComplexMatrix> {
    let basis = range_basis(m, tol)?;
    Ok(&basis * &basis.adjoint())
}

/// Orthonormal basis of `null(M)`, computed as the range of `I − M⁺M`.
pub fn null_basis(m: &ComplexMatrix, tol: &ToleranceConfig) -> Result<ComplexMatrix> {
    let n = m.ncols();
    let p = &pinv(m, tol)? * m;
    let dec = svd(&(ComplexMatrix::identity(n) - p))?;
    // I − M⁺M is an exact projector up to rounding: its nonzero singular values are ≈ 1.
    let k = dec.singular_values.iter().take_while(|&&s| s > 0.5).count();
    Ok(dec.u.column_block(0, k))
}

/// `Σ_k λ_k v_k v_k*` for a Hermitian eigendecomposition.
#[cfg(test)]
fn reconstruct(eig: &HermitianEig) -> ComplexMatrix {
    let v = &eig.eigenvectors;
    &(v * &ComplexMatrix::diag_real(&eig.eigenvalues)) * &v.adjoint()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    fn close(a: f64, b: f64, eps: f64) -> bool {
        (a - b).abs() <= eps
    }

    #[test]
    fn adjoint_examples() {
        let i = ComplexMatrix::from_row_major(1, 1, &[c(0.0, 1.0)]).unwrap();
        assert_eq!(adjoint(&i).get(0, 0), c(0.0, -1.0));
        assert_eq!(adjoint(&ComplexMatrix::identity(3)), ComplexMatrix::identity(3));
        let m = ComplexMatrix::real(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(adjoint(&m), ComplexMatrix::real(2, 2, &[1.0, 3.0, 2.0, 4.0]));
    }

    /// Roots of λ² − tr·λ + det for a real symmetric 2×2.
    fn quadratic_eigs(a: f64, b: f64, d: f64) -> (f64, f64) {
        let tr = a + d;
        let det = a * d - b * b;
        let disc = (tr * tr - 4.0 * det).sqrt();
        ((tr - disc) / 2.0, (tr + disc) / 2.0)
    }

    #[test]
    fn hermitian_eig_examples() {
        let e = hermitian_eig(&ComplexMatrix::diag_real(&[4.0, 1.0]), &tol()).unwrap();
        assert_eq!(e.eigenvalues, vec![1.0, 4.0]);

        let e = hermitian_eig(&ComplexMatrix::zeros(3, 3), &tol()).unwrap();
        assert!(e.eigenvalues.iter().all(|&l| l == 0.0));

        let (lo, hi) = quadratic_eigs(2.0, 1.0, 2.0);
        assert_eq!((lo, hi), (1.0, 3.0));
        let e = hermitian_eig(&ComplexMatrix::real(2, 2, &[2.0, 1.0, 1.0, 2.0]), &tol()).unwrap();
        assert!(close(e.eigenvalues[0], lo, 1e-14) && close(e.eigenvalues[1], hi, 1e-14));
    }

    #[test]
    fn hermitian_eig_rejects_asymmetric() {
        let m = ComplexMatrix::real(2, 2, &[1.0, 2.0, 0.0, 1.0]);
        assert!(matches!(hermitian_eig(&m, &tol()), Err(Error::NotHermitian(_))));
        let rect = ComplexMatrix::zeros(2, 3);
        assert!(matches!(hermitian_eig(&rect, &tol()), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn svd_examples() {
        let s = svd(&ComplexMatrix::identity(3)).unwrap();
        assert_eq!(s.singular_values, vec![1.0; 3]);

        let s = svd(&ComplexMatrix::real(2, 2, &[0.0, 2.0, 0.0, 0.0])).unwrap();
        assert!(close(s.singular_values[0], 2.0, 1e-15) && close(s.singular_values[1], 0.0, 1e-15));

        // rank-1 outer product: σ₁ = ‖x‖·‖y‖
        let x = [c(1.0, 2.0), c(-0.5, 0.0), c(0.0, 3.0)];
        let y = [c(2.0, -1.0), c(1.0, 1.0)];
        let xy = &ComplexMatrix::column(&x) * &ComplexMatrix::column(&y).adjoint();
        let nx: f64 = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let ny: f64 = y.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let s = svd(&xy).unwrap();
        assert!(close(s.singular_values[0], nx * ny, 1e-12));
        assert!(s.singular_values[1].abs() < 1e-12);
        assert_eq!(s.rank(&tol()), 1);
    }

    #[test]
    fn svd_empty_shapes() {
        let s = svd(&ComplexMatrix::zeros(3, 0)).unwrap();
        assert!(s.singular_values.is_empty());
        assert_eq!(s.u.shape(), (3, 0));
        assert_eq!(pinv(&ComplexMatrix::zeros(3, 0), &tol()).unwrap().shape(), (0, 3));
    }

    #[test]
    fn pinv_examples() {
        let p = pinv(&ComplexMatrix::real(1, 1, &[2.0]), &tol()).unwrap();
        assert!(close(p.get(0, 0).re, 0.5, 1e-15));

        let d = ComplexMatrix::diag_real(&[1.0, 0.0]);
        assert!((pinv(&d, &tol()).unwrap() - &d).frobenius_norm() < 1e-15);

        // Normal equations for [[1],[1]]: (AᵀA)⁻¹Aᵀ = [1/2, 1/2].
        let a = ComplexMatrix::real(2, 1, &[1.0, 1.0]);
        let normal = 1.0 / 2.0;
        let p = pinv(&a, &tol()).unwrap();
        assert_eq!(p.shape(), (1, 2));
        assert!(close(p.get(0, 0).re, normal, 1e-15) && close(p.get(0, 1).re, normal, 1e-15));

        assert_eq!(pinv(&ComplexMatrix::zeros(2, 3), &tol()).unwrap(), ComplexMatrix::zeros(3, 2));
    }

    #[test]
    fn norm_examples() {
        assert!(close(operator_norm(&ComplexMatrix::identity(4)).unwrap(), 1.0, 1e-15));
        assert!(close(operator_norm(&ComplexMatrix::identity(4).scale_real(3.0)).unwrap(), 3.0, 1e-14));
        assert!(close(operator_norm(&ComplexMatrix::real(2, 2, &[0.0, 2.0, 0.0, 0.0])).unwrap(), 2.0, 1e-15));
        assert_eq!(operator_norm(&ComplexMatrix::zeros(0, 0)).unwrap(), 0.0);
    }

    #[test]
    fn psd_examples() {
        assert_eq!(psd_min_shift(&ComplexMatrix::identity(2), &tol()).unwrap(), (true, 1.0));
        let (ok, l) = psd_min_shift(&ComplexMatrix::diag_real(&[1.0, -1.0]), &tol()).unwrap();
        assert!(!ok && l == -1.0);
        assert_eq!(psd_min_shift(&ComplexMatrix::zeros(2, 2), &tol()).unwrap(), (true, 0.0));
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&ComplexMatrix::identity(5), &tol()).unwrap(), 5);
        assert_eq!(rank(&ComplexMatrix::zeros(3, 4), &tol()).unwrap(), 0);
    }

    #[test]
    fn projector_examples() {
        let m = ComplexMatrix::real(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        let p = orth_projector(&m, &tol()).unwrap();
        assert!((p - ComplexMatrix::identity(2)).frobenius_norm() < 1e-14);

        let d = ComplexMatrix::diag_real(&[1.0, 0.0]);
        assert!((orth_projector(&d, &tol()).unwrap() - &d).frobenius_norm() < 1e-15);

        let col = ComplexMatrix::real(2, 1, &[1.0, 1.0]);
        let p = orth_projector(&col, &tol()).unwrap();
        let expected = ComplexMatrix::real(2, 2, &[0.5, 0.5, 0.5, 0.5]);
        assert!((&p - &expected).frobenius_norm() < 1e-15);
        assert!((&(&p * &p) - &p).frobenius_norm() < 1e-15);
    }

    #[test]
    fn null_basis_of_wide_matrix() {
        let m = ComplexMatrix::real(1, 3, &[1.0, 1.0, 0.0]);
        let nb = null_basis(&m, &tol()).unwrap();
        assert_eq!(nb.shape(), (3, 2));
        assert!((&m * &nb).frobenius_norm() < 1e-14);
        let gram = &nb.adjoint() * &nb;
        assert!((gram - ComplexMatrix::identity(2)).frobenius_norm() < 1e-14);
        assert_eq!(null_basis(&ComplexMatrix::identity(2), &tol()).unwrap().ncols(), 0);
    }

    #[test]
    fn eig_reconstructs() {
        let a = ComplexMatrix::from_fn(4, 4, |i, j| c((i + 2 * j) as f64 * 0.3 - 1.0, i as f64 - j as f64));
        let h = &a + &a.adjoint();
        let e = hermitian_eig(&h, &tol()).unwrap();
        assert!((reconstruct(&e) - &h).frobenius_norm() <= 1e-12 * h.frobenius_norm());
        assert!(e.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }

    use crate::test_support::complex_matrix;
    use proptest::prelude::*;

    proptest! {
        // Low-rank products: the bidiagonal form has exact zeros on its diagonal.
        #[test]
        fn low_rank_svd_reconstructs(
            (left, right) in (1usize..8, 1usize..8, 1usize..4)
                .prop_flat_map(|(rows, cols, r)| (complex_matrix(rows, r), complex_matrix(r, cols)))
        ) {
            let m = &left * &right;
            let d = svd(&m).unwrap();
            let back = &(&d.u * &ComplexMatrix::diag_real(&d.singular_values)) * &d.v.adjoint();
            prop_assert!((&back - &m).frobenius_norm() <= 1e-13 * m.frobenius_norm().max(1.0));
            let k = d.singular_values.len();
            prop_assert!((&(&d.v.adjoint() * &d.v) - &ComplexMatrix::identity(k)).frobenius_norm() < 1e-13);
            prop_assert!(d.singular_values.windows(2).all(|w| w[0] >= w[1]));
            prop_assert!(d.rank(&tol()) <= left.ncols());
        }
    }
}
