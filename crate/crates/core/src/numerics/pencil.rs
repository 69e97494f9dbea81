//! Bisection on Hermitian pencils `A − λB` with `A, B ⪰ 0`.
//!
//! Both searches use a scale-aware PSD predicate: `M` counts as PSD when
//! `λ_min(M) ≥ −ε·(λ_max(A) + λ·λ_max(B))` with `ε = psd_rel·BISECTION_FLOOR`.
//! The floor tracks eigensolver noise on the pencil rather than the absolute
//! `max(λ_max, 1)` floor of [`psd_min_shift`](super::psd_min_shift), so that an
//! infeasible pencil (a direction with `Bf ≠ 0` but `Af = 0`) drives the search
//! to zero instead of settling at a tolerance-sized λ.
//!
//! The pencil is first compressed onto `R(A) + R(B)`. Directions annihilated by
//! both carry only rounding noise, and with them removed the floor can sit a
//! few dozen ulps above machine precision. The search error then scales like
//! `ε·‖A‖/λ*` relative, which keeps small optima accurate.

use super::decomp::{hermitian_eig, range_basis};
use super::matrix::ComplexMatrix;
use super::tolerance::ToleranceConfig;
use crate::error::Result;

pub const BISECTION_FLOOR: f64 = 1e-5;

struct Pencil<'a> {
    a: ComplexMatrix,
    b: ComplexMatrix,
    a_max: f64,
    b_max: f64,
    eps: f64,
    tol: &'a ToleranceConfig,
}

impl<'a> Pencil<'a> {
    fn new(a: &ComplexMatrix, b: &ComplexMatrix, tol: &'a ToleranceConfig) -> Result<Self> {
        let support = range_basis(&ComplexMatrix::hstack(&[a, b], a.nrows())?, tol)?;
        let compress = |m: &ComplexMatrix| (&(&support.adjoint() * m) * &support).hermitian_part();
        let (a, b) = (compress(a), compress(b));
        let a_max = max_eigenvalue(&a, tol)?;
        let b_max = max_eigenvalue(&b, tol)?;
        Ok(Self {
            a,
            b,
            a_max,
            b_max,
            eps: tol.psd_rel * BISECTION_FLOOR,
            tol,
        })
    }

    /// `A − λB ⪰ 0` under the scale-aware floor.
    fn below(&self, lambda: f64) -> Result<bool> {
        let m = &self.a - &self.b.scale_real(lambda);
        let lmin = min_eigenvalue(&m, self.tol)?;
        Ok(lmin >= -self.eps * (self.a_max + lambda * self.b_max))
    }

    /// `μB − A ⪰ 0` under the scale-aware floor.
    fn above(&self, mu: f64) -> Result<bool> {
        let m = &self.b.scale_real(mu) - &self.a;
        let lmin = min_eigenvalue(&m, self.tol)?;
        Ok(lmin >= -self.eps * (self.a_max + mu * self.b_max))
    }
}

pub(crate) fn max_eigenvalue(m: &ComplexMatrix, tol: &ToleranceConfig) -> Result<f64> {
    Ok(hermitian_eig(m, tol)?.eigenvalues.last().copied().unwrap_or(0.0))
}

pub(crate) fn min_eigenvalue(m: &ComplexMatrix, tol: &ToleranceConfig) -> Result<f64> {
    Ok(hermitian_eig(m, tol)?.eigenvalues.first().copied().unwrap_or(0.0))
}

/// Largest `λ ∈ [0, hi]` with `A − λB ⪰ 0`, to `iterations` halvings of `hi`.
///
/// `λ = 0` is always feasible for PSD `A`. Returns `hi` itself when it is feasible.
pub fn max_pencil_shift(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    hi: f64,
    iterations: usize,
    tol: &ToleranceConfig,
) -> Result<f64> {
    let pencil = Pencil::new(a, b, tol)?;
    if pencil.below(hi)? {
        return Ok(hi);
    }
    let (mut lo, mut hi) = (0.0, hi);
    for _ in 0..iterations {
        let mid = 0.5 * (lo + hi);
        if pencil.below(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Smallest `μ ∈ [lo, hi]` with `μB − A ⪰ 0`, or `None` when `hi` is infeasible.
///
/// `lo` must be a lower bound of the true infimum (it is never tested).
pub fn min_pencil_scale(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    lo: f64,
    hi: f64,
    iterations: usize,
    tol: &ToleranceConfig,
) -> Result<Option<f64>> {
    let pencil = Pencil::new(a, b, tol)?;
    if !pencil.above(hi)? {
        return Ok(None);
    }
    let (mut lo, mut hi) = (lo, hi);
    for _ in 0..iterations {
        let mid = 0.5 * (lo + hi);
        if pencil.above(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(hi))
}
