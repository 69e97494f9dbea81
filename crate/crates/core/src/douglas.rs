//! Douglas factorization: for `U, V` with equal row counts the statements
//! `R(U) ⊆ R(V)`, `UU* ⪯ μVV*` for some μ, and `U = VQ` for some `Q` are
//! equivalent. The least-norm factor is `Q = V⁺U`; it is the unique one with
//! `R(Q) ⊆ R(V*)`, it satisfies `N(Q) = N(U)`, and `‖Q‖² = inf{μ : UU* ⪯ μVV*}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{min_pencil_scale, operator_norm, pinv, rank, svd, ComplexMatrix, ToleranceConfig};

const MAJORIZATION_ITERATIONS: usize = 100;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DouglasFactor {
    pub q: ComplexMatrix,
    /// `‖Q‖²`, the minimal majorization constant.
    pub mu_star: f64,
    /// `‖U − VQ‖_F / max(‖U‖_F, 1)`.
    pub residual: f64,
}

fn check_rows(u: &ComplexMatrix, v: &ComplexMatrix) -> Result<()> {
    if u.nrows() != v.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "U has {} rows but V has {}",
            u.nrows(),
            v.nrows()
        )));
    }
    Ok(())
}

/// `R(U) ⊆ R(V)` as the rank test `rank([V | U]) = rank(V)`.
///
/// Both operands are normalized to unit spectral norm first, so the shared
/// relative cutoff sees the two ranges at the same scale.
pub fn range_included(u: &ComplexMatrix, v: &ComplexMatrix, tol: &ToleranceConfig) -> Result<bool> {
    check_rows(u, v)?;
    let u_norm = operator_norm(u)?;
    if u_norm == 0.0 {
        return Ok(true);
    }
    let v_norm = operator_norm(v)?;
    if v_norm == 0.0 {
        return Ok(false);
    }
    let vs = v.scale_real(1.0 / v_norm);
    let us = u.scale_real(1.0 / u_norm);
    let joint = ComplexMatrix::hstack(&[&vs, &us], v.nrows())?;
    Ok(rank(&joint, tol)? <= rank(&vs, tol)?)
}

/// The minimal-norm solution `Q = V⁺U` of `U = VQ`.
pub fn douglas_factor(u: &ComplexMatrix, v: &ComplexMatrix, tol: &ToleranceConfig) -> Result<DouglasFactor> {
    if !range_included(u, v, tol)? {
        return Err(Error::RangeNotIncluded);
    }
    let q = &pinv(v, tol)? * u;
    let residual = (u - &(v * &q)).frobenius_norm() / u.frobenius_norm().max(1.0);
    if residual > tol.residual_rel {
        return Err(Error::RangeNotIncluded);
    }
    let norm = operator_norm(&q)?;
    Ok(DouglasFactor {
        q,
        mu_star: norm * norm,
        residual,
    })
}

/// `inf{μ ≥ 0 : UU* ⪯ μVV*}` by bisection on the pencil `(UU*, VV*)`.
///
/// The search is capped at `(‖U‖/σ⁺_min(V))² + 1`; infeasibility there means
/// the range inclusion fails.
pub fn min_majorization_constant(u: &ComplexMatrix, v: &ComplexMatrix, tol: &ToleranceConfig) -> Result<f64> {
    if !range_included(u, v, tol)? {
        return Err(Error::RangeNotIncluded);
    }
    let u_norm = operator_norm(u)?;
    if u_norm == 0.0 {
        return Ok(0.0);
    }
    let v_svd = svd(v)?;
    let v_norm = v_svd.max_singular_value();
    let v_min = v_svd.min_positive_singular_value(tol);
    let cap = (u_norm / v_min).powi(2) + 1.0;
    let floor = (u_norm / v_norm).powi(2);
    let uu = u * &u.adjoint();
    let vv = v * &v.adjoint();
    min_pencil_scale(&uu, &vv, floor, cap, MAJORIZATION_ITERATIONS, tol)?.ok_or(Error::RangeNotIncluded)
}
