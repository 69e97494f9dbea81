//! g-frame systems, their synthesis/analysis/frame operators, and
//! classification against an operator `K`.
//!
//! A family `{Λᵢ}` is a K-g-frame when
//! `A‖K*f‖² ≤ Σᵢ‖Λᵢf‖² ≤ B‖f‖²` for all `f`. In finite dimensions the upper
//! inequality always holds with `B = λ_max(S_Λ)`, and the lower one holds for
//! some `A > 0` exactly when `R(K) ⊆ R(T_Λ)`.

mod induced;
mod system;

use serde::{Deserialize, Serialize};

pub use induced::{induced_frame, induced_frame_bounds, InducedFrame};
pub use system::{CoefficientVector, GFrameSystem};

use crate::douglas::range_included;
use crate::error::{Error, Result};
use crate::numerics::{
    max_eigenvalue, max_pencil_shift, operator_norm, pinv, rank, relative_difference, ComplexMatrix,
    ToleranceConfig,
};

/// Halvings used by the optimal-lower-bound bisection.
pub const BOUND_BISECTION_ITERATIONS: usize = 60;

/// Optimal frame constants and classification flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameBounds {
    pub lower: f64,
    pub upper: f64,
    #[serde(rename = "bessel")]
    pub is_bessel: bool,
    #[serde(rename = "g_frame")]
    pub is_g_frame: bool,
    #[serde(rename = "k_g_frame")]
    pub is_k_g_frame: bool,
    #[serde(rename = "parseval")]
    pub is_parseval: bool,
    pub tightness: Option<f64>,
}

/// `T_Λ = [Λ₁* | … | Λ_N*]`, shape `n × Σmᵢ`.
pub fn synthesis(sys: &GFrameSystem) -> ComplexMatrix {
    let adjoints: Vec<ComplexMatrix> = sys.operators().iter().map(ComplexMatrix::adjoint).collect();
    let parts: Vec<&ComplexMatrix> = adjoints.iter().collect();
    ComplexMatrix::hstack(&parts, sys.ambient_dim()).expect("blocks share the ambient dimension")
}

/// `T_Λ* : f ↦ {Λᵢf}`, shape `Σmᵢ × n`.
pub fn analysis(sys: &GFrameSystem) -> ComplexMatrix {
    let parts: Vec<&ComplexMatrix> = sys.operators().iter().collect();
    ComplexMatrix::vstack(&parts, sys.ambient_dim()).expect("blocks share the ambient dimension")
}

/// `S_Λ = Σᵢ Λᵢ*Λᵢ`.
pub fn frame_operator(sys: &GFrameSystem) -> ComplexMatrix {
    let n = sys.ambient_dim();
    sys.operators()
        .iter()
        .fold(ComplexMatrix::zeros(n, n), |acc, op| acc + &op.adjoint() * op)
}

/// Applies `T_Λ` to a coefficient vector: `Σᵢ Λᵢ*fᵢ`.
pub fn synthesize(sys: &GFrameSystem, coeffs: &CoefficientVector) -> Result<Vec<crate::numerics::Complex64>> {
    if coeffs.block_dims() != sys.block_dims() {
        return Err(Error::DimensionMismatch("coefficient blocks do not match the system".into()));
    }
    Ok(synthesis(sys).apply(&coeffs.to_flat()))
}

/// Applies `T_Λ*`: `f ↦ {Λᵢf}`.
pub fn analyze(sys: &GFrameSystem, f: &[crate::numerics::Complex64]) -> Result<CoefficientVector> {
    if f.len() != sys.ambient_dim() {
        return Err(Error::DimensionMismatch(format!(
            "vector of length {} for ambient dimension {}",
            f.len(),
            sys.ambient_dim()
        )));
    }
    CoefficientVector::from_flat(&analysis(sys).apply(f), sys.block_dims())
}

pub(crate) fn check_k(sys: &GFrameSystem, k: &ComplexMatrix) -> Result<()> {
    let n = sys.ambient_dim();
    if k.shape() != (n, n) {
        return Err(Error::DimensionMismatch(format!(
            "K is {}×{}, expected {n}×{n}",
            k.nrows(),
            k.ncols()
        )));
    }
    Ok(())
}

/// `A_opt = max{λ ≥ 0 : S_Λ − λKK* ⪰ 0}` by bisection.
///
/// The search runs over `[0, λ_max(S_Λ)/λ_max(KK*)]`, which contains every
/// feasible λ (test the inequality on the top eigenvector of `KK*`). Results at
/// or below `psd_rel` times that bracket are tolerance residue of an infeasible
/// pencil and are reported as 0. For `K = 0` every λ is feasible and the bound
/// is reported as `λ_max(S_Λ)`.
pub fn optimal_k_lower_bound(sys: &GFrameSystem, k: &ComplexMatrix, tol: &ToleranceConfig) -> Result<f64> {
    check_k(sys, k)?;
    let s = frame_operator(sys);
    let s_max = max_eigenvalue(&s, tol)?;
    if k.is_zero() {
        return Ok(s_max);
    }
    let kk = k * &k.adjoint();
    let kk_max = max_eigenvalue(&kk, tol)?;
    if s_max == 0.0 || kk_max == 0.0 {
        return Ok(0.0);
    }
    let hi = s_max / kk_max;
    let lambda = max_pencil_shift(&s, &kk, hi, BOUND_BISECTION_ITERATIONS, tol)?;
    Ok(if lambda <= tol.psd_rel * hi { 0.0 } else { lambda })
}

/// Closed form `1/‖T_Λ⁺K‖²` of the optimal lower bound, valid when `R(K) ⊆ R(T_Λ)`.
pub fn pinv_k_lower_bound(sys: &GFrameSystem, k: &ComplexMatrix, tol: &ToleranceConfig) -> Result<f64> {
    check_k(sys, k)?;
    let q = &pinv(&synthesis(sys), tol)? * k;
    let norm = operator_norm(&q)?;
    Ok(1.0 / (norm * norm))
}

/// Optimal bounds and flags of `sys` as a K-g-frame.
///
/// `is_k_g_frame` is decided by the range test `R(K) ⊆ R(T_Λ)`; the optimal
/// lower bound is 0 when it fails.
pub fn classify(sys: &GFrameSystem, k: &ComplexMatrix, tol: &ToleranceConfig) -> Result<FrameBounds> {
    check_k(sys, k)?;
    let n = sys.ambient_dim();
    let t = synthesis(sys);
    let s = frame_operator(sys);
    let upper = max_eigenvalue(&s, tol)?;
    let is_k_g_frame = range_included(k, &t, tol)?;
    let lower = if is_k_g_frame {
        optimal_k_lower_bound(sys, k, tol)?
    } else {
        0.0
    };
    let is_g_frame = rank(&t, tol)? == n;
    let kk = k * &k.adjoint();
    let is_parseval = relative_difference(&s, &kk) <= tol.residual_rel;
    let tightness = if is_parseval {
        Some(1.0)
    } else {
        tight_constant(&s, &kk, tol)
    };
    Ok(FrameBounds {
        lower,
        upper,
        is_bessel: true,
        is_g_frame,
        is_k_g_frame,
        is_parseval,
        tightness,
    })
}

/// λ with `S = λ·KK*` within `residual_rel`, if one exists.
pub(crate) fn tight_constant(s: &ComplexMatrix, kk: &ComplexMatrix, tol: &ToleranceConfig) -> Option<f64> {
    let denom = kk.frobenius_norm().powi(2);
    if denom == 0.0 {
        return None;
    }
    let inner: f64 = s
        .inner()
        .iter()
        .zip(kk.inner().iter())
        .map(|(a, b)| (a * b.conj()).re)
        .sum();
    let lambda = inner / denom;
    (relative_difference(s, &kk.scale_real(lambda)) <= tol.residual_rel).then_some(lambda)
}
