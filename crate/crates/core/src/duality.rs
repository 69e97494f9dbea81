//! K-duals: `Γ` is a K-dual of `Λ` when `K = T_Λ·T_Γ*`, i.e. `Kf = Σᵢ Λᵢ*Γᵢf`.

use serde::{Deserialize, Serialize};

use crate::douglas::{douglas_factor, range_included};
use crate::error::{Error, Hypothesis, Result};
use crate::gframe::{analysis, check_k, frame_operator, optimal_k_lower_bound, synthesis, GFrameSystem};
use crate::numerics::{max_eigenvalue, operator_norm, orth_projector, range_basis, Complex64, ComplexMatrix, ToleranceConfig};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KDualPair {
    pub primal: GFrameSystem,
    pub dual: GFrameSystem,
    #[serde(rename = "K")]
    pub k: ComplexMatrix,
    /// `‖T_Λ·T_Γ* − K‖_F / max(‖K‖_F, 1)`
    pub reconstruction_residual: f64,
}

impl KDualPair {
    /// `‖T_Γ‖²`
    pub fn dual_norm_sq(&self) -> f64 {
        operator_norm(&synthesis(&self.dual)).map_or(0.0, |n| n * n)
    }
}

fn check_pair(primal: &GFrameSystem, dual: &GFrameSystem, k: &ComplexMatrix) -> Result<()> {
    if !primal.same_shape(dual) {
        return Err(Error::DimensionMismatch(format!(
            "primal has blocks {:?} on ℂ^{}, dual has blocks {:?} on ℂ^{}",
            primal.block_dims(),
            primal.ambient_dim(),
            dual.block_dims(),
            dual.ambient_dim()
        )));
    }
    check_k(primal, k)
}

fn reconstruction_residual(primal: &GFrameSystem, dual: &GFrameSystem, k: &ComplexMatrix) -> f64 {
    let tt = &synthesis(primal) * &analysis(dual);
    (&tt - k).frobenius_norm() / k.frobenius_norm().max(1.0)
}

pub fn is_k_dual(primal: &GFrameSystem, dual: &GFrameSystem, k: &ComplexMatrix, tol: &ToleranceConfig) -> Result<bool> {
    check_pair(primal, dual, k)?;
    Ok(reconstruction_residual(primal, dual, k) <= tol.residual_rel)
}

/// The minimal-norm K-dual: `T_Θ* = T_Λ⁺K`, so `Θᵢ` is the i-th block row of `T_Λ⁺K`.
pub fn canonical_k_dual(sys: &GFrameSystem, k: &ComplexMatrix, tol: &ToleranceConfig) -> Result<KDualPair> {
    check_k(sys, k)?;
    let t = synthesis(sys);
    if !range_included(k, &t, tol)? {
        return Err(Error::NotKGFrame);
    }
    let factor = douglas_factor(k, &t, tol).map_err(|e| match e {
        Error::RangeNotIncluded => Error::NotKGFrame,
        other => other,
    })?;
    let dual = GFrameSystem::from_analysis(&factor.q, sys.block_dims())?;
    let reconstruction_residual = reconstruction_residual(sys, &dual, k);
    Ok(KDualPair {
        primal: sys.clone(),
        dual,
        k: k.clone(),
        reconstruction_residual,
    })
}

/// Checks `‖T_Θ*f‖ ≤ ‖T_Γ*f‖` on every probe and `‖T_Θ‖ ≤ ‖T_Γ‖` for every alternate K-dual `Γ`.
pub fn dual_minimality_check(
    pair: &KDualPair,
    alternates: &[GFrameSystem],
    probes: &[Vec<Complex64>],
    tol: &ToleranceConfig,
) -> Result<bool> {
    let n = pair.primal.ambient_dim();
    if let Some(bad) = probes.iter().find(|f| f.len() != n) {
        return Err(Error::DimensionMismatch(format!(
            "probe of length {} for ambient dimension {n}",
            bad.len()
        )));
    }
    for (i, alt) in alternates.iter().enumerate() {
        if !is_k_dual(&pair.primal, alt, &pair.k, tol)? {
            return Err(Error::NotADual(i));
        }
    }
    let theta = analysis(&pair.dual);
    let theta_norm = operator_norm(&theta)?;
    for alt in alternates {
        let gamma = analysis(alt);
        if theta_norm > operator_norm(&gamma)? + tol.residual_rel {
            return Ok(false);
        }
        for f in probes {
            let f_norm = vec_norm(f);
            if vec_norm(&theta.apply(f)) > vec_norm(&gamma.apply(f)) + tol.residual_rel * f_norm {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

pub(crate) fn vec_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubspaceDualBound {
    pub holds: bool,
    pub predicted_lower: f64,
    pub measured_lower: f64,
}

/// Lower bound from a dual on `R(K)`.
///
/// `Γ` is a dual on `R(K)` when `⟨g, h⟩ = Σᵢ⟨Γᵢg, Λᵢh⟩` for `g, h ∈ R(K)`,
/// tested as `P·T_Γ·T_Λ*·g = g` on an orthonormal basis of `R(K)`. Together
/// with `S_Λ(R(K)) ⊆ R(K)` this gives `A ≥ 1/(λ_max(S_Γ)·‖K‖²)`.
pub fn subspace_dual_implies_k_g_frame(
    sys: &GFrameSystem,
    dual_on_range: &GFrameSystem,
    k: &ComplexMatrix,
    tol: &ToleranceConfig,
) -> Result<SubspaceDualBound> {
    check_pair(sys, dual_on_range, k)?;
    let n = sys.ambient_dim();
    let p = orth_projector(k, tol)?;
    let basis = range_basis(k, tol)?;
    let pairing = &(&p * &synthesis(dual_on_range)) * &analysis(sys);
    let defect = &(&pairing * &basis) - &basis;
    for j in 0..defect.ncols() {
        if vec_norm(&defect.column_vec(j)) > tol.residual_rel {
            return Err(Error::HypothesisViolated(Hypothesis::DualityOnRange));
        }
    }
    let s = frame_operator(sys);
    let leak = &(&(&ComplexMatrix::identity(n) - &p) * &s) * &p;
    if leak.frobenius_norm() > tol.residual_rel * s.frobenius_norm() {
        return Err(Error::HypothesisViolated(Hypothesis::FrameOperatorInvariance));
    }

    let measured_lower = optimal_k_lower_bound(sys, k, tol)?;
    if k.is_zero() {
        return Ok(SubspaceDualBound {
            holds: true,
            predicted_lower: measured_lower,
            measured_lower,
        });
    }
    let d = max_eigenvalue(&frame_operator(dual_on_range), tol)?;
    let k_norm = operator_norm(k)?;
    let predicted_lower = 1.0 / (d * k_norm * k_norm);
    Ok(SubspaceDualBound {
        holds: measured_lower >= predicted_lower - tol.psd_rel * predicted_lower.max(1.0),
        predicted_lower,
        measured_lower,
    })
}
