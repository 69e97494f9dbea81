//! One trial per statement: build an instance satisfying the hypotheses, then
//! read it back from its serialized form and check the conclusion.

use super::{CampaignSpec, Generator, TheoremId, TrialOutcome};
use crate::atomic::{
    atomic_coefficients, bound_le, combine_linear, combine_product, is_atomic_system, k_g_frame_via_frame_operator,
    operator_weighted_sum, parseval_sum, perturb_sum, positive_perturbation,
};
use crate::douglas::{douglas_factor, min_majorization_constant};
use crate::duality::{canonical_k_dual, dual_minimality_check, is_k_dual, subspace_dual_implies_k_g_frame, vec_norm};
use crate::error::{Error, Result};
use crate::frame_file::FrameSpecFile;
use crate::gframe::{
    analysis, classify, frame_operator, induced_frame, induced_frame_bounds, pinv_k_lower_bound, synthesis,
    GFrameSystem,
};
use crate::numerics::{
    null_basis, operator_norm, orth_projector, pinv, range_basis, rank, Complex64, ComplexMatrix, JsonScalar,
    ToleranceConfig,
};

/// Alternate duals and probe vectors per canonical-dual trial.
const ALTERNATES: usize = 50;
const PROBES: usize = 100;

/// Acceptance thresholds shared by the campaigns.
const BOUND_AGREEMENT: f64 = 1e-8;
const ORACLE_REL: f64 = 1e-6;
const RECONSTRUCTION_REL: f64 = 1e-10;
const IDENTITY_REL: f64 = 1e-10;

struct Verdict {
    passed: bool,
    residual: f64,
    reason: String,
    conclusion: Option<(bool, bool)>,
}

impl Verdict {
    fn new(passed: bool, residual: f64, reason: impl FnOnce() -> String) -> Self {
        Self {
            passed,
            residual,
            reason: if passed { String::new() } else { reason() },
            conclusion: None,
        }
    }
}

pub(crate) fn run_trial(spec: &CampaignSpec, trial: usize) -> TrialOutcome {
    let mut g = Generator::for_trial(spec.seed, trial as u64);
    let tol = &spec.tol;
    let (n, mut dims) = g.dims(&spec.dims);
    let built = match spec.theorem {
        TheoremId::L2_3 => build_system(&mut g, n, &dims),
        TheoremId::L2_4 | TheoremId::L2_5 | TheoremId::T4_3 | TheoremId::L4_9 => {
            build_k_instance(&mut g, n, &dims, tol)
        }
        TheoremId::L2_6 => build_douglas(&mut g, n),
        TheoremId::T3_2 => build_k_inside(&mut g, n, &dims, tol),
        TheoremId::T3_3 => build_subspace_dual(&mut g, n, &dims, tol),
        TheoremId::T4_4 => build_linear_or_product(&mut g, n, &dims, trial, tol),
        TheoremId::T4_5 => {
            ensure_two_blocks(&mut dims);
            build_perturb(&mut g, n, &dims, tol)
        }
        TheoremId::C4_6 => build_single_perturb(&mut g, n, &dims, tol),
        TheoremId::C4_7 => {
            pad_coefficients(&mut dims, 2 * n);
            build_parseval_pair(&mut g, n, &dims)
        }
        TheoremId::T4_8 => {
            ensure_two_blocks(&mut dims);
            build_weighted(&mut g, n, &dims, tol)
        }
        TheoremId::T4_10 => build_positive(&mut g, n, &dims, trial.is_multiple_of(2), tol),
    };
    let (instance, ctx) = match built {
        Ok(b) => b,
        Err(e) => {
            return TrialOutcome {
                passed: false,
                residual: f64::INFINITY,
                reason: format!("instance generation failed: {e}"),
                instance: GFrameSystem::zero(n, &dims).ok().map(FrameSpecFile::new),
                conclusion: None,
            }
        }
    };
    // Checks read the instance exactly as a replay through its JSON would.
    let checked = match spec.theorem {
        TheoremId::L2_3 => check_induced(&instance, tol),
        TheoremId::L2_4 => check_range_test(&mut g, &instance, ctx, tol),
        TheoremId::L2_5 => check_dual_existence(&instance, ctx, tol),
        TheoremId::L2_6 => check_douglas(&instance, tol),
        TheoremId::T3_2 => check_canonical_dual(&mut g, &instance, tol),
        TheoremId::T3_3 => check_subspace_dual(&instance, tol),
        TheoremId::T4_3 => check_atomic(&mut g, &instance, ctx, tol),
        TheoremId::T4_4 => check_linear_or_product(&instance, ctx, tol),
        TheoremId::T4_5 | TheoremId::C4_6 => check_perturb(&instance, tol),
        TheoremId::C4_7 => check_parseval(&instance, tol),
        TheoremId::T4_8 => check_weighted(&instance, tol),
        TheoremId::L4_9 => check_operator_inequality(&instance, ctx, tol),
        TheoremId::T4_10 => check_positive(&instance, ctx, tol),
    };
    let verdict = checked.unwrap_or_else(|e| Verdict {
        passed: false,
        residual: f64::INFINITY,
        reason: format!("{}: {e}", e.name()),
        conclusion: None,
    });
    TrialOutcome {
        passed: verdict.passed,
        residual: verdict.residual,
        reason: verdict.reason,
        instance: Some(instance),
        conclusion: verdict.conclusion,
    }
}

type Built = Result<(FrameSpecFile, bool)>;

fn ensure_two_blocks(dims: &mut Vec<usize>) {
    if dims.len() < 2 {
        dims.push(dims[0]);
    }
}

fn pad_coefficients(dims: &mut Vec<usize>, required: usize) {
    let total: usize = dims.iter().sum();
    if total < required {
        dims.push(required - total);
    }
}

fn k_of(instance: &FrameSpecFile) -> ComplexMatrix {
    instance.k_or_identity()
}

fn field<'a>(name: &str, value: &'a Option<ComplexMatrix>) -> Result<&'a ComplexMatrix> {
    FrameSpecFile::require(name, value)
}

fn shortfall(predicted: f64, measured: f64) -> f64 {
    ((predicted - measured) / predicted.abs().max(1.0)).max(0.0)
}

/// A system whose synthesis operator has a random rank, full rank half of the time.
fn random_rank_system(g: &mut Generator, n: usize, dims: &[usize]) -> Result<GFrameSystem> {
    let max_rank = n.min(dims.iter().sum());
    if g.coin() {
        g.system(n, dims)
    } else {
        let r = g.index(1, max_rank);
        g.system_of_rank(n, dims, r)
    }
}

fn build_system(g: &mut Generator, n: usize, dims: &[usize]) -> Built {
    Ok((FrameSpecFile::new(random_rank_system(g, n, dims)?), true))
}

fn check_induced(instance: &FrameSpecFile, tol: &ToleranceConfig) -> Result<Verdict> {
    let sys = &instance.system;
    let b = classify(sys, &ComplexMatrix::identity(sys.ambient_dim()), tol)?;
    let ib = induced_frame_bounds(&induced_frame(sys), tol)?;
    let residual = (b.lower - ib.lower).abs().max((b.upper - ib.upper).abs());
    let flags = b.is_g_frame == ib.is_g_frame && b.is_parseval == ib.is_parseval;
    Ok(Verdict::new(residual <= BOUND_AGREEMENT && flags, residual, || {
        format!(
            "g-frame bounds ({}, {}) vs induced ({}, {})",
            b.lower, b.upper, ib.lower, ib.upper
        )
    }))
}

/// `(sys, K, expected K-g-frame)`: `K` inside `R(T_Λ)`, or with an engineered
/// component orthogonal to it when `T_Λ` is rank deficient.
fn build_k_instance(g: &mut Generator, n: usize, dims: &[usize], tol: &ToleranceConfig) -> Built {
    let sys = random_rank_system(g, n, dims)?;
    let t = synthesis(&sys);
    let r = rank(&t, tol)?;
    let inside = r == n || g.coin();
    let k_rank = g.index(0, r);
    let mut k = g.k_with_range_in(&t, k_rank, tol)?;
    if !inside {
        let perp = null_basis(&t.adjoint(), tol)?;
        let c = g.matrix(perp.ncols(), 1, 1.0);
        let v = &perp * &c;
        let w = g.matrix(1, n, 1.0);
        k = &k + &(&v * &w);
    }
    Ok((FrameSpecFile::new(sys).with_k(k), inside))
}

/// `K` with a random rank in `1..=rank(T_Λ)` and range inside `R(T_Λ)`.
fn build_k_inside(g: &mut Generator, n: usize, dims: &[usize], tol: &ToleranceConfig) -> Built {
    let sys = random_rank_system(g, n, dims)?;
    let t = synthesis(&sys);
    let r = g.index(1, rank(&t, tol)?);
    let k = g.k_with_range_in(&t, r, tol)?;
    Ok((FrameSpecFile::new(sys).with_k(k), true))
}

fn check_range_test(g: &mut Generator, instance: &FrameSpecFile, expected: bool, tol: &ToleranceConfig) -> Result<Verdict> {
    let sys = &instance.system;
    let k = k_of(instance);
    let b = classify(sys, &k, tol)?;
    if b.is_k_g_frame != expected {
        return Ok(Verdict::new(false, f64::INFINITY, || {
            format!("range test gave k_g_frame = {}, constructed {expected}", b.is_k_g_frame)
        }));
    }
    if !expected || k.is_zero() {
        return Ok(Verdict::new(b.lower == 0.0 || expected, 0.0, || "nonzero lower bound without range inclusion".into()));
    }
    let closed = pinv_k_lower_bound(sys, &k, tol)?;
    let rel = (b.lower - closed).abs() / closed;
    // The lower inequality on random vectors.
    let s = frame_operator(sys);
    let kk = &k * &k.adjoint();
    let mut worst_gap: f64 = 0.0;
    for _ in 0..5 {
        let f = g.vector(sys.ambient_dim());
        let energy = quad(&s, &f);
        let weighted = b.lower * quad(&kk, &f);
        worst_gap = worst_gap.max((weighted - energy) / energy.max(1.0));
    }
    let ok = rel <= ORACLE_REL && b.lower > 0.0 && worst_gap <= tol.psd_rel;
    Ok(Verdict::new(ok, rel, || {
        format!("A_opt = {} vs 1/‖T⁺K‖² = {closed}; inequality gap {worst_gap:e}", b.lower)
    }))
}

fn quad(m: &ComplexMatrix, f: &[Complex64]) -> f64 {
    m.apply(f).iter().zip(f).map(|(a, b)| (a * b.conj()).re).sum()
}

fn check_dual_existence(instance: &FrameSpecFile, expected: bool, tol: &ToleranceConfig) -> Result<Verdict> {
    let sys = &instance.system;
    let k = k_of(instance);
    let frame = classify(sys, &k, tol)?.is_k_g_frame;
    match canonical_k_dual(sys, &k, tol) {
        Ok(pair) => {
            let dual_ok = is_k_dual(sys, &pair.dual, &k, tol)?;
            let residual = pair.reconstruction_residual;
            Ok(Verdict::new(expected && frame && dual_ok, residual, || {
                format!("dual found (residual {residual:e}) but constructed K-g-frame = {expected}, range test = {frame}")
            }))
        }
        Err(Error::NotKGFrame) => Ok(Verdict::new(!expected && !frame, 0.0, || {
            format!("no dual found but constructed K-g-frame = {expected}, range test = {frame}")
        })),
        Err(e) => Err(e),
    }
}

/// `V` (as the synthesis operator of `system`, possibly rank deficient),
/// `Q₀` (as the analysis operator of `system2`) and `U = V·Q₀`.
fn build_douglas(g: &mut Generator, n: usize) -> Built {
    let p = g.index(1, n + 2);
    let r = g.index(1, n.min(p));
    let left = g.matrix(n, r, super::generate::scale(n));
    let right = g.matrix(r, p, super::generate::scale(r));
    let v = &left * &right;
    let q0 = g.matrix(p, n, super::generate::scale(n));
    let u = &v * &q0;
    let mut instance = FrameSpecFile::new(GFrameSystem::from_synthesis(&v, &[p])?);
    instance.system2 = Some(GFrameSystem::from_analysis(&q0, &[p])?);
    instance.u = Some(u);
    Ok((instance, true))
}

fn check_douglas(instance: &FrameSpecFile, tol: &ToleranceConfig) -> Result<Verdict> {
    let v = synthesis(&instance.system);
    let q0 = analysis(FrameSpecFile::require("system2", &instance.system2)?);
    let u = field("U", &instance.u)?;
    let f = douglas_factor(u, &v, tol)?;
    let mu = min_majorization_constant(u, &v, tol)?;
    let q_norm = operator_norm(&f.q)?;
    let q0_norm = operator_norm(&q0)?;
    let mu_rel = if f.mu_star == 0.0 { mu } else { (mu - f.mu_star).abs() / f.mu_star };
    let ok = f.residual <= RECONSTRUCTION_REL && q_norm <= q0_norm + 1e-10 && mu_rel <= ORACLE_REL;
    Ok(Verdict::new(ok, f.residual.max(mu_rel), || {
        format!(
            "residual {:e}, ‖Q‖ = {q_norm} vs ‖Q₀‖ = {q0_norm}, μ* = {} vs bisection {mu}",
            f.residual, f.mu_star
        )
    }))
}

fn check_canonical_dual(g: &mut Generator, instance: &FrameSpecFile, tol: &ToleranceConfig) -> Result<Verdict> {
    let sys = &instance.system;
    let k = k_of(instance);
    let pair = canonical_k_dual(sys, &k, tol)?;
    let recon = (&(&synthesis(sys) * &analysis(&pair.dual)) - &k).frobenius_norm();
    let recon_ok = recon <= RECONSTRUCTION_REL * k.frobenius_norm();
    let a_opt = classify(sys, &k, tol)?.lower;
    let product = a_opt * pair.dual_norm_sq();
    let product_err = (product - 1.0).abs();
    let alternates = (0..ALTERNATES)
        .map(|_| g.alternate_dual(&pair, tol))
        .collect::<Result<Vec<_>>>()?;
    let probes: Vec<Vec<Complex64>> = (0..PROBES).map(|_| g.vector(sys.ambient_dim())).collect();
    let minimal = dual_minimality_check(&pair, &alternates, &probes, tol)?;
    Ok(Verdict::new(
        recon_ok && product_err <= ORACLE_REL && minimal,
        product_err,
        || format!("reconstruction {recon:e}, A_opt·‖T_Θ‖² = {product}, pointwise minimal = {minimal}"),
    ))
}

/// `Λ` supported separately on `R(K)` and its complement (then mixed by a
/// unitary on the coefficient space, which leaves `S_Λ` unchanged), so `R(K)`
/// is `S_Λ`-invariant. The dual on `R(K)` is `T_Γ* = T_Λ*S_Λ⁺ + (I − T_Λ⁺T_Λ)Z`.
fn build_subspace_dual(g: &mut Generator, n: usize, dims: &[usize], tol: &ToleranceConfig) -> Built {
    let total: usize = dims.iter().sum();
    let r = g.index(1, n.min(total));
    let p = g.index(r, total);
    let basis = g.unitary(n);
    let inside = basis.column_block(0, r);
    let outside = basis.column_block(r, n - r);
    let s = super::generate::scale(n);
    let top = &g.matrix(p, r, s) * &inside.adjoint();
    let bottom = &g.matrix(total - p, n - r, s) * &outside.adjoint();
    let stacked = ComplexMatrix::vstack(&[&top, &bottom], n)?;
    let mixed = &g.unitary(total) * &stacked;
    let sys = GFrameSystem::from_analysis(&mixed, dims)?;
    let k = &inside * &g.matrix(r, n, s);

    let t = synthesis(&sys);
    let frame_op = frame_operator(&sys);
    let pinv_t = pinv(&t, tol)?;
    let free = &(&ComplexMatrix::identity(total) - &(&pinv_t * &t)) * &g.matrix(total, n, s);
    let dual_analysis = &(&t.adjoint() * &pinv(&frame_op, tol)?) + &free;
    let mut instance = FrameSpecFile::new(sys).with_k(k);
    instance.system2 = Some(GFrameSystem::from_analysis(&dual_analysis, dims)?);
    Ok((instance, true))
}

fn check_subspace_dual(instance: &FrameSpecFile, tol: &ToleranceConfig) -> Result<Verdict> {
    let dual = FrameSpecFile::require("system2", &instance.system2)?;
    let r = subspace_dual_implies_k_g_frame(&instance.system, dual, &k_of(instance), tol)?;
    Ok(Verdict::new(r.holds, shortfall(r.predicted_lower, r.measured_lower), || {
        format!("predicted {} > measured {}", r.predicted_lower, r.measured_lower)
    }))
}

fn check_atomic(g: &mut Generator, instance: &FrameSpecFile, expected: bool, tol: &ToleranceConfig) -> Result<Verdict> {
    let sys = &instance.system;
    let k = k_of(instance);
    let cert = is_atomic_system(sys, &k, tol)?;
    let frame = classify(sys, &k, tol)?.is_k_g_frame;
    let dual_exists = match canonical_k_dual(sys, &k, tol) {
        Ok(_) => true,
        Err(Error::NotKGFrame) => false,
        Err(e) => return Err(e),
    };
    let inequality = k_g_frame_via_frame_operator(sys, &k, tol)?.holds;
    let agree = [cert.is_atomic, frame, dual_exists, inequality].iter().all(|&x| x == expected);
    if !agree || !expected {
        return Ok(Verdict::new(agree, 0.0, || {
            format!(
                "constructed {expected}: atomic {}, range test {frame}, dual {dual_exists}, operator inequality {inequality}",
                cert.is_atomic
            )
        }));
    }
    let f = g.vector(sys.ambient_dim());
    let coeffs = atomic_coefficients(sys, &k, &f, tol)?;
    let a_norm = coeffs.coefficients.to_vector().norm();
    let bounded = a_norm <= coeffs.bound * vec_norm(&f) * (1.0 + 1e-12) + 1e-15;
    let witness = cert.witness_dual.as_ref().map_or(Ok(false), |w| is_k_dual(sys, w, &k, tol))?;
    Ok(Verdict::new(
        coeffs.residual <= tol.residual_rel && bounded && witness,
        coeffs.residual,
        || format!("coefficient residual {:e}, ‖a‖ = {a_norm} vs c‖f‖, witness dual {witness}", coeffs.residual),
    ))
}

fn check_operator_inequality(instance: &FrameSpecFile, expected: bool, tol: &ToleranceConfig) -> Result<Verdict> {
    let sys = &instance.system;
    let k = k_of(instance);
    let ineq = k_g_frame_via_frame_operator(sys, &k, tol)?;
    let frame = classify(sys, &k, tol)?.is_k_g_frame;
    if ineq.holds != frame || frame != expected {
        return Ok(Verdict::new(false, f64::INFINITY, || {
            format!(
                "λ* = {} (holds {}), range test {frame}, constructed {expected}",
                ineq.lambda_star, ineq.holds
            )
        }));
    }
    let rel = if expected && !k.is_zero() {
        let closed = pinv_k_lower_bound(sys, &k, tol)?;
        (ineq.lambda_star - closed).abs() / closed
    } else {
        0.0
    };
    Ok(Verdict::new(rel <= ORACLE_REL, rel, || {
        format!("λ* = {} disagrees with the closed form", ineq.lambda_star)
    }))
}

/// Even trials: linear combination of two atomic `K₁, K₂` (one possibly zero).
/// Odd trials: product `K₁K₂` with arbitrary `K₂`.
fn build_linear_or_product(g: &mut Generator, n: usize, dims: &[usize], trial: usize, tol: &ToleranceConfig) -> Built {
    let sys = random_rank_system(g, n, dims)?;
    let t = synthesis(&sys);
    let r = rank(&t, tol)?;
    let r1 = g.index(1, r);
    let k1 = g.k_with_range_in(&t, r1, tol)?;
    let mut instance = FrameSpecFile::new(sys).with_k(k1);
    let linear = trial.is_multiple_of(2);
    if linear {
        let r2 = g.index(0, r);
        instance.k2 = Some(g.k_with_range_in(&t, r2, tol)?);
        instance.alpha = Some(JsonScalar(g.complex_normal()));
        instance.beta = Some(JsonScalar(g.complex_normal()));
    } else {
        instance.k2 = Some(g.square(n));
    }
    Ok((instance, linear))
}

fn check_linear_or_product(instance: &FrameSpecFile, linear: bool, tol: &ToleranceConfig) -> Result<Verdict> {
    let sys = &instance.system;
    let k1 = k_of(instance);
    let k2 = field("K2", &instance.k2)?;
    let b = if linear {
        let alpha = FrameSpecFile::scalar_or(&instance.alpha, 1.0);
        let beta = FrameSpecFile::scalar_or(&instance.beta, 1.0);
        combine_linear(sys, &k1, k2, alpha, beta, tol)?
    } else {
        combine_product(sys, &k1, k2, tol)?
    };
    let mode = if linear { "linear" } else { "product" };
    Ok(Verdict::new(b.holds, shortfall(b.predicted_lower, b.measured_lower), || {
        format!(
            "{mode}: predicted [{}, {}], measured [{}, {}]",
            b.predicted_lower, b.predicted_upper, b.measured_lower, b.measured_upper
        )
    }))
}

/// Orthogonal pair; the surjective commuting witness sits on a random side and
/// `K` lies in the range of that side's synthesis operator.
fn build_perturb(g: &mut Generator, n: usize, dims: &[usize], tol: &ToleranceConfig) -> Built {
    let split = g.index(1, dims.len() - 1);
    let (l, gm) = g.orthogonal_pair(n, dims, split)?;
    let witness_left = g.coin();
    let t = synthesis(if witness_left { &l } else { &gm });
    let r = g.index(1, rank(&t, tol)?);
    let k = g.k_with_range_in(&t, r, tol)?;
    let w = g.commuting_surjective(&k)?;
    let other = g.square(n);
    let (u, v) = if witness_left { (w, other) } else { (other, w) };
    let mut instance = FrameSpecFile::new(l).with_k(k);
    instance.system2 = Some(gm);
    instance.u = Some(u);
    instance.v = Some(v);
    Ok((instance, true))
}

/// `Γ = 0`, `V = 0`: the single-system perturbation `{ΛᵢU}`.
fn build_single_perturb(g: &mut Generator, n: usize, dims: &[usize], tol: &ToleranceConfig) -> Built {
    let (mut instance, _) = build_k_inside(g, n, dims, tol)?;
    let k = k_of(&instance);
    instance.u = Some(g.commuting_surjective(&k)?);
    instance.system2 = Some(GFrameSystem::zero(n, dims)?);
    instance.v = Some(ComplexMatrix::zeros(n, n));
    Ok((instance, true))
}

fn check_perturb(instance: &FrameSpecFile, tol: &ToleranceConfig) -> Result<Verdict> {
    let other = FrameSpecFile::require("system2", &instance.system2)?;
    let r = perturb_sum(
        &instance.system,
        other,
        field("U", &instance.u)?,
        field("V", &instance.v)?,
        &k_of(instance),
        tol,
    )?;
    let b = &r.bound;
    let ok = b.holds && r.cross_term <= IDENTITY_REL;
    Ok(Verdict::new(ok, r.cross_term.max(shortfall(b.predicted_lower, b.measured_lower)), || {
        format!(
            "predicted lower {} vs measured {}, predicted upper {} vs measured {}, cross term {:e}",
            b.predicted_lower, b.measured_lower, b.predicted_upper, b.measured_upper, r.cross_term
        )
    }))
}

fn build_parseval_pair(g: &mut Generator, n: usize, dims: &[usize]) -> Built {
    let r = g.index(0, n);
    let k = &g.matrix(n, r, super::generate::scale(n)) * &g.matrix(r, n, 1.0);
    let (l, gm) = g.parseval_pair(&k, dims)?;
    let mut instance = FrameSpecFile::new(l).with_k(k);
    instance.system2 = Some(gm);
    Ok((instance, true))
}

fn check_parseval(instance: &FrameSpecFile, tol: &ToleranceConfig) -> Result<Verdict> {
    let other = FrameSpecFile::require("system2", &instance.system2)?;
    let r = parseval_sum(&instance.system, other, &k_of(instance), tol)?;
    Ok(Verdict::new(r.residual <= IDENTITY_REL, r.residual, || {
        format!("‖S − 2KK*‖/‖KK*‖ = {:e}, tightness {}", r.residual, r.tightness)
    }))
}

/// `U*` acting invertibly on `R(T)` and on its complement, so `R(T) ⊆ R(U*T)`.
fn range_preserving(g: &mut Generator, t: &ComplexMatrix, tol: &ToleranceConfig) -> Result<ComplexMatrix> {
    let n = t.nrows();
    let p = orth_projector(t, tol)?;
    let q = &ComplexMatrix::identity(n) - &p;
    let z1 = g.square(n);
    let z2 = g.square(n);
    let c = operator_norm(&z1)?.max(operator_norm(&z2)?) + 0.5;
    let u_star = &(&ComplexMatrix::identity(n).scale_real(c) + &(&(&p * &z1) * &p)) + &(&(&q * &z2) * &q);
    Ok(u_star.adjoint())
}

/// Orthogonal pair with `K` in `R(T_Λ) ∩ R(T_Γ)` when that is nonzero (else in
/// `R(T_Λ)`), and range-preserving weights `U₁, U₂`.
fn build_weighted(g: &mut Generator, n: usize, dims: &[usize], tol: &ToleranceConfig) -> Built {
    let split = g.index(1, dims.len() - 1);
    let (l, gm) = g.orthogonal_pair(n, dims, split)?;
    let tl = synthesis(&l);
    let tg = synthesis(&gm);
    let id = ComplexMatrix::identity(n);
    let off_l = &id - &orth_projector(&tl, tol)?;
    let off_g = &id - &orth_projector(&tg, tol)?;
    let common = null_basis(&ComplexMatrix::vstack(&[&off_l, &off_g], n)?, tol)?;
    let host = if common.ncols() > 0 && g.coin() { common } else { range_basis(&tl, tol)? };
    let r = g.index(1, host.ncols());
    let k = g.k_with_range_in(&host, r, tol)?;
    let mut instance = FrameSpecFile::new(l).with_k(k);
    instance.u = Some(range_preserving(g, &tl, tol)?);
    instance.v = Some(range_preserving(g, &tg, tol)?);
    instance.system2 = Some(gm);
    Ok((instance, true))
}

fn check_weighted(instance: &FrameSpecFile, tol: &ToleranceConfig) -> Result<Verdict> {
    let other = FrameSpecFile::require("system2", &instance.system2)?;
    let r = operator_weighted_sum(
        &instance.system,
        other,
        field("U", &instance.u)?,
        field("V", &instance.v)?,
        &k_of(instance),
        tol,
    )?;
    let b = &r.bound;
    Ok(Verdict::new(b.holds, shortfall(b.predicted_lower, b.measured_lower), || {
        format!(
            "predicted lower {} vs measured {}, predicted upper {} vs measured {}",
            b.predicted_lower, b.measured_lower, b.predicted_upper, b.measured_upper
        )
    }))
}

/// Commuting: `S_Λ = Q·diag(s)·Q*`, `KK* = Q·diag(k)·Q*` with `k` supported
/// where `s > 0`, `U = Q·diag(u)·Q*`. Generic: random system (often rank
/// deficient), `K` in its range, random PSD `U`.
fn build_positive(g: &mut Generator, n: usize, dims: &[usize], commuting: bool, tol: &ToleranceConfig) -> Built {
    let power = g.index(1, 3) as u32;
    let mut instance = if commuting {
        let total: usize = dims.iter().sum();
        let q = g.unitary(n);
        let rho = g.index(1, n.min(total));
        let s: Vec<f64> = (0..rho).map(|_| g.uniform(0.2, 2.0)).collect();
        let k_diag: Vec<f64> = (0..n)
            .map(|j| if j < rho && g.coin() { g.uniform(0.2, 2.0).sqrt() } else { 0.0 })
            .collect();
        let u_diag: Vec<f64> = (0..n).map(|_| if g.coin() { 0.0 } else { g.uniform(0.0, 2.0) }).collect();
        let y = g.unitary(total).column_block(0, rho);
        let root_s: Vec<f64> = s.iter().map(|x| x.sqrt()).collect();
        let analysis = &(&y * &ComplexMatrix::diag_real(&root_s)) * &q.column_block(0, rho).adjoint();
        let sys = GFrameSystem::from_analysis(&analysis, dims)?;
        let k = &(&q * &ComplexMatrix::diag_real(&k_diag)) * &g.unitary(n);
        let u = (&(&q * &ComplexMatrix::diag_real(&u_diag)) * &q.adjoint()).hermitian_part();
        let mut instance = FrameSpecFile::new(sys).with_k(k);
        instance.u = Some(u);
        instance
    } else {
        let (mut instance, _) = build_k_inside(g, n, dims, tol)?;
        let r = g.index(1, n);
        instance.u = Some(g.psd(n, r));
        instance
    };
    instance.power = Some(power);
    Ok((instance, commuting))
}

fn check_positive(instance: &FrameSpecFile, commuting: bool, tol: &ToleranceConfig) -> Result<Verdict> {
    let r = positive_perturbation(
        &instance.system,
        field("U", &instance.u)?,
        &k_of(instance),
        instance.power.unwrap_or(1),
        tol,
    )?;
    let held = r.k_g_frame && (!commuting || bound_le(r.baseline_lower, r.measured_lower, tol));
    let mut v = Verdict::new(r.frame_op_residual <= IDENTITY_REL, r.frame_op_residual, || {
        format!("frame operator identity residual {:e}", r.frame_op_residual)
    });
    v.conclusion = Some((commuting, held));
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::super::{run_campaign, run_campaign_with_jobs, CampaignSpec, DimRanges, TheoremId};

    #[test]
    fn every_campaign_passes_briefly() {
        for id in TheoremId::ALL {
            let report = run_campaign(&CampaignSpec::new(id, 20, 11)).unwrap();
            assert_eq!(report.passes + report.failures, report.trials);
            assert_eq!(report.failures, 0, "{id}: {:#?}", report.counterexamples.first());
            assert!(report.counterexamples.is_empty());
        }
    }

    #[test]
    fn scalar_canonical_dual_campaign() {
        let dims: DimRanges = "n=1,blocks=1,m=1".parse().unwrap();
        let report = run_campaign(&CampaignSpec::new(TheoremId::T3_2, 1, 0).with_dims(dims)).unwrap();
        assert_eq!(report.passes, 1);
    }

    #[test]
    fn reports_do_not_depend_on_jobs() {
        let spec = CampaignSpec::new(TheoremId::T4_10, 24, 3);
        let one = serde_json::to_string(&run_campaign_with_jobs(&spec, 1).unwrap()).unwrap();
        let four = serde_json::to_string(&run_campaign_with_jobs(&spec, 4).unwrap()).unwrap();
        assert_eq!(one, four);
    }
}
