//! Seeded instance generators.
//!
//! Every generator draws from a ChaCha8 stream (`rand_chacha::ChaCha8Rng`)
//! seeded with `seed_from_u64`, so the same seed yields bit-identical output on
//! every platform. Matrix entries are complex standard normal, `(x + iy)/√2`
//! with `x, y ~ N(0, 1)`, scaled by `1/√n` for ambient dimension `n`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::DimRanges;
use crate::duality::KDualPair;
use crate::error::{Error, Result};
use crate::gframe::{analysis, synthesis, GFrameSystem};
use crate::numerics::{pinv, range_basis, rank, Complex64, ComplexMatrix, ToleranceConfig};

pub struct Generator {
    rng: ChaCha8Rng,
}

impl Generator {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// The stream for one campaign trial: seed `seed ⊕ trial`.
    pub fn for_trial(seed: u64, trial: u64) -> Self {
        Self::new(seed ^ trial)
    }

    pub fn complex_normal(&mut self) -> Complex64 {
        let re: f64 = self.rng.sample(StandardNormal);
        let im: f64 = self.rng.sample(StandardNormal);
        Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.random_range(lo..hi)
    }

    pub fn index(&mut self, lo: usize, hi_inclusive: usize) -> usize {
        self.rng.random_range(lo..=hi_inclusive)
    }

    pub fn coin(&mut self) -> bool {
        self.rng.random_bool(0.5)
    }

    /// `rows × cols` complex Gaussian matrix with entries scaled by `scale`.
    pub fn matrix(&mut self, rows: usize, cols: usize, scale: f64) -> ComplexMatrix {
        let entries: Vec<Complex64> = (0..rows * cols).map(|_| self.complex_normal() * scale).collect();
        ComplexMatrix::from_row_major(rows, cols, &entries).expect("gaussian entries are finite")
    }

    /// Gaussian `n × n` matrix with the `1/√n` normalization.
    pub fn square(&mut self, n: usize) -> ComplexMatrix {
        self.matrix(n, n, scale(n))
    }

    pub fn vector(&mut self, n: usize) -> Vec<Complex64> {
        (0..n).map(|_| self.complex_normal()).collect()
    }

    /// Haar-distributed unitary: QR of a Gaussian matrix with the phases of `R`'s diagonal removed.
    pub fn unitary(&mut self, n: usize) -> ComplexMatrix {
        if n == 0 {
            return ComplexMatrix::zeros(0, 0);
        }
        let g = self.matrix(n, n, 1.0).into_inner();
        let qr = g.qr();
        let (q, r) = (qr.q(), qr.r());
        let fixed = nalgebra::DMatrix::from_fn(n, n, |i, j| {
            let d = r[(j, j)];
            let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
            q[(i, j)] * phase
        });
        ComplexMatrix::from_inner(fixed).expect("unitary entries are finite")
    }

    /// Random Hermitian positive semidefinite `n × n` matrix of the given rank.
    pub fn psd(&mut self, n: usize, rank: usize) -> ComplexMatrix {
        let g = self.matrix(n, rank, scale(n));
        (&g * &g.adjoint()).hermitian_part()
    }

    /// Samples `(n, block_dims)` from the ranges.
    pub fn dims(&mut self, ranges: &DimRanges) -> (usize, Vec<usize>) {
        let n = self.index(*ranges.n.start(), *ranges.n.end());
        let blocks = self.index(*ranges.blocks.start(), *ranges.blocks.end());
        let dims = (0..blocks)
            .map(|_| self.index(*ranges.m.start(), *ranges.m.end()))
            .collect();
        (n, dims)
    }

    /// Blocks `Λᵢ` with i.i.d. complex normal entries scaled by `1/√n`.
    pub fn system(&mut self, n: usize, block_dims: &[usize]) -> Result<GFrameSystem> {
        let s = scale(n);
        let ops = block_dims.iter().map(|&m| self.matrix(m, n, s)).collect();
        GFrameSystem::new(n, ops)
    }

    /// A system whose synthesis operator has rank `min(r, n, Σmᵢ)`.
    pub fn system_of_rank(&mut self, n: usize, block_dims: &[usize], r: usize) -> Result<GFrameSystem> {
        let total: usize = block_dims.iter().sum();
        let left = self.matrix(n, r, scale(n));
        let right = self.matrix(r, total, scale(r.max(1)));
        GFrameSystem::from_synthesis(&(&left * &right), block_dims)
    }

    /// `K = B·F` with `B` an orthonormal basis of a random rank-`r` subspace of `R(T)`.
    pub fn k_with_range_in(&mut self, t: &ComplexMatrix, r: usize, tol: &ToleranceConfig) -> Result<ComplexMatrix> {
        let n = t.nrows();
        let available = rank(t, tol)?;
        if r > available {
            return Err(Error::RankTooLarge {
                requested: r,
                available,
            });
        }
        if r == 0 {
            return Ok(ComplexMatrix::zeros(n, n));
        }
        let range = range_basis(t, tol)?;
        let mixing = self.matrix(available, r, 1.0);
        let basis = range_basis(&(&range * &mixing), tol)?;
        let factor = self.matrix(basis.ncols(), n, scale(n));
        Ok(&basis * &factor)
    }

    /// Complementary supports: `Λ` is random on blocks `< split` and zero after,
    /// `Γ` the reverse, so `T_Λ·T_Γ* = ΣᵢΛᵢ*Γᵢ = 0` exactly.
    pub fn orthogonal_pair(
        &mut self,
        n: usize,
        block_dims: &[usize],
        split: usize,
    ) -> Result<(GFrameSystem, GFrameSystem)> {
        if split == 0 || split >= block_dims.len() {
            return Err(Error::InvalidInput(format!(
                "split {split} must lie in 1..{}",
                block_dims.len()
            )));
        }
        let full = self.system(n, block_dims)?;
        let left = full.map_blocks(|i, op| if i < split { op.clone() } else { ComplexMatrix::zeros(op.nrows(), n) })?;
        let right = full.map_blocks(|i, op| if i >= split { op.clone() } else { ComplexMatrix::zeros(op.nrows(), n) })?;
        Ok((left, right))
    }

    /// `T_Λ = K·W` with `W` the first `n` rows of a random unitary, so `S_Λ = KK*`.
    pub fn parseval(&mut self, k: &ComplexMatrix, block_dims: &[usize]) -> Result<GFrameSystem> {
        let n = k.nrows();
        let total: usize = block_dims.iter().sum();
        if total < n {
            return Err(Error::InsufficientCoefficientDim {
                required: n,
                available: total,
            });
        }
        let w = self.unitary(total).row_block(0, n);
        GFrameSystem::from_synthesis(&(k * &w), block_dims)
    }

    /// Two Parseval K-g-frames from disjoint row blocks of one unitary, so `T_Λ·T_Γ* = 0`.
    pub fn parseval_pair(&mut self, k: &ComplexMatrix, block_dims: &[usize]) -> Result<(GFrameSystem, GFrameSystem)> {
        let n = k.nrows();
        let total: usize = block_dims.iter().sum();
        if total < 2 * n {
            return Err(Error::InsufficientCoefficientDim {
                required: 2 * n,
                available: total,
            });
        }
        let w = self.unitary(total);
        let first = GFrameSystem::from_synthesis(&(k * &w.row_block(0, n)), block_dims)?;
        let second = GFrameSystem::from_synthesis(&(k * &w.row_block(n, n)), block_dims)?;
        Ok((first, second))
    }

    /// `U = αI + βK*` with `α = |β|·‖K‖ + 0.5`, so `σ_min(U) ≥ 0.5` and `UK* = K*U`.
    pub fn commuting_surjective(&mut self, k: &ComplexMatrix) -> Result<ComplexMatrix> {
        let n = k.nrows();
        let beta = self.complex_normal();
        let alpha = beta.norm() * crate::numerics::operator_norm(k)? + 0.5;
        Ok(&ComplexMatrix::identity(n).scale_real(alpha) + &k.adjoint().scale(beta))
    }

    /// Another K-dual of `pair.primal`: `T_Γ* = T_Θ* + (I − T⁺T)Z`.
    pub fn alternate_dual(&mut self, pair: &KDualPair, tol: &ToleranceConfig) -> Result<GFrameSystem> {
        let sys = &pair.primal;
        let t = synthesis(sys);
        let total = sys.coefficient_dim();
        let n = sys.ambient_dim();
        let proj = &pinv(&t, tol)? * &t;
        let z = self.matrix(total, n, scale(n));
        let shift = &(&ComplexMatrix::identity(total) - &proj) * &z;
        GFrameSystem::from_analysis(&(&analysis(&pair.dual) + &shift), sys.block_dims())
    }
}

pub(crate) fn scale(n: usize) -> f64 {
    1.0 / (n.max(1) as f64).sqrt()
}

/// [`Generator::system`] on a fresh stream.
pub fn gen_system(seed: u64, n: usize, block_dims: &[usize]) -> Result<GFrameSystem> {
    Generator::new(seed).system(n, block_dims)
}

/// [`Generator::k_with_range_in`] on a fresh stream.
pub fn gen_k_with_range_in(seed: u64, t: &ComplexMatrix, r: usize, tol: &ToleranceConfig) -> Result<ComplexMatrix> {
    Generator::new(seed).k_with_range_in(t, r, tol)
}

/// [`Generator::orthogonal_pair`] on a fresh stream.
pub fn gen_orthogonal_pair(seed: u64, n: usize, block_dims: &[usize], split: usize) -> Result<(GFrameSystem, GFrameSystem)> {
    Generator::new(seed).orthogonal_pair(n, block_dims, split)
}

/// [`Generator::parseval`] on a fresh stream.
pub fn gen_parseval(seed: u64, k: &ComplexMatrix, block_dims: &[usize]) -> Result<GFrameSystem> {
    Generator::new(seed).parseval(k, block_dims)
}

/// [`Generator::commuting_surjective`] on a fresh stream.
pub fn gen_commuting_surjective(seed: u64, k: &ComplexMatrix) -> Result<ComplexMatrix> {
    Generator::new(seed).commuting_surjective(k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::douglas::range_included;
    use crate::duality::{canonical_k_dual, is_k_dual};
    use crate::gframe::frame_operator;
    use crate::numerics::{operator_norm, relative_difference, svd};

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    #[test]
    fn same_seed_same_system() {
        let a = gen_system(0, 3, &[2, 1]).unwrap();
        let b = gen_system(0, 3, &[2, 1]).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        assert_ne!(a, gen_system(1, 3, &[2, 1]).unwrap());
        assert_eq!(a.block_dims(), &[2, 1]);
        assert_eq!(a.ambient_dim(), 3);
        let s = gen_system(5, 1, &[1]).unwrap();
        assert!(s.operators()[0].get(0, 0).norm() > 0.0);
    }

    #[test]
    fn unitary_is_unitary() {
        let u = Generator::new(3).unitary(6);
        assert!((&(&u * &u.adjoint()) - &ComplexMatrix::identity(6)).frobenius_norm() < 1e-13);
    }

    #[test]
    fn k_inside_range() {
        let sys = Generator::new(1).system_of_rank(4, &[2, 3], 2).unwrap();
        let t = synthesis(&sys);
        assert_eq!(rank(&t, &tol()).unwrap(), 2);
        assert!(gen_k_with_range_in(2, &t, 0, &tol()).unwrap().is_zero());
        let k1 = gen_k_with_range_in(2, &t, 1, &tol()).unwrap();
        assert_eq!(rank(&k1, &tol()).unwrap(), 1);
        assert!(range_included(&k1, &t, &tol()).unwrap());
        let k2 = gen_k_with_range_in(3, &t, 2, &tol()).unwrap();
        assert_eq!(rank(&k2, &tol()).unwrap(), 2);
        assert!(matches!(
            gen_k_with_range_in(2, &t, 3, &tol()),
            Err(Error::RankTooLarge { requested: 3, available: 2 })
        ));
        let full = synthesis(&gen_system(4, 3, &[3]).unwrap());
        assert_eq!(rank(&gen_k_with_range_in(4, &full, 3, &tol()).unwrap(), &tol()).unwrap(), 3);
    }

    #[test]
    fn orthogonal_pair_is_orthogonal() {
        let (l, g) = gen_orthogonal_pair(9, 3, &[1, 2], 1).unwrap();
        assert!(!l.operators()[0].is_zero() && l.operators()[1].is_zero());
        assert!(g.operators()[0].is_zero() && !g.operators()[1].is_zero());
        assert!((&synthesis(&l) * &analysis(&g)).is_zero());
        assert!(gen_orthogonal_pair(9, 3, &[1, 2], 2).is_err());
    }

    #[test]
    fn parseval_examples() {
        let id = ComplexMatrix::identity(3);
        let sys = gen_parseval(0, &id, &[3]).unwrap();
        assert!(relative_difference(&frame_operator(&sys), &id) < 1e-13);
        assert!(gen_parseval(0, &ComplexMatrix::zeros(2, 2), &[1, 2]).unwrap().operators().iter().all(|o| o.is_zero()));
        let k = Generator::new(8).square(3);
        let sys = gen_parseval(1, &k, &[2, 2]).unwrap();
        assert!(relative_difference(&frame_operator(&sys), &(&k * &k.adjoint())) < 1e-13);
        assert!(matches!(
            gen_parseval(0, &k, &[1, 1]),
            Err(Error::InsufficientCoefficientDim { required: 3, available: 2 })
        ));
        let (a, b) = Generator::new(2).parseval_pair(&k, &[3, 3]).unwrap();
        assert!((&synthesis(&a) * &analysis(&b)).frobenius_norm() < 1e-13);
        assert!(relative_difference(&frame_operator(&b), &(&k * &k.adjoint())) < 1e-13);
    }

    #[test]
    fn commuting_surjective_examples() {
        let z = gen_commuting_surjective(0, &ComplexMatrix::zeros(2, 2)).unwrap();
        assert!((&z - &ComplexMatrix::identity(2).scale_real(0.5)).is_zero());
        let k = Generator::new(4).square(4);
        let u = gen_commuting_surjective(1, &k).unwrap();
        let ks = k.adjoint();
        assert!((&(&u * &ks) - &(&ks * &u)).frobenius_norm() < 1e-13);
        assert!(svd(&u).unwrap().singular_values.last().copied().unwrap() >= 0.5 - 1e-12);
    }

    #[test]
    fn alternate_duals_are_duals() {
        let mut g = Generator::new(6);
        let sys = g.system(3, &[2, 3]).unwrap();
        let k = g.square(3);
        let pair = canonical_k_dual(&sys, &k, &tol()).unwrap();
        let alt = g.alternate_dual(&pair, &tol()).unwrap();
        assert!(is_k_dual(&sys, &alt, &k, &tol()).unwrap());
        assert!(operator_norm(&analysis(&alt)).unwrap() >= operator_norm(&analysis(&pair.dual)).unwrap());
    }
}
