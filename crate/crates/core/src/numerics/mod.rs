//! Dense complex linear algebra with an explicit tolerance policy.

mod decomp;
mod matrix;
mod pencil;
mod tolerance;

pub use decomp::{
    adjoint, hermitian_eig, null_basis, operator_norm, orth_projector, pinv, psd_min_shift, range_basis,
    rank, svd, HermitianEig, Svd,
};
pub use matrix::{relative_difference, ComplexMatrix, JsonScalar};
pub(crate) use pencil::max_eigenvalue;
pub use pencil::{max_pencil_shift, min_pencil_scale, BISECTION_FLOOR};
pub use num_complex::Complex64;
pub use tolerance::ToleranceConfig;
