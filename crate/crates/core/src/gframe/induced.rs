use super::{FrameBounds, GFrameSystem};
use crate::error::Result;
use crate::numerics::{hermitian_eig, rank, relative_difference, Complex64, ComplexMatrix, ToleranceConfig};

/// Vectors `u_{i,j} = Λᵢ*e_{i,j}` with `e_{i,j}` the standard basis of `ℂ^{mᵢ}`.
#[derive(Debug, Clone, PartialEq)]
pub struct InducedFrame {
    pub ambient_dim: usize,
    /// `(block i, basis index j)` for each vector, in block order.
    pub index: Vec<(usize, usize)>,
    pub vectors: Vec<Vec<Complex64>>,
}

impl InducedFrame {
    /// Columns are the frame vectors: `n × Σmᵢ`.
    pub fn matrix(&self) -> ComplexMatrix {
        let n = self.ambient_dim;
        let cols: Vec<ComplexMatrix> = self.vectors.iter().map(|v| ComplexMatrix::column(v)).collect();
        let parts: Vec<&ComplexMatrix> = cols.iter().collect();
        ComplexMatrix::hstack(&parts, n).expect("induced vectors live in the ambient space")
    }
}

pub fn induced_frame(sys: &GFrameSystem) -> InducedFrame {
    let mut index = Vec::new();
    let mut vectors = Vec::new();
    for (i, op) in sys.operators().iter().enumerate() {
        let adj = op.adjoint();
        for j in 0..op.nrows() {
            index.push((i, j));
            vectors.push(adj.column_vec(j));
        }
    }
    InducedFrame {
        ambient_dim: sys.ambient_dim(),
        index,
        vectors,
    }
}

/// Optimal frame bounds of the vector family: eigenvalue extremes of `Σ u u*`.
pub fn induced_frame_bounds(ind: &InducedFrame, tol: &ToleranceConfig) -> Result<FrameBounds> {
    let n = ind.ambient_dim;
    let u = ind.matrix();
    let s = &u * &u.adjoint();
    let eig = hermitian_eig(&s, tol)?;
    let upper = eig.eigenvalues.last().copied().unwrap_or(0.0);
    let is_frame = rank(&u, tol)? == n;
    let lower = if is_frame {
        eig.eigenvalues.first().copied().unwrap_or(0.0)
    } else {
        0.0
    };
    let id = ComplexMatrix::identity(n);
    let is_parseval = relative_difference(&s, &id) <= tol.residual_rel;
    let tightness = if is_parseval {
        Some(1.0)
    } else {
        super::tight_constant(&s, &id, tol)
    };
    Ok(FrameBounds {
        lower,
        upper,
        is_bessel: true,
        is_g_frame: is_frame,
        is_k_g_frame: is_frame,
        is_parseval,
        tightness,
    })
}
