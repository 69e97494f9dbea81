use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::numerics::{Complex64, ComplexMatrix};

/// A finite family of operators `Λᵢ : ℂⁿ → ℂ^{mᵢ}`.
#[derive(Debug, Clone, PartialEq)]
pub struct GFrameSystem {
    ambient_dim: usize,
    block_dims: Vec<usize>,
    operators: Vec<ComplexMatrix>,
}

impl GFrameSystem {
    pub fn new(ambient_dim: usize, operators: Vec<ComplexMatrix>) -> Result<Self> {
        if operators.is_empty() {
            return Err(Error::DimensionMismatch("a system needs at least one block".into()));
        }
        for (i, op) in operators.iter().enumerate() {
            if op.ncols() != ambient_dim {
                return Err(Error::DimensionMismatch(format!(
                    "blocks[{i}] has {} columns, expected ambient dimension {ambient_dim}",
                    op.ncols()
                )));
            }
        }
        let block_dims = operators.iter().map(ComplexMatrix::nrows).collect();
        Ok(Self {
            ambient_dim,
            block_dims,
            operators,
        })
    }

    /// All-zero operators with the given block structure.
    pub fn zero(ambient_dim: usize, block_dims: &[usize]) -> Result<Self> {
        Self::new(
            ambient_dim,
            block_dims.iter().map(|&m| ComplexMatrix::zeros(m, ambient_dim)).collect(),
        )
    }

    /// Splits the rows of an analysis operator `Σmᵢ × n` into blocks.
    pub fn from_analysis(analysis: &ComplexMatrix, block_dims: &[usize]) -> Result<Self> {
        let total: usize = block_dims.iter().sum();
        if analysis.nrows() != total {
            return Err(Error::DimensionMismatch(format!(
                "analysis operator has {} rows, block dimensions sum to {total}",
                analysis.nrows()
            )));
        }
        let mut at = 0;
        let ops = block_dims
            .iter()
            .map(|&m| {
                let block = analysis.row_block(at, m);
                at += m;
                block
            })
            .collect();
        Self::new(analysis.ncols(), ops)
    }

    /// Builds the system whose synthesis operator is `synthesis` (`n × Σmᵢ`).
    pub fn from_synthesis(synthesis: &ComplexMatrix, block_dims: &[usize]) -> Result<Self> {
        Self::from_analysis(&synthesis.adjoint(), block_dims)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn block_dims(&self) -> &[usize] {
        &self.block_dims
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    pub fn block_count(&self) -> usize {
        self.operators.len()
    }

    /// `Σᵢ mᵢ`, the dimension of `⊕Hᵢ`.
    pub fn coefficient_dim(&self) -> usize {
        self.block_dims.iter().sum()
    }

    pub fn same_shape(&self, other: &GFrameSystem) -> bool {
        self.ambient_dim == other.ambient_dim && self.block_dims == other.block_dims
    }

    /// Blockwise map `Λᵢ ↦ f(i, Λᵢ)`; every output must stay `mᵢ × n'`.
    pub fn map_blocks(&self, mut f: impl FnMut(usize, &ComplexMatrix) -> ComplexMatrix) -> Result<Self> {
        let ops: Vec<ComplexMatrix> = self.operators.iter().enumerate().map(|(i, op)| f(i, op)).collect();
        let n = ops.first().map_or(self.ambient_dim, ComplexMatrix::ncols);
        let out = Self::new(n, ops)?;
        if out.block_dims != self.block_dims {
            return Err(Error::DimensionMismatch("block map changed block dimensions".into()));
        }
        Ok(out)
    }

    /// `{Λᵢ·W}` for an `n × n'` operator `W`.
    pub fn compose_right(&self, w: &ComplexMatrix) -> Result<Self> {
        if w.nrows() != self.ambient_dim {
            return Err(Error::DimensionMismatch(format!(
                "right factor has {} rows, expected {}",
                w.nrows(),
                self.ambient_dim
            )));
        }
        self.map_blocks(|_, op| op * w)
    }

    /// Blockwise sum `{Λᵢ + Γᵢ}`.
    pub fn block_sum(&self, other: &GFrameSystem) -> Result<Self> {
        if !self.same_shape(other) {
            return Err(Error::DimensionMismatch("block sum of systems with different shapes".into()));
        }
        self.map_blocks(|i, op| op + &other.operators[i])
    }

    /// Appends one more block `Λ_{N+1}`.
    pub fn with_block(&self, op: ComplexMatrix) -> Result<Self> {
        let mut ops = self.operators.clone();
        ops.push(op);
        Self::new(self.ambient_dim, ops)
    }
}

/// An element `{fᵢ}` of `⊕ᵢ Hᵢ`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientVector {
    block_dims: Vec<usize>,
    blocks: Vec<Vec<Complex64>>,
}

impl CoefficientVector {
    pub fn new(blocks: Vec<Vec<Complex64>>) -> Self {
        let block_dims = blocks.iter().map(Vec::len).collect();
        Self { block_dims, blocks }
    }

    pub fn zeros(block_dims: &[usize]) -> Self {
        Self::new(block_dims.iter().map(|&m| vec![Complex64::new(0.0, 0.0); m]).collect())
    }

    pub fn from_flat(flat: &[Complex64], block_dims: &[usize]) -> Result<Self> {
        let total: usize = block_dims.iter().sum();
        if flat.len() != total {
            return Err(Error::DimensionMismatch(format!(
                "coefficient vector of length {} does not match block total {total}",
                flat.len()
            )));
        }
        let mut at = 0;
        let blocks = block_dims
            .iter()
            .map(|&m| {
                let b = flat[at..at + m].to_vec();
                at += m;
                b
            })
            .collect();
        Ok(Self::new(blocks))
    }

    /// The block embedding `e_{i,j}·δᵢ`: standard basis vector `j` in block `i`.
    pub fn unit(block_dims: &[usize], block: usize, index: usize) -> Self {
        let mut v = Self::zeros(block_dims);
        v.blocks[block][index] = Complex64::new(1.0, 0.0);
        v
    }

    pub fn block_dims(&self) -> &[usize] {
        &self.block_dims
    }

    pub fn blocks(&self) -> &[Vec<Complex64>] {
        &self.blocks
    }

    pub fn to_flat(&self) -> Vec<Complex64> {
        self.blocks.iter().flatten().copied().collect()
    }

    pub fn norm(&self) -> f64 {
        self.blocks.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

// JSON: {"ambient_dim": n, "blocks": [{"dim": m, "matrix": [[{re,im},…],…]}]}

#[derive(Serialize, Deserialize)]
struct BlockRepr {
    dim: usize,
    matrix: ComplexMatrix,
}

#[derive(Serialize, Deserialize)]
struct SystemRepr {
    ambient_dim: usize,
    blocks: Vec<BlockRepr>,
}

impl Serialize for GFrameSystem {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SystemRepr {
            ambient_dim: self.ambient_dim,
            blocks: self
                .operators
                .iter()
                .map(|op| BlockRepr {
                    dim: op.nrows(),
                    matrix: op.clone(),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for GFrameSystem {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = SystemRepr::deserialize(d)?;
        let n = repr.ambient_dim;
        let mut ops = Vec::with_capacity(repr.blocks.len());
        for (i, block) in repr.blocks.into_iter().enumerate() {
            let m = block.matrix;
            // Row-major nested arrays cannot carry the column count of an empty matrix.
            let m = if m.nrows() == 0 { ComplexMatrix::zeros(0, n) } else { m };
            if m.shape() != (block.dim, n) {
                return Err(D::Error::custom(format!(
                    "blocks[{i}].matrix has shape {}×{}, expected {}×{n} (dim × ambient_dim)",
                    m.nrows(),
                    m.ncols(),
                    block.dim
                )));
            }
            ops.push(m);
        }
        GFrameSystem::new(n, ops).map_err(D::Error::custom)
    }
}
