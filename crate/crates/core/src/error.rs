use thiserror::Error;

/// Hypotheses of the combination theorems that a caller can violate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hypothesis {
    /// The reconstruction `P·T_Γ·T_Λ*·g = g` fails for some `g` in the range of `K`.
    DualityOnRange,
    /// The frame operator does not map the range of `K` into itself.
    FrameOperatorInvariance,
}

impl std::fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Hypothesis::DualityOnRange => f.write_str("duality on R(K)"),
            Hypothesis::FrameOperatorInvariance => f.write_str("S_Λ-invariance of R(K)"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix entry at ({row}, {col}) is not finite")]
    NonFinite { row: usize, col: usize },
    #[error("matrix is not Hermitian (relative asymmetry {0:e})")]
    NotHermitian(f64),
    #[error("singular value decomposition did not converge")]
    ConvergenceFailure,
    #[error("invalid tolerance: {0}")]
    InvalidTolerance(String),
    #[error("range inclusion R(U) ⊆ R(V) does not hold")]
    RangeNotIncluded,
    #[error("system is not a K-g-frame: R(K) is not contained in R(T_Λ)")]
    NotKGFrame,
    #[error("alternate #{0} is not a K-dual of the primal system")]
    NotADual(usize),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(Hypothesis),
    #[error("system is not atomic for the given operator: {0}")]
    NotAtomicForInputs(String),
    #[error("synthesis operators are not orthogonal (‖T_Λ·T_Γ*‖_F = {0:e})")]
    OrthogonalityViolated(f64),
    #[error("surjective operator does not commute with K* ({0})")]
    CommutationViolated(String),
    #[error("neither U nor V is surjective")]
    NotSurjective,
    #[error("system is not a Parseval K-g-frame: {0}")]
    NotParseval(String),
    #[error("range hypothesis R(T_i) ⊆ R(U_i*·T_i) fails for i = {0}")]
    RangeHypothesisViolated(usize),
    #[error("operator is not positive semidefinite (λ_min = {0:e})")]
    NotPositive(f64),
    #[error("unknown theorem identifier {0:?}")]
    UnknownTheorem(String),
    #[error("requested rank {requested} exceeds rank {available} of the target")]
    RankTooLarge { requested: usize, available: usize },
    #[error("coefficient space dimension {available} is smaller than the ambient dimension {required}")]
    InsufficientCoefficientDim { required: usize, available: usize },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// Stable variant name, used by the CLI when reporting a violated hypothesis.
    pub fn name(&self) -> &'static str {
        match self {
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::NonFinite { .. } => "NonFinite",
            Error::NotHermitian(_) => "NotHermitian",
            Error::ConvergenceFailure => "ConvergenceFailure",
            Error::InvalidTolerance(_) => "InvalidTolerance",
            Error::RangeNotIncluded => "RangeNotIncluded",
            Error::NotKGFrame => "NotKGFrame",
            Error::NotADual(_) => "NotADual",
            Error::HypothesisViolated(_) => "HypothesisViolated",
            Error::NotAtomicForInputs(_) => "NotAtomicForInputs",
            Error::OrthogonalityViolated(_) => "OrthogonalityViolated",
            Error::CommutationViolated(_) => "CommutationViolated",
            Error::NotSurjective => "NotSurjective",
            Error::NotParseval(_) => "NotParseval",
            Error::RangeHypothesisViolated(_) => "RangeHypothesisViolated",
            Error::NotPositive(_) => "NotPositive",
            Error::UnknownTheorem(_) => "UnknownTheorem",
            Error::RankTooLarge { .. } => "RankTooLarge",
            Error::InsufficientCoefficientDim { .. } => "InsufficientCoefficientDim",
            Error::InvalidInput(_) => "InvalidInput",
        }
    }

    /// True for malformed input, as opposed to a mathematical negative.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::DimensionMismatch(_)
                | Error::NonFinite { .. }
                | Error::InvalidTolerance(_)
                | Error::UnknownTheorem(_)
                | Error::InvalidInput(_)
                | Error::InsufficientCoefficientDim { .. }
                | Error::RankTooLarge { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
