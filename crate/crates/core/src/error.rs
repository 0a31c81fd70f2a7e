use thiserror::Error;

/// Library-wide error type.  Variants correspond to violated preconditions
/// or structurally invalid inputs; mathematically meaningful failures (a
/// certificate that says "no") are reported through result types instead.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {context}")]
    DimensionMismatch { context: &'static str },

    #[error("matrix is not Hermitian")]
    NotHermitian,

    #[error("matrix is not nilpotent")]
    NotNilpotent,

    #[error("matrix is not unipotent")]
    NotUnipotent,

    #[error("matrix is not an infinitesimal isometry of the polarization")]
    NotIsometry,

    #[error("cone generators determine different weight filtrations: {detail}")]
    ConeNotPure { detail: String },

    #[error("the pair (W, F) is not a mixed Hodge structure: {detail}")]
    NotMhs { detail: String },

    #[error("weight filtration does not match the nilpotent operator")]
    WeightMismatch,

    #[error("no solution: {context}")]
    NoSolution { context: &'static str },

    #[error("solution is not unique: {context}")]
    NonUnique { context: &'static str },

    #[error("element does not centralize the cone")]
    NotInCentralizer,

    #[error("residue after removing the graded part is not unipotent")]
    NotUnipotentResidue,

    #[error("filtration is outside the open Schubert cell of the base point")]
    NotInCell,

    #[error("coordinate does not centralize the cone")]
    XNotCentral,

    #[error("stratum {found} is not in the weight-closure set of {base}")]
    NotInWeightSet { base: String, found: String },

    #[error("monodromy element is not in the unipotent radical of the centralizer")]
    GammaNotUnipotentRadical,

    #[error("weight-closure set violates interval closure at {detail}")]
    ClosureViolation { detail: String },

    #[error("invalid input: {0}")]
    Invalid(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }
}
