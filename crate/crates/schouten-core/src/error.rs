//! Crate-wide error type.

use alloc::string::String;

use crate::poincare::ResonanceCertificate;

#[derive(Clone, PartialEq, Eq, Debug, thiserror::Error)]
pub enum Error {
    #[error("ambient variable count mismatch: expected {expected}, found {found}")]
    VarMismatch { expected: usize, found: usize },

    #[error("grade mismatch: expected {expected}, found {found}")]
    GradeMismatch { expected: usize, found: usize },

    #[error("unsupported request: {0}")]
    Capability(String),

    #[error("structural error: {0}")]
    Structural(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("malformed section: {0}")]
    MalformedSection(String),

    #[error("resonant eigenvalues: {0}")]
    Resonance(ResonanceCertificate),

    #[error("right-hand side not in the operator image; kernel components: {monomials}")]
    NotInImage { monomials: String },

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("wedge division failed: {0}")]
    DivisionFailed(String),

    #[error("bivector is not Poisson; integrability residual has {residual_terms} terms: {residual}")]
    NonPoisson {
        residual_terms: usize,
        residual: String,
    },

    #[error("cannot parse scalar from {0:?}")]
    ScalarParse(String),
}
