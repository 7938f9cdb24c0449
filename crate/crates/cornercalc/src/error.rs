use thiserror::Error;

/// Errors reported by the combinatorial engine.
///
/// Operations that answer a question ("does this lift exist?", "is this a
/// p-submanifold?") return the answer as data; errors are reserved for inputs
/// that violate a precondition, such as a blow-up center that is not a cone
/// of the current refinement.
#[derive(Debug, Error)]
pub enum Error {
    #[error("label sets do not match: {0}")]
    AmbientMismatch(String),

    #[error("degenerate cone: {0}")]
    DegenerateCone(String),

    #[error("blow-up center is not a cone of the fan: {0}")]
    CenterNotACone(String),

    #[error("blow-up center is not supported by any corner: {0}")]
    UnsupportedCenter(String),

    #[error("fan invariant violated: {0}")]
    FanInvariant(String),

    #[error("invalid space: {0}")]
    InvalidSpace(String),

    #[error("invalid boundary map: {0}")]
    InvalidMap(String),

    #[error("not a morphism: {0}")]
    NotAMorphism(String),

    #[error("vector field is not projectable: {0}")]
    NotProjectable(String),

    #[error("invalid arrangement: {0}")]
    InvalidArrangement(String),

    #[error("construction mismatch: {0}")]
    ConstructionMismatch(String),
}
