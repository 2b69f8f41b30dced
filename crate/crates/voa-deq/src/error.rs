use thiserror::Error;

/// Crate-wide error type. Variants map onto the CLI exit codes:
/// verification failures -> 1, input/schema errors -> 2, resource caps -> 3.
#[derive(Error, Debug)]
pub enum Error {
    #[error("mode action left the stored weight range: {0}")]
    Truncated(String),
    #[error("cutoff too small: {0}")]
    CutoffOverflow(String),
    #[error("evaluation point on the forbidden locus z1 z2 (z1 - z2) = 0")]
    ForbiddenPoint,
    #[error("invalid region: {0}")]
    UnknownRegion(String),
    #[error("unsupported locus: {0}")]
    UnsupportedLocus(String),
    #[error("module data inconsistent: {0}")]
    InconsistentModule(String),
    #[error("pairing matrix singular at weight {0}")]
    SingularPairing(String),
    #[error("no dependence found up to order {0}")]
    NoDependence(usize),
    #[error("division not exact in the coefficient ring: {0}")]
    InexactDivision(String),
    #[error("irregular singular behaviour at {0}")]
    NotRegular(String),
    #[error("resource cap exceeded: {0}")]
    ResourceCap(String),
    #[error("schema error: {0}")]
    Schema(String),
    #[error("invalid input: {0}")]
    Input(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// CLI exit code for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::ResourceCap(_) => 3,
            Error::Schema(_) | Error::Input(_) | Error::Io(_) | Error::Json(_)
            | Error::UnknownRegion(_) | Error::UnsupportedLocus(_)
            | Error::ForbiddenPoint => 2,
            _ => 1,
        }
    }
}
