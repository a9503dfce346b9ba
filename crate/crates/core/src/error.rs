use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid ambient space: {0}")]
    InvalidAmbient(String),

    #[error("ambient mismatch: `{left}` vs `{right}`")]
    AmbientMismatch { left: String, right: String },

    #[error("class is not invertible: degree-0 part is {0}, expected +1 or -1")]
    NotInvertible(String),

    #[error("codimension {codim} out of range 0..={dim}")]
    CodimOutOfRange { codim: i64, dim: u32 },

    #[error("cannot parse class `{text}`: {reason}")]
    Parse { text: String, reason: String },

    #[error("invalid bundle: {0}")]
    InvalidBundle(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid strata: {0}")]
    InvalidStrata(String),

    #[error("not the class of a regular section: {0}")]
    NotRegularSection(String),

    #[error("non-homogeneous input: {0}")]
    NonHomogeneous(String),

    #[error("intersection needs at least 2 hypersurfaces, got {0}")]
    TooFewHypersurfaces(usize),

    #[error("missing data: {0}")]
    MissingData(String),

    #[error("invalid scenario at `{field}`: {reason}")]
    Scenario { field: String, reason: String },

    #[error("unknown example `{name}`; available: {available}")]
    UnknownExample { name: String, available: String },
}

impl Error {
    pub(crate) fn scenario(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Scenario {
            field: field.into(),
            reason: reason.into(),
        }
    }
}
