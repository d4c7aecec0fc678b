use thiserror::Error;

/// Error type shared by the whole engine.
///
/// Variants are grouped by how callers should react: `Parse` and
/// `InvalidInput` are user mistakes, `ExcludedCase` and `RegularityCheck`
/// are mathematically meaningful rejections, and the remaining variants
/// signal bugs or damaged on-disk state.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed user input (polynomial strings, coefficient lists, flags).
    #[error("parse error: {0}")]
    Parse(String),

    /// Structurally valid input that violates a precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// `ell = dim W` (or out of range). The functor is only defined for
    /// `1 <= ell <= dim W - 1`; at `ell = dim W` the one-term concentration
    /// degenerates into a two-term sequence and no Weyman complex exists.
    #[error("excluded case: ell = {ell} with dim W = {dim_w}; the construction requires 1 <= ell <= dim W - 1")]
    ExcludedCase { ell: usize, dim_w: usize },

    /// The truncated module failed the exactness probe, i.e. the supplied
    /// regularity bound is wrong (or the module is not saturated there).
    #[error("regularity check failed at cohomological position {position}, internal degree {degree}: the linear strand is not exact, so the supplied regularity {claimed} is too small")]
    RegularityCheck {
        position: i64,
        degree: i64,
        claimed: i64,
    },

    /// A degreewise computation ran off the realized degree window.
    #[error("degree window too narrow: needed internal degree {needed}, realized window is [{lo}, {hi}]")]
    WindowTooNarrow { needed: i64, lo: i64, hi: i64 },

    /// A serialized segment or complex does not satisfy its own invariants.
    #[error("corrupted artifact: {0}")]
    CorruptedArtifact(String),

    /// An internal invariant that should hold for every input was violated.
    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_) | Error::InvalidInput(_) => 2,
            Error::ExcludedCase { .. } => 3,
            Error::RegularityCheck { .. } => 4,
            Error::WindowTooNarrow { .. }
            | Error::CorruptedArtifact(_)
            | Error::Invariant(_) => 5,
            Error::Io(_) | Error::Json(_) => 1,
        }
    }
}
