use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("ring mismatch: {0} vs {1}")]
    RingMismatch(String, String),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("not a unit: {0}")]
    NotAUnit(String),
    #[error("division is not integral: {0} / {1}")]
    NonIntegralDivision(String, String),
    #[error("zero division")]
    ZeroDivision,
    #[error("unsupported ring {ring} for {op}")]
    UnsupportedRing { op: &'static str, ring: String },
    #[error("unsupported base change to characteristic {0}")]
    UnsupportedBaseChange(u64),
    #[error("cannot parse ring descriptor: {0}")]
    BadDescriptor(String),
    #[error("cannot parse {what}: {text}")]
    Parse { what: &'static str, text: String },
    #[error("dimension mismatch: {0}")]
    Dim(String),
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is singular")]
    Singular,
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("matrix is not symplectic")]
    NotSymplectic,
    #[error("index {0} out of range (1..{1})")]
    IndexRange(usize, usize),
    #[error("unknown letter {0}")]
    UnknownLetter(String),
    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),
    #[error("tuple is empty")]
    EmptyTuple,
    #[error("evaluated product is not the identity ({0})")]
    ProductNotIdentity(String),
    #[error("vector is not in Ker(Gamma_z)")]
    NotInKernel,
    #[error("missing separating flag for letter {0}")]
    MissingFlag(String),
    #[error("representation file: {0}")]
    Schema(String),
    #[error("psi is not invariant under generator {0}")]
    PsiNotInvariant(String),
    #[error("unknown builtin tuple {0}")]
    UnknownBuiltin(String),
    #[error("genus {0} not supported for {1}")]
    BadGenus(u32, &'static str),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
