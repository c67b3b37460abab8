use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("basis matrix must be square and non-empty, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("basis matrix is singular")]
    SingularMatrix,
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("integer overflow in exact arithmetic")]
    Overflow,
    #[error("malformed box: lo must be < hi and both inside [0,1] (axis {axis})")]
    MalformedBox { axis: usize },
    #[error("piece with translate {translate:?} has an empty region")]
    EmptyPiece { translate: Vec<i64> },
    #[error("invalid certificate: {0}")]
    BadCertificate(String),
    #[error("generator inconsistent: level {level} does not contain level {}", level - 1)]
    GeneratorInconsistent { level: usize },
    #[error("k = {k} exceeds n = {n}; consecutive offsets would repeat a residue")]
    KExceedsN { k: usize, n: u64 },
    #[error("offset indices {first} and {second} coincide mod {n}")]
    DuplicateResidue { first: i64, second: i64, n: u64 },
    #[error("structured offsets must share one (n, v)")]
    MixedStructure,
    #[error("exponential system needs at least one offset")]
    NoOffsets,
    #[error("matrix is not Hermitian (deviation {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("fiber class has {size} points but the system has only {k} offsets")]
    ClassTooLarge { size: usize, k: usize },
    #[error("fiber class must contain at least one lattice point")]
    EmptyClass,
    #[error("residue {r} is not attainable mod {n} (attainable residues are multiples of {step})")]
    Unachievable { r: u64, n: u64, step: u64 },
    #[error("certificate is not valid on the input partition")]
    CertificateInvalid,
    #[error("only {available} residues are attainable mod {n}, need {k}; try a larger n")]
    NotEnoughResidues { available: usize, n: u64, k: usize },
    #[error("polynomial has no nonzero coefficient")]
    EmptyPoly,
    #[error("offset index {j} out of range for a system with {k} offsets")]
    OffsetIndex { j: usize, k: usize },
    #[error("Gram window is empty")]
    WindowEmpty,
    #[error("quadrature needs at least one point per unit axis")]
    BadQuadrature,
    #[error("Kronecker search failed at j = {0}")]
    KroneckerSearchFailed(usize),
    #[error("parse error: {0}")]
    Parse(String),
}
