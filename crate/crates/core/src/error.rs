use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("theta is not antisymmetric: max |θ[μ][ν] + θ[ν][μ]| = {0}")]
    AntisymmetryViolation(f64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("no Fourier transform available for {0}")]
    TransformUnavailable(String),
    #[error("derivative of order {order} unavailable (cap {cap})")]
    DerivativeUnavailable { order: usize, cap: usize },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("field lives in {got} space, operation needs {expected} space")]
    SpaceMismatch { expected: &'static str, got: &'static str },
    #[error("spectral derivative would alias: momentum tail mass {0:e} of total")]
    AliasRisk(f64),
    #[error("theta is singular (|det| = {0:e})")]
    ThetaSingular(f64),
    #[error("memory guard: n = {n} exceeds the tensor cap {cap} for d = {d}")]
    MemoryGuard { n: usize, d: usize, cap: usize },
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("boundary tail mass {0:e} too large for twisted convolution")]
    TailMass(f64),
    #[error("S_alpha^beta is trivial for alpha = {alpha}, beta = {beta}")]
    NontrivialSpace { alpha: f64, beta: f64 },
    #[error("derivative order {order} exceeds cap {cap}")]
    OrderCap { order: usize, cap: usize },
    #[error("domain error: {0}")]
    DomainError(String),
    #[error("certificate not found: {0}")]
    CertificateNotFound(String),
    #[error("unsupported theta: {0}")]
    UnsupportedTheta(String),
    #[error("domination failed at s = {s}: dominator {value:e} < target {target:e}")]
    DominationFailed { s: f64, value: f64, target: f64 },
    #[error("quadrature domain too small: s_max = {s_max} < 2 s_n = {needed}")]
    DomainTooSmall { s_max: f64, needed: f64 },
    #[error("unsupported operand: {0}")]
    Unsupported(String),
    #[error("io: {0}")]
    Io(String),
}

impl Error {
    /// Errors that signal a broken internal invariant rather than bad input.
    pub fn is_invariant_breach(&self) -> bool {
        matches!(
            self,
            Error::CertificateNotFound(_) | Error::DominationFailed { .. }
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
