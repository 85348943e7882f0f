use thiserror::Error;

/// Errors raised by the library.
///
/// Verification failures are never errors; they come back as report data.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("odd d required (d >= 3), got {0}")]
    EvenOrSmallDimension(u64),
    #[error("{0} is not square-free")]
    NotSquareFree(u64),
    #[error("bound {0} is below the smallest tower dimension 4")]
    BoundTooSmall(u64),
    #[error("even entry {0} in divisibility graph (conductor 2d handling is not supported)")]
    EvenGraphEntry(u64),
    #[error("empty dimension list")]
    EmptyInput,
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("vector is not normalized (norm^2 = {0})")]
    NotNormalized(f64),
    #[error("matrix is not a projector (residual {0:e})")]
    NotProjector(f64),
    #[error("matrix {alpha} {beta} / {gamma} {delta} is not symplectic mod {d}")]
    NotSymplectic { alpha: u64, beta: u64, gamma: u64, delta: u64, d: u64 },
    #[error("Clifford construction violated the defining relation (residual {0:e})")]
    CliffordConstruction(f64),
    #[error("unsupported dimension {0} for this operation")]
    UnsupportedDimension(u64),
    #[error("frame is not tight (residual {0:e})")]
    NotTight(f64),
    #[error("Naimark complement needs more vectors than dimensions (count {count}, dim {dim})")]
    NoComplement { count: usize, dim: usize },
    #[error("family is not covariant under the Weyl-Heisenberg group (residual {0:e})")]
    NotCovariant(f64),
    #[error("arithmetic overflow for {0}")]
    Overflow(u64),
    #[error("rung assignment disagrees with ladder lifting at d = {0}")]
    RungMismatch(u64),
    #[error("no fiducial found after {restarts} restarts (best potential gap {best_gap:e})")]
    NotFound { restarts: usize, best_gap: f64 },
    #[error("invalid option: {0}")]
    InvalidOption(String),
}

pub type Result<T> = std::result::Result<T, Error>;
