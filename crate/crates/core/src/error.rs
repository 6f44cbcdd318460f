//! Error type shared by every module in the crate.
//!
//! The kebab-case prefixes in the `Display` output are stable identifiers;
//! the CLI and the tests match on them.

/// Crate-wide error enumeration.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("grid-too-small: {0}")]
    GridTooSmall(String),
    #[error("out-of-range: {0}")]
    OutOfRange(String),
    #[error("node-in-domain: |psi| < {amp:.3e} at x={x}, t={t} (slice {k}, node {j})")]
    NodeInDomain { x: f64, t: f64, k: usize, j: usize, amp: f64 },
    #[error("degenerate-scale: {0}")]
    DegenerateScale(String),
    #[error("missing-derivative: {0}")]
    MissingDerivative(String),
    #[error("reality-violated: defect {defect:.3e} exceeds tolerance {tol:.3e}")]
    RealityViolated { defect: f64, tol: f64 },
    #[error("seed-inconsistent: {0}")]
    SeedInconsistent(String),
    #[error("not-quasi-solvable: {0}")]
    NotQuasiSolvable(String),
    #[error("nonreal-spectrum: {0}")]
    NonrealSpectrum(String),
    #[error("degree-cap: {0}")]
    DegreeCap(String),
    #[error("invalid-frequency: {0}")]
    InvalidFrequency(String),
    #[error("wavepacket-hit-boundary: edge amplitude {amp:.3e} of max at step {step}")]
    WavepacketHitBoundary { step: usize, amp: f64 },
    #[error("mismatched-discretization: {0}")]
    MismatchedDiscretization(String),
    #[error("inconsistent-construction: {0}")]
    InconsistentConstruction(String),
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("non-finite value: {0}")]
    NonFinite(String),
    #[error("unknown catalog entry: {0}")]
    UnknownEntry(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable identifier used by the CLI and tests ("grid-too-small", ...).
    pub fn code(&self) -> &'static str {
        match self {
            Error::GridTooSmall(_) => "grid-too-small",
            Error::OutOfRange(_) => "out-of-range",
            Error::NodeInDomain { .. } => "node-in-domain",
            Error::DegenerateScale(_) => "degenerate-scale",
            Error::MissingDerivative(_) => "missing-derivative",
            Error::RealityViolated { .. } => "reality-violated",
            Error::SeedInconsistent(_) => "seed-inconsistent",
            Error::NotQuasiSolvable(_) => "not-quasi-solvable",
            Error::NonrealSpectrum(_) => "nonreal-spectrum",
            Error::DegreeCap(_) => "degree-cap",
            Error::InvalidFrequency(_) => "invalid-frequency",
            Error::WavepacketHitBoundary { .. } => "wavepacket-hit-boundary",
            Error::MismatchedDiscretization(_) => "mismatched-discretization",
            Error::InconsistentConstruction(_) => "inconsistent-construction",
            Error::Parse { .. } => "parse-error",
            Error::NonFinite(_) => "non-finite",
            Error::UnknownEntry(_) => "unknown-entry",
        }
    }
}
