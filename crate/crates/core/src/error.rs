use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("modular parameter must have positive imaginary part, got {0}")]
    InvalidTau(Complex64),

    #[error("invalid series configuration: {0}")]
    InvalidSeriesConfig(String),

    #[error("theta series did not converge within {max_terms} terms at z = {z}")]
    Divergence { z: Complex64, max_terms: usize },

    #[error("pole: |{what}| = {magnitude:e} is below the floor {floor:e}")]
    Pole {
        what: &'static str,
        magnitude: f64,
        floor: f64,
    },

    #[error("derivative order {0} is not supported (expected 1 or 3)")]
    UnsupportedOrder(u32),

    #[error("half-period index ({a1}, {a2}) out of range for M = {m}")]
    InvalidHalfPeriod { a1: usize, a2: usize, m: usize },

    #[error("tensor space of dimension {local}^{sites} exceeds the cap {cap}")]
    DimensionCap { local: usize, sites: usize, cap: usize },

    #[error("site index {site} out of range 1..={sites}")]
    SiteOutOfRange { site: usize, sites: usize },

    #[error("two-site operator placed twice on site {0}")]
    SameSite(usize),

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("matrix is singular or ill-conditioned (condition estimate {0:e})")]
    Singular(f64),

    #[error("index sets overlap at element {0}")]
    Overlap(usize),

    #[error("invalid index set: {0}")]
    InvalidSubset(String),

    #[error("argument lists differ in length: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("argument must be non-zero: {0}")]
    ZeroArgument(&'static str),

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("quadrature node {node} at {z} failed: {source}")]
    QuadratureNode {
        node: usize,
        z: Complex64,
        #[source]
        source: Box<Error>,
    },

    #[error("rejection sampling gave up after {0} attempts")]
    SamplingExhausted(usize),
}
