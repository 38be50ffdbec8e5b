//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid size: need n_theta >= 2 and n_phi >= 2, got {n_theta} x {n_phi}")]
    BadGridSize { n_theta: usize, n_phi: usize },

    #[error("n_phi must be even so that phi -> pi - phi permutes the nodes, got {0}")]
    OddPhiCount(usize),

    #[error("patterns do not share a grid (or frequency)")]
    GridMismatch,

    #[error("pattern grid is not closed under the mirror map phi -> pi - phi")]
    NotMirrorClosed,

    #[error("pattern sample is not finite at node {index}")]
    NonFiniteSample { index: usize },

    #[error("pattern sample count {got} does not match grid size {expected}")]
    SampleCountMismatch { expected: usize, got: usize },

    #[error("basis power is zero; imbalance ratio undefined")]
    DegenerateBasis,

    #[error("passive termination requires Re(load) >= 0, got {0} ohm at port {1}")]
    NegativeLoadResistance(f64, usize),

    #[error("load count {got} does not match passive port count {expected}")]
    LoadCountMismatch { expected: usize, got: usize },

    #[error("frequency {0} Hz not covered by the network")]
    FrequencyNotFound(f64),

    #[error("port index {0} out of range for {1}-port network")]
    PortOutOfRange(usize, usize),

    #[error("matrix is singular or ill-conditioned (condition estimate {cond:.3e}); \
             loaded passive block is resonantly degenerate")]
    ResonantLoadDegeneracy { cond: f64 },

    #[error("singular matrix in {0}")]
    SingularMatrix(&'static str),

    #[error("cosine integral requires x > 0, got {0}")]
    CiDomain(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("transmit correlation matrix is not positive semidefinite (min eigenvalue {0:.3e})")]
    NonPsdCorrelation(f64),

    #[error("streams have different lengths: {0} vs {1}")]
    StreamLengthMismatch(usize, usize),

    #[error("symbol stream entries must be +1 or -1")]
    BadSymbol,

    #[error("segment length {seg} exceeds signal length {len}")]
    SegmentTooLong { seg: usize, len: usize },

    #[error("band edge {edge} Hz is at or beyond Nyquist ({nyquist} Hz)")]
    BandEdgeBeyondNyquist { edge: f64, nyquist: f64 },

    #[error("touchstone parse error at line {line}: {msg}")]
    Touchstone { line: usize, msg: String },

    #[error("pattern file error in {path} at row {row}: {msg}")]
    PatternFile {
        path: String,
        row: usize,
        msg: String,
    },

    #[error("imported antenna files are inconsistent: {0}")]
    ImportInconsistent(String),

    #[error("sub-band count {k} exceeds number of frequencies {n}")]
    TooManySubBands { k: usize, n: usize },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
