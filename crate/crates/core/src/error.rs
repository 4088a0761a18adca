use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{what} out of domain: {value}")]
    Domain { what: &'static str, value: f64 },

    #[error("root is not bracketed: f({lo}) = {f_lo}, f({hi}) = {f_hi}")]
    Bracketing { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error("infeasible candidate: {0}")]
    InfeasibleCandidate(String),

    #[error("asymptotic formulas do not apply at c = {c}, eta = {eta}: {reason}")]
    NotAsymptotic { c: u64, eta: f64, reason: &'static str },

    #[error("cutoff delta = {0} is not in (0, 1/2)")]
    InvalidCutoff(f64),

    #[error("integral codelength adjustment infeasible: d_z'^2 = {dz_sq} < 4 r d_ell' = {bound}")]
    AdjustmentInfeasible { dz_sq: f64, bound: f64 },

    #[error("eta = {given} is inconsistent with eps1, eps2, n (which give {derived})")]
    InconsistentEta { given: f64, derived: f64 },

    #[error("parameter set is infeasible for c = {c}, eta = {eta}: {detail}")]
    InfeasibleParams { c: u64, eta: f64, detail: String },

    #[error("codebook of {n} x {ell} bits exceeds the memory budget of {budget_bits} bits")]
    Capacity { n: u64, ell: u64, budget_bits: u64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("user index {index} out of range for {n} users")]
    InvalidIndex { index: usize, n: usize },

    #[error("coalition must not be empty")]
    EmptyCoalition,

    #[error("{0} trials had a coalition score above |C| Z with no colluder accused")]
    ImplicationViolated(u64),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("malformed codebook: {0}")]
    Format(#[from] FormatError),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormatError {
    #[error("file is empty")]
    Empty,
    #[error("bad magic {0:?}")]
    BadMagic([u8; 4]),
    #[error("unsupported version {0}")]
    UnsupportedVersion(u16),
    #[error("truncated: need {needed} bytes, have {have}")]
    Truncated { needed: u64, have: u64 },
    #[error("{0} trailing bytes after checksum")]
    TrailingBytes(u64),
    #[error("checksum mismatch: stored {stored:#010x}, computed {computed:#010x}")]
    Checksum { stored: u32, computed: u32 },
    #[error("header field {0} is invalid")]
    InvalidHeader(&'static str),
    #[error("bias at position {0} lies outside [delta, 1 - delta]")]
    BiasOutOfRange(u64),
    #[error("row {0} has non-zero padding bits")]
    Padding(u64),
}

pub(crate) fn domain(what: &'static str, value: f64) -> Error {
    Error::Domain { what, value }
}
