use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{what} = {value} is outside its domain {domain}")]
    Domain {
        what: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("empty request: {0}")]
    Empty(&'static str),

    #[error("at least 2 sites are required, got {0}")]
    InsufficientSites(usize),

    #[error("non-finite effect size at index {0}")]
    NonFiniteData(usize),

    #[error("length mismatch: expected {expected}, got {got} ({what})")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("samples come from different designs: (n={n0}, m={m0}) vs (n={n1}, m={m1})")]
    DesignMismatch { n0: u64, m0: u32, n1: u64, m1: u32 },

    #[error("degenerate thresholds: 1/k1 = {inv_k1} is not below k0 = {k0}")]
    DegenerateThresholds { k0: f64, inv_k1: f64 },

    #[error("infeasible target: no n <= {n_max} reaches the power target (last gap {last_gap:.5})")]
    Infeasible { n_max: u64, last_gap: f64 },

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
