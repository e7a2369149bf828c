use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension {0} outside supported range 1..={max}", max = crate::hypercube::MAX_DIMENSION)]
    Dimension(u32),

    #[error("edge with base {base:#b} has direction bit {direction} set")]
    MalformedEdge { base: u32, direction: u32 },

    #[error("memory budget exceeded: need {needed} bytes, budget is {budget}")]
    MemoryBudget { needed: u64, budget: u64 },

    #[error("{0} overflows f64; use the log-space variant")]
    Overflow(&'static str),

    #[error("n={n} is too large for {what} (limit {limit})")]
    TooLarge { what: &'static str, n: u32, limit: u32 },

    #[error("quadrature did not converge within {subdivisions} subdivisions: best estimate {estimate} +/- {error}")]
    NoConvergence { estimate: f64, error: f64, subdivisions: usize },

    #[error("bound degenerate at this (n,u): S lower bound {s_lower} is not positive")]
    DegenerateBound { s_lower: f64 },

    #[error("particle cap {cap} exceeded at time {time} (expected population e^(n*horizon) = {expected:.3e})")]
    ParticleCap { cap: usize, time: f64, expected: f64 },

    #[error("edge {edge} has invalid passage time {weight}")]
    InvalidWeight { edge: u64, weight: f64 },

    #[error("empty sample")]
    EmptySample,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    /// True for failures caused by a resource cap rather than bad input.
    pub fn is_resource_cap(&self) -> bool {
        matches!(self, Error::MemoryBudget { .. } | Error::ParticleCap { .. } | Error::TooLarge { .. })
    }
}
