use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid wedge: bidegree ({p},{q}) exceeds (3,3)")]
    InvalidWedge { p: usize, q: usize },

    #[error("non-positive (2,2)-form: smallest eigenvalue {min_eigenvalue:e}")]
    NonPositiveTwoTwo { min_eigenvalue: f64 },

    #[error("singular reference metric (determinant {det:e})")]
    SingularMetric { det: f64 },

    #[error("fibre coordinates vanish: r is undefined on the exceptional locus")]
    ZeroFibre,

    #[error("adapted frame requires z = 0, got |z| = {0:e}")]
    NonzeroBase(f64),

    #[error("radius {r:e} outside valid range [{min:e}, {max:e}] for {what}")]
    OutOfRange { what: &'static str, r: f64, min: f64, max: f64 },

    #[error("metric left the positive cone in region {region} at r = {r:e} (min eigenvalue {min_eigenvalue:e})")]
    PositivityLoss { region: String, r: f64, min_eigenvalue: f64 },

    #[error("shooting failed: {0}")]
    Shooting(String),

    #[error("infeasible parameters: {0}")]
    Infeasible(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("insufficient samples for fit: {0} (need at least 4)")]
    TooFewSamples(usize),

    #[error("singular linear system: {0}")]
    SingularSystem(String),

    #[error("iteration diverged after {iterations} iterations (last update norm {last_norm:e})")]
    Divergence { iterations: usize, last_norm: f64 },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
