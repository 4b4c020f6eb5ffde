use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error in {what}: {detail}")]
    Domain { what: &'static str, detail: String },

    #[error("accuracy loss in {what}: estimated relative error {estimate:e}")]
    AccuracyLoss { what: &'static str, estimate: f64 },

    #[error("quadrature did not converge in {what}: error {achieved:e} > requested {requested:e} after {subdivisions} subdivisions")]
    NonConvergence {
        what: &'static str,
        achieved: f64,
        requested: f64,
        subdivisions: usize,
    },

    #[error("mode sum truncation insufficient: tail bound {bound:e} at k_max = {k_max} (requested {requested:e})")]
    TruncationInsufficient {
        k_max: usize,
        bound: f64,
        requested: f64,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn domain(what: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            what,
            detail: detail.into(),
        }
    }
}
