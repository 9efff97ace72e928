use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("step rejected: dt*max|lambda| = {product:.3e} exceeds {limit}")]
    StepRejected { product: f64, limit: f64 },

    #[error("normalization violated by {excess:.3e} at t = {t}")]
    Normalization { t: f64, excess: f64 },

    #[error("QR iteration did not converge after {0} sweeps")]
    NoConvergence(usize),

    #[error("characteristic roots coincide (|lambda1 - lambda2| = {0:.3e})")]
    DegenerateRoots(f64),

    #[error("ill-conditioned system (condition number {0:.3e})")]
    IllConditioned(f64),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("time {t} outside trajectory range [0, {t_end}]")]
    OutOfRange { t: f64, t_end: f64 },

    #[error("no peak found")]
    NoPeak,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("series acceleration did not converge ({0})")]
    Acceleration(String),
}
