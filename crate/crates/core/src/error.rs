use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{what}: t = {t} lies outside the domain {domain}")]
    Domain {
        what: String,
        t: f64,
        domain: String,
    },

    #[error("unknown function id `{0}`")]
    UnknownFunction(String),

    #[error("unknown weight id `{0}`")]
    UnknownWeight(String),

    #[error("unknown inequality id `{0}`")]
    UnknownInequality(String),

    #[error("unknown means case `{0}`")]
    UnknownCase(String),

    #[error("unknown suite `{0}`")]
    UnknownSuite(String),

    #[error("invalid interval [{a}, {b}]: need finite a < b")]
    InvalidInterval { a: f64, b: f64 },

    #[error("derivative order {0} is not available (expected 0, 1 or 2)")]
    InvalidOrder(u8),

    #[error("evaluation point x = {x} is outside [{a}, {b}]")]
    PointOutside { x: f64, a: f64, b: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("inequality {ineq} is stated for the unit weight only, got `{weight}`")]
    WeightMismatch { ineq: String, weight: String },

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("integrand is not finite at endpoint t = {0}")]
    SingularEndpoint(f64),

    #[error("reference integration on [{a}, {b}] did not reach tolerance {requested:e} (estimate {achieved:e})")]
    OracleTolerance {
        a: f64,
        b: f64,
        requested: f64,
        achieved: f64,
    },

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("moment of the weight vanishes on [{a}, {b}]")]
    ZeroMoment { a: f64, b: f64 },

    #[error(
        "tolerance {tol:e} unreachable: achieved bound {achieved:e} with {intervals} subintervals"
    )]
    ToleranceUnreachable {
        tol: f64,
        achieved: f64,
        intervals: usize,
    },
}
