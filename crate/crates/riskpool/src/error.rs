//! Error taxonomy shared across the crate.
//!
//! Variants are grouped by how the CLI reports them: configuration problems
//! exit with code 1, numerical refusals (divergent moments or premium
//! constants) with code 2, and invariant/axiom failures with code 3.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter is outside its admissible range (probabilities, rates,
    /// weights), or an input sample is malformed.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Configuration file problems: unknown keys, missing fields,
    /// kind/subcommand mismatches.
    #[error("config error: {0}")]
    Config(String),

    /// A requested quantity diverges (infinite moment or expected shortfall
    /// of an infinite-mean tail). Carried as a refusal, not a panic, so the
    /// CLI can exit with a dedicated code.
    #[error("divergent quantity: {0}")]
    Divergent(String),

    /// The distortion premium constant of the integrability condition is
    /// infinite for the configured (h, p); premium experiments refuse to run.
    #[error("integrability condition violated: {0}")]
    NotIntegrable(String),

    /// Distortion premium evaluation on a sample with negative entries; the
    /// signed extension is `choquet_integral`.
    #[error("sample contains negative values ({0}); use choquet_integral for signed samples")]
    NegativeSample(String),

    /// Out of the implemented scope (e.g. worst-case aggregation under VaR).
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// A fuzzed axiom or bound check found a counterexample.
    #[error("{axiom} violated: {details} (residual {residual:e})")]
    AxiomViolation {
        axiom: String,
        details: String,
        residual: f64,
    },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code the CLI maps this error to.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParameter(_) | Error::Config(_) => 1,
            Error::Divergent(_) | Error::NotIntegrable(_) | Error::Unsupported(_) => 2,
            Error::NegativeSample(_) => 2,
            Error::AxiomViolation { .. } => 3,
            Error::Io(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_partition_the_error_kinds() {
        assert_eq!(Error::InvalidParameter("x".into()).exit_code(), 1);
        assert_eq!(Error::Config("x".into()).exit_code(), 1);
        assert_eq!(Error::Divergent("x".into()).exit_code(), 2);
        assert_eq!(Error::NotIntegrable("x".into()).exit_code(), 2);
        assert_eq!(Error::NegativeSample("x".into()).exit_code(), 2);
        assert_eq!(Error::Unsupported("x".into()).exit_code(), 2);
        assert_eq!(
            Error::AxiomViolation {
                axiom: "cash additivity".into(),
                details: "x".into(),
                residual: 1.0,
            }
            .exit_code(),
            3
        );
    }
}
