use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input violated a domain precondition; `field` names the offending input.
    #[error("{field} = {value}: {reason}")]
    Domain {
        field: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// A ratio whose denominator vanishes, so the requested multiplier is unidentified.
    #[error("degenerate denominator in {quantity}: |{denominator:e}| is below the identification threshold")]
    DegenerateDenominator {
        quantity: &'static str,
        denominator: f64,
    },

    #[error("holding interval {dt} does not leave the option alive (maturity {maturity})")]
    MaturityExhausted { dt: f64, maturity: f64 },

    #[error("double factorial (2n-1)!! overflows f64 for n = {0}")]
    Overflow(u32),

    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn domain(field: &'static str, value: f64, reason: &'static str) -> Self {
        Error::Domain {
            field,
            value,
            reason,
        }
    }
}
