use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A parameter violates the stated domain of an operation.
    #[error("{op}: requires {requirement} (got {got})")]
    Domain {
        op: &'static str,
        requirement: &'static str,
        got: String,
    },

    /// The (n, k) pair lies outside the regime a closed form covers.
    #[error("{op}: requires {regime} (got n={n}, k={k})")]
    Regime {
        op: &'static str,
        regime: &'static str,
        n: u64,
        k: u64,
    },

    /// A rational closed form did not evaluate to an integer.
    #[error("{op}: closed form is not integral ({value})")]
    NotIntegral { op: &'static str, value: String },

    #[error("unknown identity '{0}' (expected one of lem1, lem2, lem4, lem5)")]
    UnknownIdentity(String),

    #[error("distribution for n={n}, k={k} is empty; mean bin count is undefined")]
    EmptyDistribution { n: u64, k: u64 },
}

impl Error {
    pub(crate) fn domain(
        op: &'static str,
        requirement: &'static str,
        got: impl Into<String>,
    ) -> Self {
        Error::Domain {
            op,
            requirement,
            got: got.into(),
        }
    }
}
