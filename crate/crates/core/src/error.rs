use thiserror::Error;

/// Errors raised by the library. Every variant names the offending value so
/// the CLI can surface it verbatim.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{name} = {value} is outside the domain {domain}")]
    Domain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("point index {index} out of range for dimension {n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("dimension {n} exceeds the supported maximum {max}")]
    DimensionTooLarge { n: usize, max: usize },

    #[error("function has empty support")]
    EmptySupport,

    #[error("coordinate {i} out of range 1..={n}")]
    CoordinateOutOfRange { i: usize, n: usize },

    #[error("support size {m} out of range 0..={max}")]
    SupportSizeOutOfRange { m: usize, max: usize },

    #[error("exhaustive search at n = {n} exceeds the default cap n <= {cap}; an explicit override is required")]
    SearchCapExceeded { n: usize, cap: usize },

    #[error("no Boolean function with n = {n}, m = {m} has max |coordinate coefficient| = {beta}")]
    Infeasible { n: usize, m: usize, beta: String },

    #[error("no sign change of {what} on [{lo}, {hi}]")]
    NoBracket {
        what: &'static str,
        lo: f64,
        hi: f64,
    },

    #[error("{0}")]
    Invariant(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_domain(
    name: &'static str,
    value: f64,
    ok: bool,
    domain: &'static str,
) -> Result<()> {
    if ok && !value.is_nan() {
        Ok(())
    } else {
        Err(Error::Domain {
            name,
            value,
            domain,
        })
    }
}
