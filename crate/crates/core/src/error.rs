use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the model.
    #[error("domain error: {what} (got {value})")]
    Domain { what: &'static str, value: f64 },

    /// The root finder ran out of iterations or left its bracket.
    #[error("no convergence after {iterations} iterations: best iterate {best}, residual {residual}")]
    Convergence {
        best: f64,
        residual: f64,
        iterations: usize,
    },

    /// Bisection was asked to work on an interval without a sign change.
    #[error("no sign change on [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi}")]
    Bracket {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    /// The rate target needs an SINR too large to represent.
    #[error("infeasible link: rate exponent M*R/(beta*B) = {exponent} exceeds {limit}")]
    Infeasible { exponent: f64, limit: f64 },

    /// Accumulation in the Monte-Carlo oracle produced a non-finite value.
    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("config parse error: {0}")]
    ConfigParse(String),

    #[error("invalid config value for `{key}`: {reason}")]
    ConfigValue { key: &'static str, reason: String },

    #[error("invalid sweep: {0}")]
    Sweep(String),
}

impl Error {
    pub(crate) fn domain(what: &'static str, value: f64) -> Self {
        Error::Domain { what, value }
    }
}
