use core::fmt;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    Domain {
        /// Which argument or quantity was rejected.
        what: &'static str,
        /// The offending value.
        value: f64,
    },
    /// Adaptive quadrature hit its subdivision limit above the requested tolerance.
    Quadrature {
        /// Name of the integral being evaluated.
        what: &'static str,
        /// Best estimate reached.
        estimate: f64,
        /// Error estimate at termination.
        abs_error: f64,
        /// Number of subintervals in use.
        intervals: usize,
    },
    /// Root bracketing failed: the target lies outside the achievable range.
    NoSolution {
        /// Target value of the equation.
        target: f64,
        /// Value achieved at the smallest argument tried.
        low: f64,
        /// Value achieved at the largest argument tried.
        high: f64,
    },
    /// A probability left `[0, 1]` by more than round-off.
    Inconsistent {
        /// Quantity that went out of bounds.
        what: &'static str,
        /// The value that was produced.
        value: f64,
    },
}

/// Result alias for this crate.
pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain { what, value } => write!(f, "{what} out of domain: {value}"),
            Error::Quadrature { what, estimate, abs_error, intervals } => write!(
                f,
                "quadrature for {what} did not converge: estimate {estimate:e}, error {abs_error:e} over {intervals} intervals"
            ),
            Error::NoSolution { target, low, high } => write!(
                f,
                "no root for target {target}: function spans [{low}, {high}] over the bracket search"
            ),
            Error::Inconsistent { what, value } => write!(f, "{what} left [0, 1]: {value}"),
        }
    }
}

impl core::error::Error for Error {}

pub(crate) fn domain(what: &'static str, value: f64) -> Error {
    Error::Domain { what, value }
}
