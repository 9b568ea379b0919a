use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Error {
    /// An input violates its domain (non-positive gain, negative power, ...).
    InvalidParameter {
        name: &'static str,
        reason: &'static str,
    },
    /// The operation's closed form only holds under a hypothesis that the
    /// inputs do not satisfy.
    UnsupportedRegime { requirement: &'static str },
    /// The near-field approximation needs `Delta^alpha sqrt(rho P_T) >> 1`.
    NearFieldMargin { margin: f64 },
    /// The secrecy keeps growing with the jamming power (`rho = 0`).
    UnboundedOptimum,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter { name, reason } => {
                write!(f, "invalid parameter `{name}`: {reason}")
            }
            Error::UnsupportedRegime { requirement } => {
                write!(f, "outside the supported regime: requires {requirement}")
            }
            Error::NearFieldMargin { margin } => {
                write!(f, "near-field margin Delta^alpha*sqrt(rho*P_T) = {margin} is not >> 1")
            }
            Error::UnboundedOptimum => {
                f.write_str("secrecy increases without bound in the jamming power (rho = 0)")
            }
        }
    }
}

impl core::error::Error for Error {}

pub(crate) fn invalid(name: &'static str, reason: &'static str) -> Error {
    Error::InvalidParameter { name, reason }
}

pub(crate) fn regime(requirement: &'static str) -> Error {
    Error::UnsupportedRegime { requirement }
}
