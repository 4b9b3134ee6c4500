use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Detector, channel or settings counts disagree.
    Arity { expected: usize, found: usize, what: &'static str },
    /// A network term references a channel the source does not emit.
    UnknownChannel { channel: usize, channels: usize },
    /// Invalid configuration value (even node count, empty grid, ...).
    Config(&'static str),
    /// A value outside the domain of an operation (negative rate, |s| >= 1, ...).
    Domain(&'static str),
    /// Zero-norm field where a normalized quantity was requested.
    DegenerateInput,
    /// Normalizing by a zero maximum or zero denominator.
    DegenerateNormalization,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Arity { expected, found, what } => {
                write!(f, "arity mismatch for {what}: expected {expected}, found {found}")
            }
            Error::UnknownChannel { channel, channels } => {
                write!(f, "network references channel {channel} but the source has {channels}")
            }
            Error::Config(msg) => write!(f, "configuration error: {msg}"),
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::DegenerateInput => write!(f, "degenerate input: zero-norm field"),
            Error::DegenerateNormalization => {
                write!(f, "degenerate normalization: all rates are zero")
            }
        }
    }
}

impl core::error::Error for Error {}
