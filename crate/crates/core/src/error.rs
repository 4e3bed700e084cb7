//! Engine error type.

use std::fmt;

pub type SimResult<T> = Result<T, SimError>;

#[derive(Debug, Clone, PartialEq)]
pub enum SimError {
    /// A state or input became NaN/inf during integration.
    NonFinite {
        context: &'static str,
        index: Option<usize>,
    },
    /// Spring endpoints coincide; the force direction is undefined.
    DegenerateSpring { a: usize, b: usize },
    /// Contact query point sits exactly at the sphere centre; the surface
    /// normal is undefined.
    DegenerateContact,
    /// Trace playback was asked for a time outside the recorded range.
    PlaybackOutOfRange { t: f64, t_min: f64, t_max: f64 },
    /// A builder or runtime parameter is out of range.
    InvalidParameter(String),
    /// Scenario text could not be parsed.
    Parse(String),
    /// Scenario parsed but violates a semantic rule.
    Validation(String),
}

impl fmt::Display for SimError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimError::NonFinite { context, index } => match index {
                Some(i) => write!(f, "non-finite value in {context} at index {i}"),
                None => write!(f, "non-finite value in {context}"),
            },
            SimError::DegenerateSpring { a, b } => {
                write!(f, "degenerate spring: particles {a} and {b} coincide")
            }
            SimError::DegenerateContact => {
                write!(f, "degenerate contact: point at body centre, normal undefined")
            }
            SimError::PlaybackOutOfRange { t, t_min, t_max } => {
                write!(f, "playback time {t} outside recorded range [{t_min}, {t_max}]")
            }
            SimError::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            SimError::Parse(msg) => write!(f, "parse error: {msg}"),
            SimError::Validation(msg) => write!(f, "validation error: {msg}"),
        }
    }
}

impl std::error::Error for SimError {}
