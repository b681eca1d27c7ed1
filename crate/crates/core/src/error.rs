use nalgebra::{Point3, Vector3};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RadfluxError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A user-supplied function returned a non-finite value.
    #[error("non-finite value {value} while evaluating {what} at {location}")]
    Evaluation {
        what: &'static str,
        location: Location,
        value: f64,
    },

    #[error("measures live on different quadrature grids")]
    GridMismatch,

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Where an evaluation failed: a sphere direction or a spatial point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Location {
    Direction(Vector3<f64>),
    Point(Point3<f64>),
}

impl std::fmt::Display for Location {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Location::Direction(u) => write!(f, "direction ({}, {}, {})", u.x, u.y, u.z),
            Location::Point(p) => write!(f, "point ({}, {}, {})", p.x, p.y, p.z),
        }
    }
}

pub type Result<T> = std::result::Result<T, RadfluxError>;

pub(crate) fn check_finite(what: &'static str, location: Location, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(RadfluxError::Evaluation {
            what,
            location,
            value,
        })
    }
}
