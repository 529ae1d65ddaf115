use thiserror::Error;

/// Errors shared across the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Both endpoints coincide, so no segment can be formed. Every
    /// downstream formula divides by segment length, so zero-length
    /// segments are rejected at construction.
    #[error("degenerate segment: both endpoints are ({x}, {y})")]
    DegenerateSegment { x: f64, y: f64 },

    /// Two grids that must share dimensions do not.
    #[error("dimension mismatch: expected {expected_width}x{expected_height}, found {found_width}x{found_height}")]
    DimensionMismatch {
        expected_width: usize,
        expected_height: usize,
        found_width: usize,
        found_height: usize,
    },

    /// A detection references an image id absent from the ground truth set.
    #[error("unknown image id: {0}")]
    UnknownImage(String),

    /// A coordinate, score, or map value that must be finite is NaN or infinite.
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    /// A value falls outside its documented range.
    #[error("{0}")]
    InvalidValue(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn dims(expected: (usize, usize), found: (usize, usize)) -> Self {
        Error::DimensionMismatch {
            expected_width: expected.0,
            expected_height: expected.1,
            found_width: found.0,
            found_height: found.1,
        }
    }
}
