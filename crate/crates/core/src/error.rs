use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("image dimensions must be at least 1x1, got {width}x{height}")]
    ZeroDimension { width: usize, height: usize },

    #[error("pixel buffer holds {actual} values but {width}x{height} needs {expected}")]
    PixelCount {
        width: usize,
        height: usize,
        expected: usize,
        actual: usize,
    },

    #[error("not a PGM stream (magic {0:?})")]
    BadMagic(String),

    #[error("malformed PGM header: {0}")]
    MalformedHeader(String),

    #[error("16-bit PGM unsupported (maxval {0})")]
    SixteenBit(u32),

    #[error("truncated PGM pixel data: expected {expected} samples, found {found}")]
    Truncated { expected: usize, found: usize },

    #[error("PGM sample {value} exceeds maxval {maxval}")]
    SampleOutOfRange { value: u32, maxval: u32 },

    #[error("dimension mismatch: {left_w}x{left_h} vs {right_w}x{right_h}")]
    DimensionMismatch {
        left_w: usize,
        left_h: usize,
        right_w: usize,
        right_h: usize,
    },

    #[error("{0}")]
    InvalidParameter(String),

    #[error("no images to benchmark")]
    EmptyImageSet,
}

pub type Result<T> = std::result::Result<T, Error>;
