use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the image, partitioning, metric and distortion layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("file not found: {0}")]
    FileNotFound(PathBuf),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("unsupported image format: {0}")]
    UnsupportedFormat(String),
    #[error("corrupt image data: {0}")]
    CorruptData(String),
    #[error("invalid image: {0}")]
    InvalidImage(String),
    #[error("region {region:?} out of bounds for {width}x{height} image")]
    RegionOutOfBounds {
        region: (usize, usize, usize, usize),
        width: usize,
        height: usize,
    },
    #[error("image has {pixels} pixels, {needed} are required for the requested cut count")]
    ImageTooSmall { pixels: usize, needed: usize },
    #[error("degenerate image: total SSE is zero (uniform image)")]
    DegenerateImage,
    #[error("tree schema violation: {0}")]
    SchemaViolation(String),
    #[error("window {window_w}x{window_h} at ({x0},{y0}) exceeds {width}x{height} image")]
    WindowOutOfBounds {
        x0: i64,
        y0: i64,
        window_w: usize,
        window_h: usize,
        width: usize,
        height: usize,
    },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
