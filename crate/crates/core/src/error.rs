use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid wavelength grid: {0}")]
    InvalidGrid(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid band split: {0}")]
    InvalidSplit(String),

    #[error("cannot stitch cubes: {0}")]
    Stitch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("explicit matrix of {rows}x{cols} exceeds the {cap} entry cap")]
    MatrixTooLarge { rows: usize, cols: usize, cap: usize },

    #[error("point ({x}, {y}) is outside the {nx}x{ny} canvas")]
    PointOutOfBounds { x: usize, y: usize, nx: usize, ny: usize },

    #[error("spectrum at ({x}, {y}) has zero variance; correlation is undefined")]
    ZeroVariance { x: usize, y: usize },

    #[error("unsupported version: magic {0:?}")]
    UnsupportedVersion(String),

    #[error("malformed file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Image(#[from] image::ImageError),
}

pub type Result<T> = std::result::Result<T, Error>;
