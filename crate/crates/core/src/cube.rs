//! Spectral cubes and detector measurements.
//!
//! Cube data is band-major, then row-major within a band:
//! `index = (k·ny + y)·nx + x`, with `x` along the dispersion axis.

use std::ops::Range;

use crate::error::{Error, Result};
use crate::grid::{BandSplit, WavelengthGrid};

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralCube {
    nx: usize,
    ny: usize,
    grid: WavelengthGrid,
    data: Vec<f64>,
}

impl SpectralCube {
    pub fn new(nx: usize, ny: usize, grid: WavelengthGrid, data: Vec<f64>) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(Error::DimensionMismatch(format!("empty canvas {nx}x{ny}")));
        }
        let expected = nx * ny * grid.len();
        if data.len() != expected {
            return Err(Error::DimensionMismatch(format!(
                "cube {nx}x{ny}x{} needs {expected} values, got {}",
                grid.len(),
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("cube contains non-finite values".into()));
        }
        Ok(Self { nx, ny, grid, data })
    }

    pub fn zeros(nx: usize, ny: usize, grid: WavelengthGrid) -> Self {
        let data = vec![0.0; nx * ny * grid.len()];
        Self { nx, ny, grid, data }
    }

    /// Builds a cube without the finiteness scan; used by solvers on
    /// buffers they produced themselves.
    pub(crate) fn from_parts(nx: usize, ny: usize, grid: WavelengthGrid, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), nx * ny * grid.len());
        Self { nx, ny, grid, data }
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn n_bands(&self) -> usize {
        self.grid.len()
    }

    pub fn grid(&self) -> &WavelengthGrid {
        &self.grid
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn band_len(&self) -> usize {
        self.nx * self.ny
    }

    #[inline]
    pub fn index(&self, x: usize, y: usize, k: usize) -> usize {
        (k * self.ny + y) * self.nx + x
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize, k: usize) -> f64 {
        self.data[self.index(x, y, k)]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, k: usize, v: f64) {
        let i = self.index(x, y, k);
        self.data[i] = v;
    }

    pub fn band(&self, k: usize) -> &[f64] {
        let n = self.band_len();
        &self.data[k * n..(k + 1) * n]
    }

    pub fn band_mut(&mut self, k: usize) -> &mut [f64] {
        let n = self.band_len();
        &mut self.data[k * n..(k + 1) * n]
    }

    pub fn check_point(&self, x: usize, y: usize) -> Result<()> {
        if x >= self.nx || y >= self.ny {
            return Err(Error::PointOutOfBounds { x, y, nx: self.nx, ny: self.ny });
        }
        Ok(())
    }

    /// Per-channel values at pixel `(x, y)`.
    pub fn spectrum(&self, x: usize, y: usize) -> Result<Vec<f64>> {
        self.check_point(x, y)?;
        Ok((0..self.n_bands()).map(|k| self.get(x, y, k)).collect())
    }

    /// Copy of a contiguous channel range.
    pub fn slice_bands(&self, range: Range<usize>) -> Result<Self> {
        let grid = self.grid.slice(range.clone())?;
        let n = self.band_len();
        let data = self.data[range.start * n..range.end * n].to_vec();
        Ok(Self { nx: self.nx, ny: self.ny, grid, data })
    }

    /// Low and high sub-band cubes for a split of this cube's grid.
    pub fn split(&self, split: &BandSplit) -> Result<(Self, Self)> {
        if split.high.end != self.n_bands() || split.low.start != 0 || split.low.end != split.high.start {
            return Err(Error::InvalidSplit(format!(
                "split {:?}/{:?} does not partition {} channels",
                split.low,
                split.high,
                self.n_bands()
            )));
        }
        Ok((self.slice_bands(split.low.clone())?, self.slice_bands(split.high.clone())?))
    }

    /// Replaces negative values with zero. Applied to reconstructions at export.
    pub fn clamp_nonnegative(&mut self) {
        for v in &mut self.data {
            if *v < 0.0 {
                *v = 0.0;
            }
        }
    }

    pub fn max_value(&self) -> f64 {
        self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.nx == other.nx && self.ny == other.ny && self.grid == other.grid
    }
}

/// Joins a low sub-band cube and a high sub-band cube along the spectral axis.
pub fn stitch_cubes(low: &SpectralCube, high: &SpectralCube) -> Result<SpectralCube> {
    if low.nx != high.nx || low.ny != high.ny {
        return Err(Error::Stitch(format!(
            "spatial size {}x{} vs {}x{}",
            low.nx, low.ny, high.nx, high.ny
        )));
    }
    if low.grid.last() >= high.grid.first() {
        return Err(Error::Stitch(format!(
            "low band ends at {} nm, high band starts at {} nm",
            low.grid.last(),
            high.grid.first()
        )));
    }
    let mut wavelengths = low.grid.as_slice().to_vec();
    wavelengths.extend_from_slice(high.grid.as_slice());
    let grid = WavelengthGrid::new(wavelengths)?;
    let mut data = Vec::with_capacity(low.data.len() + high.data.len());
    data.extend_from_slice(&low.data);
    data.extend_from_slice(&high.data);
    Ok(SpectralCube { nx: low.nx, ny: low.ny, grid, data })
}

/// Detector image `I(x, y)`, row-major, plus the standard deviation of any
/// noise that was added to it.
#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    nx: usize,
    ny: usize,
    data: Vec<f64>,
    pub noise_sigma: f64,
}

impl Measurement {
    pub fn new(nx: usize, ny: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != nx * ny || nx == 0 || ny == 0 {
            return Err(Error::DimensionMismatch(format!(
                "measurement {nx}x{ny} needs {} values, got {}",
                nx * ny,
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("measurement contains non-finite values".into()));
        }
        Ok(Self { nx, ny, data, noise_sigma: 0.0 })
    }

    pub(crate) fn from_parts(nx: usize, ny: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), nx * ny);
        Self { nx, ny, data, noise_sigma: 0.0 }
    }

    pub fn zeros(nx: usize, ny: usize) -> Self {
        Self::from_parts(nx, ny, vec![0.0; nx * ny])
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.nx + x]
    }

    pub fn max_value(&self) -> f64 {
        self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}
