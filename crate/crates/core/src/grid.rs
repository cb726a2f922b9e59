//! Wavelength grids and the two-sub-band split.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default split between the short-wave and long-wave sub-bands, in nm.
pub const DEFAULT_BOUNDARY_NM: f64 = 1050.0;

/// Strictly increasing list of channel center wavelengths in nm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct WavelengthGrid {
    wavelengths: Vec<f64>,
}

impl WavelengthGrid {
    pub fn new(wavelengths: Vec<f64>) -> Result<Self> {
        if wavelengths.is_empty() {
            return Err(Error::InvalidGrid("grid needs at least one channel".into()));
        }
        if let Some(bad) = wavelengths.iter().find(|w| !w.is_finite() || **w <= 0.0) {
            return Err(Error::InvalidGrid(format!(
                "wavelength {bad} is not finite and positive"
            )));
        }
        if let Some(i) = wavelengths.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::InvalidGrid(format!(
                "wavelengths not strictly increasing at index {}: {} then {}",
                i + 1,
                wavelengths[i],
                wavelengths[i + 1]
            )));
        }
        Ok(Self { wavelengths })
    }

    pub fn len(&self) -> usize {
        self.wavelengths.len()
    }

    /// Always false; grids hold at least one channel.
    pub fn is_empty(&self) -> bool {
        self.wavelengths.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.wavelengths
    }

    pub fn first(&self) -> f64 {
        self.wavelengths[0]
    }

    pub fn last(&self) -> f64 {
        self.wavelengths[self.wavelengths.len() - 1]
    }

    /// Mean channel spacing, or 0 for a single channel.
    pub fn spacing(&self) -> f64 {
        match self.len() {
            1 => 0.0,
            n => (self.last() - self.first()) / (n - 1) as f64,
        }
    }

    /// Index of the channel whose center is closest to `nm` (lower index on ties).
    pub fn nearest_channel(&self, nm: f64) -> usize {
        let mut best = 0;
        for (k, w) in self.wavelengths.iter().enumerate() {
            if (w - nm).abs() < (self.wavelengths[best] - nm).abs() {
                best = k;
            }
        }
        best
    }

    pub fn contains(&self, nm: f64) -> bool {
        nm >= self.first() && nm <= self.last()
    }

    /// Sub-grid over a contiguous, non-empty channel range.
    pub fn slice(&self, range: Range<usize>) -> Result<Self> {
        if range.start >= range.end || range.end > self.len() {
            return Err(Error::InvalidGrid(format!(
                "channel range {range:?} invalid for {} channels",
                self.len()
            )));
        }
        Ok(Self { wavelengths: self.wavelengths[range].to_vec() })
    }
}

impl TryFrom<Vec<f64>> for WavelengthGrid {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<WavelengthGrid> for Vec<f64> {
    fn from(g: WavelengthGrid) -> Self {
        g.wavelengths
    }
}

/// `n_channels` equally spaced band centers from `lambda_min` to `lambda_max`
/// inclusive.
///
/// Each center is computed as `(min·(n−1−k) + max·k)/(n−1)` with the endpoints
/// pinned, so mirroring the bounds mirrors the grid bit for bit.
pub fn make_wavelength_grid(lambda_min: f64, lambda_max: f64, n_channels: usize) -> Result<WavelengthGrid> {
    if !lambda_min.is_finite() || !lambda_max.is_finite() {
        return Err(Error::InvalidGrid("grid bounds must be finite".into()));
    }
    if n_channels == 0 {
        return Err(Error::InvalidGrid("n_channels must be at least 1".into()));
    }
    if lambda_max < lambda_min {
        return Err(Error::InvalidGrid(format!(
            "lambda_max {lambda_max} < lambda_min {lambda_min}"
        )));
    }
    if n_channels == 1 {
        if lambda_max != lambda_min {
            return Err(Error::InvalidGrid(
                "a single-channel grid needs lambda_min == lambda_max".into(),
            ));
        }
        return WavelengthGrid::new(vec![lambda_min]);
    }
    WavelengthGrid::new(band_centers(lambda_min, lambda_max, n_channels))
}

fn band_centers(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let last = n - 1;
    let denom = last as f64;
    (0..n)
        .map(|k| match k {
            0 => lo,
            k if k == last => hi,
            k => (lo * (last - k) as f64 + hi * k as f64) / denom,
        })
        .collect()
}

/// Partition of a grid's channels into a low and a high sub-band.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandSplit {
    pub boundary_nm: f64,
    pub low: Range<usize>,
    pub high: Range<usize>,
}

/// Channels strictly below `boundary_nm` go low; a channel sitting exactly on
/// the boundary goes high.
pub fn split_bands(grid: &WavelengthGrid, boundary_nm: f64) -> Result<BandSplit> {
    if !boundary_nm.is_finite() || boundary_nm < grid.first() || boundary_nm > grid.last() {
        return Err(Error::InvalidSplit(format!(
            "boundary {boundary_nm} nm outside grid range [{}, {}]",
            grid.first(),
            grid.last()
        )));
    }
    let n_low = grid.as_slice().iter().take_while(|w| **w < boundary_nm).count();
    if n_low == 0 {
        return Err(Error::InvalidSplit(format!(
            "boundary {boundary_nm} nm leaves the low band empty"
        )));
    }
    Ok(BandSplit { boundary_nm, low: 0..n_low, high: n_low..grid.len() })
}
