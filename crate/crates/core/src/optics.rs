//! Dual-dispersion coded-aperture forward model.
//!
//! Light passes the prism, is coded by the reflective mask, then passes the
//! prism again. The two traversals cancel the spatial shear, so channel `k`
//! of the scene is modulated by the mask shifted by `α_k` pixels along `x`
//! and all channels are summed onto the detector:
//!
//! `I(x, y) = Σ_k f(x, y, k) · T(x − α_k, y)`
//!
//! [`SystemOperator`] applies this map and its transpose without
//! materializing the matrix. [`build_explicit_matrix`] does materialize it,
//! for checking the matrix-free paths on small problems.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cube::{Measurement, SpectralCube};
use crate::error::{Error, Result};
use crate::grid::WavelengthGrid;

/// Integer-pixel dispersion: channel `k` is displaced by
/// `(k − reference_channel) · shift_per_channel` pixels along `x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DispersionModel {
    pub shift_per_channel: i64,
    pub reference_channel: usize,
}

impl Default for DispersionModel {
    fn default() -> Self {
        Self { shift_per_channel: 1, reference_channel: 0 }
    }
}

impl DispersionModel {
    #[inline]
    pub fn shift(&self, k: usize) -> i64 {
        (k as i64 - self.reference_channel as i64) * self.shift_per_channel
    }

    /// Width and origin of the mask needed so that every shifted window over
    /// `nx` detector columns lands inside it.
    pub fn mask_extent(&self, nx: usize, n_channels: usize) -> (usize, i64) {
        let shifts = (0..n_channels).map(|k| self.shift(k));
        let max_shift = shifts.clone().max().unwrap_or(0);
        let min_shift = shifts.min().unwrap_or(0);
        let width = nx + (max_shift - min_shift) as usize;
        (width, -max_shift)
    }
}

/// Binary mask `T` over an extended column range.
///
/// Column `i` of `values` sits at mask coordinate `origin_offset + i`; detector
/// column `x` for channel `k` reads mask coordinate `x − α_k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodedAperture {
    width: usize,
    height: usize,
    origin_offset: i64,
    values: Vec<u8>,
}

impl CodedAperture {
    pub fn new(width: usize, height: usize, origin_offset: i64, values: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 || values.len() != width * height {
            return Err(Error::DimensionMismatch(format!(
                "mask {width}x{height} needs {} values, got {}",
                width * height,
                values.len()
            )));
        }
        if let Some(bad) = values.iter().find(|v| **v > 1) {
            return Err(Error::InvalidParameter(format!("mask value {bad} is not binary")));
        }
        Ok(Self { width, height, origin_offset, values })
    }

    /// Constant mask sized for `nx × ny` scenes with `n_channels` channels.
    pub fn filled(nx: usize, ny: usize, n_channels: usize, dispersion: &DispersionModel, value: u8) -> Result<Self> {
        let (width, origin) = dispersion.mask_extent(nx, n_channels);
        Self::new(width, ny, origin, vec![value; width * ny])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn origin_offset(&self) -> i64 {
        self.origin_offset
    }

    pub fn values(&self) -> &[u8] {
        &self.values
    }

    /// Mask value at extended coordinate `xe`.
    #[inline]
    pub fn at(&self, xe: i64, y: usize) -> u8 {
        let col = (xe - self.origin_offset) as usize;
        self.values[y * self.width + col]
    }

    pub fn ones_fraction(&self) -> f64 {
        self.values.iter().map(|v| *v as usize).sum::<usize>() as f64 / self.values.len() as f64
    }
}

/// The measurement matrix `H`, applied matrix-free.
#[derive(Debug, Clone)]
pub struct SystemOperator {
    nx: usize,
    ny: usize,
    grid: WavelengthGrid,
    mask: CodedAperture,
    dispersion: DispersionModel,
}

impl SystemOperator {
    pub fn new(
        nx: usize,
        ny: usize,
        grid: WavelengthGrid,
        mask: CodedAperture,
        dispersion: DispersionModel,
    ) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(Error::DimensionMismatch(format!("empty detector {nx}x{ny}")));
        }
        let (width, origin) = dispersion.mask_extent(nx, grid.len());
        if mask.width != width || mask.height != ny || mask.origin_offset != origin {
            return Err(Error::DimensionMismatch(format!(
                "mask {}x{} (origin {}) does not fit a {nx}x{ny}x{} operator, which needs {width}x{ny} (origin {origin})",
                mask.width,
                mask.height,
                mask.origin_offset,
                grid.len()
            )));
        }
        Ok(Self { nx, ny, grid, mask, dispersion })
    }

    /// Operator with the default one-pixel-per-channel dispersion.
    pub fn with_default_dispersion(nx: usize, ny: usize, grid: WavelengthGrid, mask: CodedAperture) -> Result<Self> {
        Self::new(nx, ny, grid, mask, DispersionModel::default())
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

    pub fn mask(&self) -> &CodedAperture {
        &self.mask
    }

    pub fn dispersion(&self) -> &DispersionModel {
        &self.dispersion
    }

    pub fn detector_len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn cube_len(&self) -> usize {
        self.nx * self.ny * self.grid.len()
    }

    /// `T(x − α_k, y)` for detector pixel `(x, y)` and channel `k`.
    #[inline]
    pub fn code(&self, x: usize, y: usize, k: usize) -> u8 {
        self.mask.at(x as i64 - self.dispersion.shift(k), y)
    }

    /// Mask row `y` as seen by channel `k`, one entry per detector column.
    #[inline]
    fn shifted_row(&self, y: usize, k: usize) -> &[u8] {
        let start = (-self.dispersion.shift(k) - self.mask.origin_offset) as usize;
        let row = &self.mask.values[y * self.mask.width..(y + 1) * self.mask.width];
        &row[start..start + self.nx]
    }

    pub fn check_cube(&self, cube: &SpectralCube) -> Result<()> {
        if cube.nx() != self.nx || cube.ny() != self.ny || cube.n_bands() != self.n_bands() {
            return Err(Error::DimensionMismatch(format!(
                "cube {}x{}x{} vs operator {}x{}x{}",
                cube.nx(),
                cube.ny(),
                cube.n_bands(),
                self.nx,
                self.ny,
                self.n_bands()
            )));
        }
        Ok(())
    }

    pub fn check_measurement(&self, meas: &Measurement) -> Result<()> {
        if meas.nx() != self.nx || meas.ny() != self.ny {
            return Err(Error::DimensionMismatch(format!(
                "measurement {}x{} vs operator {}x{}",
                meas.nx(),
                meas.ny(),
                self.nx,
                self.ny
            )));
        }
        Ok(())
    }

    /// `out = H f` on raw buffers in the cube layout. Each detector pixel
    /// accumulates channels in ascending order.
    pub fn forward_into(&self, f: &[f64], out: &mut [f64]) {
        let (nx, ny) = (self.nx, self.ny);
        debug_assert_eq!(f.len(), self.cube_len());
        debug_assert_eq!(out.len(), nx * ny);
        out.par_chunks_mut(nx).enumerate().for_each(|(y, row)| {
            row.fill(0.0);
            for k in 0..self.n_bands() {
                let code = self.shifted_row(y, k);
                let src = &f[(k * ny + y) * nx..(k * ny + y + 1) * nx];
                for ((acc, &v), &t) in row.iter_mut().zip(src).zip(code) {
                    if t != 0 {
                        *acc += v;
                    }
                }
            }
        });
    }

    /// `out = Hᵀ g` on raw buffers.
    pub fn adjoint_into(&self, g: &[f64], out: &mut [f64]) {
        let (nx, ny) = (self.nx, self.ny);
        debug_assert_eq!(g.len(), nx * ny);
        debug_assert_eq!(out.len(), self.cube_len());
        out.par_chunks_mut(nx).enumerate().for_each(|(row_idx, dst)| {
            let (k, y) = (row_idx / ny, row_idx % ny);
            let code = self.shifted_row(y, k);
            let src = &g[y * nx..(y + 1) * nx];
            for ((d, &v), &t) in dst.iter_mut().zip(src).zip(code) {
                *d = if t != 0 { v } else { 0.0 };
            }
        });
    }

    /// Noiseless detector image of `cube`.
    pub fn forward(&self, cube: &SpectralCube) -> Result<Measurement> {
        self.check_cube(cube)?;
        let mut out = vec![0.0; self.detector_len()];
        self.forward_into(cube.data(), &mut out);
        Ok(Measurement::from_parts(self.nx, self.ny, out))
    }

    /// Back-projection `Hᵀ I`.
    pub fn adjoint(&self, meas: &Measurement) -> Result<SpectralCube> {
        self.check_measurement(meas)?;
        let mut out = vec![0.0; self.cube_len()];
        self.adjoint_into(meas.data(), &mut out);
        Ok(SpectralCube::from_parts(self.nx, self.ny, self.grid.clone(), out))
    }

    /// Diagonal of `H Hᵀ`: the number of channels whose shifted mask is open
    /// at each detector pixel.
    pub fn diag_hht(&self) -> Vec<f64> {
        let mut w = vec![0.0; self.detector_len()];
        for y in 0..self.ny {
            for k in 0..self.n_bands() {
                let code = self.shifted_row(y, k);
                for (acc, &t) in w[y * self.nx..(y + 1) * self.nx].iter_mut().zip(code) {
                    *acc += t as f64;
                }
            }
        }
        w
    }
}

/// Default guard on `rows · cols` for [`build_explicit_matrix`].
pub const DEFAULT_MATRIX_CAP: usize = 10_000;

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl DenseMatrix {
    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.cols);
        self.data
            .chunks(self.cols)
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn transpose_mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.rows);
        let mut out = vec![0.0; self.cols];
        for (row, &s) in self.data.chunks(self.cols).zip(v) {
            for (o, a) in out.iter_mut().zip(row) {
                *o += a * s;
            }
        }
        out
    }
}

/// Materializes `H` entry by entry from the mask and dispersion model.
/// Rows index detector pixels `y·nx + x`; columns follow the cube layout.
pub fn build_explicit_matrix(op: &SystemOperator, cap: usize) -> Result<DenseMatrix> {
    let rows = op.detector_len();
    let cols = op.cube_len();
    if rows.saturating_mul(cols) > cap {
        return Err(Error::MatrixTooLarge { rows, cols, cap });
    }
    let mut data = vec![0.0; rows * cols];
    for k in 0..op.n_bands() {
        for y in 0..op.ny {
            for x in 0..op.nx {
                let r = y * op.nx + x;
                let c = (k * op.ny + y) * op.nx + x;
                data[r * cols + c] = op.code(x, y, k) as f64;
            }
        }
    }
    Ok(DenseMatrix { rows, cols, data })
}

/// Adds i.i.d. Gaussian noise with standard deviation `sigma · max(I)`.
/// `sigma` is a fraction of the peak signal; the absolute standard deviation
/// is stored in `noise_sigma`.
pub fn add_noise(meas: &Measurement, sigma: f64, seed: u64) -> Result<Measurement> {
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return Err(Error::InvalidParameter(format!("noise sigma {sigma} must be finite and >= 0")));
    }
    let std = sigma * meas.max_value().max(0.0);
    if std == 0.0 {
        return Ok(meas.clone());
    }
    let normal = Normal::new(0.0, std).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = meas.data().iter().map(|v| v + normal.sample(&mut rng)).collect();
    let mut out = Measurement::from_parts(meas.nx(), meas.ny(), data);
    out.noise_sigma = std;
    Ok(out)
}
