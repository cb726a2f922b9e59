//! Synthetic scenes and coded apertures.
//!
//! Letter targets put one narrow-band source behind each glyph of a bitmap
//! font. Material scenes place two disks with different reflectance spectra
//! side by side. Built-in spectra are synthetic stand-ins for a real and a
//! fake apple, not measured data.

mod font;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cube::SpectralCube;
use crate::error::{Error, Result};
use crate::grid::WavelengthGrid;
use crate::optics::{CodedAperture, DispersionModel};

pub use font::{glyph_rows, GLYPH_HEIGHT, GLYPH_WIDTH};

/// Default line width for LED sources.
pub const LED_FWHM_NM: f64 = 40.0;

/// FWHM → standard deviation for a Gaussian.
const FWHM_TO_SIGMA: f64 = 0.424_660_900_144_009_5; // 1 / (2·√(2 ln 2))

/// Laser lines default to one channel spacing.
pub fn laser_fwhm_nm(grid: &WavelengthGrid) -> f64 {
    grid.spacing()
}

/// Binary i.i.d. Bernoulli(`density`) aperture sized for the default
/// one-pixel-per-channel dispersion.
pub fn random_mask(nx: usize, ny: usize, n_channels: usize, density: f64, seed: u64) -> Result<CodedAperture> {
    random_mask_with(nx, ny, n_channels, &DispersionModel::default(), density, seed)
}

pub fn random_mask_with(
    nx: usize,
    ny: usize,
    n_channels: usize,
    dispersion: &DispersionModel,
    density: f64,
    seed: u64,
) -> Result<CodedAperture> {
    if !(0.0..=1.0).contains(&density) {
        return Err(Error::InvalidParameter(format!("mask density {density} outside [0, 1]")));
    }
    if nx == 0 || ny == 0 || n_channels == 0 {
        return Err(Error::InvalidParameter(format!(
            "mask for {nx}x{ny}x{n_channels} has no pixels"
        )));
    }
    let (width, origin) = dispersion.mask_extent(nx, n_channels);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..width * ny).map(|_| (rng.gen::<f64>() < density) as u8).collect();
    CodedAperture::new(width, ny, origin, values)
}

/// A glyph lit by a source with a Gaussian line shape.
#[derive(Debug, Clone, PartialEq)]
pub struct Glyph {
    pub ch: char,
    pub center_nm: f64,
    pub fwhm_nm: f64,
}

impl Glyph {
    pub fn new(ch: char, center_nm: f64, fwhm_nm: f64) -> Self {
        Self { ch, center_nm, fwhm_nm }
    }

    /// Line shape sampled on `grid`, peak-normalized. A zero FWHM puts all
    /// the energy in the nearest channel.
    pub fn spectrum(&self, grid: &WavelengthGrid) -> Vec<f64> {
        if self.fwhm_nm <= 0.0 {
            let k = grid.nearest_channel(self.center_nm);
            return (0..grid.len()).map(|i| if i == k { 1.0 } else { 0.0 }).collect();
        }
        let sigma = self.fwhm_nm * FWHM_TO_SIGMA;
        grid.as_slice()
            .iter()
            .map(|w| (-0.5 * ((w - self.center_nm) / sigma).powi(2)).exp())
            .collect()
    }
}

/// Placement of glyph `i` of `count` on the canvas: top-left corner and scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GlyphBox {
    pub x0: usize,
    pub y0: usize,
    pub scale: usize,
}

/// Lays glyphs out left to right in equal cells, each scaled by the largest
/// integer that leaves at least a one-pixel margin.
pub fn layout_glyphs(count: usize, nx: usize, ny: usize) -> Result<Vec<GlyphBox>> {
    if count == 0 {
        return Ok(Vec::new());
    }
    let cell = nx / count;
    let scale = (cell.saturating_sub(2) / GLYPH_WIDTH).min(ny.saturating_sub(2) / GLYPH_HEIGHT);
    if scale == 0 {
        return Err(Error::InvalidParameter(format!(
            "{count} glyphs do not fit a {nx}x{ny} canvas"
        )));
    }
    let (w, h) = (GLYPH_WIDTH * scale, GLYPH_HEIGHT * scale);
    Ok((0..count)
        .map(|i| GlyphBox { x0: i * cell + (cell - w) / 2, y0: (ny - h) / 2, scale })
        .collect())
}

/// Binary spatial stencil of each glyph, as `(x, y)` pixel lists.
pub fn glyph_pixels(glyphs: &[Glyph], nx: usize, ny: usize) -> Result<Vec<Vec<(usize, usize)>>> {
    let boxes = layout_glyphs(glyphs.len(), nx, ny)?;
    glyphs
        .iter()
        .zip(boxes)
        .map(|(g, b)| {
            let rows = glyph_rows(g.ch)
                .ok_or_else(|| Error::InvalidParameter(format!("no bitmap for character {:?}", g.ch)))?;
            let mut px = Vec::new();
            for y in 0..GLYPH_HEIGHT * b.scale {
                for x in 0..GLYPH_WIDTH * b.scale {
                    if font::pixel(&rows, x / b.scale, y / b.scale) {
                        px.push((b.x0 + x, b.y0 + y));
                    }
                }
            }
            Ok(px)
        })
        .collect()
}

/// Letter-patterned target: each glyph carries its source's line spectrum,
/// the background is dark.
pub fn letter_target(glyphs: &[Glyph], nx: usize, ny: usize, grid: &WavelengthGrid) -> Result<SpectralCube> {
    for g in glyphs {
        if !g.center_nm.is_finite() || !grid.contains(g.center_nm) {
            return Err(Error::InvalidParameter(format!(
                "glyph {:?} at {} nm lies outside the grid [{}, {}]",
                g.ch,
                g.center_nm,
                grid.first(),
                grid.last()
            )));
        }
        if !(g.fwhm_nm >= 0.0) {
            return Err(Error::InvalidParameter(format!("glyph {:?} has negative bandwidth", g.ch)));
        }
    }
    let mut cube = SpectralCube::zeros(nx, ny, grid.clone());
    let stencils = glyph_pixels(glyphs, nx, ny)?;
    for (g, pixels) in glyphs.iter().zip(&stencils) {
        let spectrum = g.spectrum(grid);
        for &(x, y) in pixels {
            for (k, v) in spectrum.iter().enumerate() {
                cube.set(x, y, k, *v);
            }
        }
    }
    Ok(cube)
}

/// Relative reflectance on a wavelength grid, values in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MaterialSpectrum {
    name: String,
    grid: WavelengthGrid,
    values: Vec<f64>,
}

impl MaterialSpectrum {
    pub fn new(name: impl Into<String>, grid: WavelengthGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} values for a {}-channel grid",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite() || !(0.0..=1.0).contains(v)) {
            return Err(Error::InvalidParameter("material spectrum values must lie in [0, 1]".into()));
        }
        Ok(Self { name: name.into(), grid, values })
    }

    fn from_fn(name: &str, grid: &WavelengthGrid, f: impl Fn(f64) -> f64) -> Self {
        let values = grid.as_slice().iter().map(|w| f(*w).clamp(0.0, 1.0)).collect();
        Self { name: name.to_string(), grid: grid.clone(), values }
    }

    /// Smooth plateau after the red edge, a multiplicative dip centered at
    /// 940 nm covering roughly 900–980 nm, and suppressed reflectance above
    /// 1350 nm.
    pub fn real_apple_like(grid: &WavelengthGrid) -> Self {
        Self::from_fn("real-apple-like", grid, |w| {
            let base = 0.45 + 0.4 * logistic((w - 730.0) / 20.0);
            let dip = 1.0 - 0.35 * (-0.5 * ((w - 940.0) / 30.0).powi(2)).exp();
            let tail = 1.0 - 0.55 * logistic((w - 1350.0) / 30.0);
            base * dip * tail
        })
    }

    /// Smooth, slowly declining curve with no absorption features.
    pub fn fake_apple_like(grid: &WavelengthGrid) -> Self {
        Self::from_fn("fake-apple-like", grid, |w| {
            0.55 + 0.25 * logistic((w - 740.0) / 25.0) - 0.10 * (w - 700.0) / 900.0
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn grid(&self) -> &WavelengthGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

fn logistic(t: f64) -> f64 {
    1.0 / (1.0 + (-t).exp())
}

/// Disk centers and radius for a material scene, in pixel coordinates.
/// The right disk is the mirror image of the left one about the vertical
/// center line.
pub fn material_disks(nx: usize, ny: usize) -> [(f64, f64, f64); 2] {
    let cy = (ny as f64 - 1.0) / 2.0;
    let left = (nx as f64 - 1.0) / 4.0;
    let right = nx as f64 - 1.0 - left;
    let radius = 0.8 * (nx as f64 / 4.0).min(ny as f64 / 2.0);
    [(left, cy, radius), (right, cy, radius)]
}

/// One probe pixel at the center of each disk, mirror images of each other.
pub fn material_probe_points(nx: usize, ny: usize) -> [(usize, usize); 2] {
    let [(cx, cy, _), _] = material_disks(nx, ny);
    let x = cx.round() as usize;
    let y = cy.round() as usize;
    [(x, y), (nx - 1 - x, y)]
}

/// Two disks on a dark background: `spec_a` on the left, `spec_b` on the right.
pub fn material_scene(
    nx: usize,
    ny: usize,
    grid: &WavelengthGrid,
    spec_a: &MaterialSpectrum,
    spec_b: &MaterialSpectrum,
) -> Result<SpectralCube> {
    for s in [spec_a, spec_b] {
        if s.grid != *grid {
            return Err(Error::DimensionMismatch(format!("spectrum {:?} is on a different grid", s.name)));
        }
    }
    if nx < 4 || ny < 2 {
        return Err(Error::InvalidParameter(format!("canvas {nx}x{ny} too small for two objects")));
    }
    let mut cube = SpectralCube::zeros(nx, ny, grid.clone());
    for ((cx, cy, r), spec) in material_disks(nx, ny).into_iter().zip([spec_a, spec_b]) {
        for y in 0..ny {
            for x in 0..nx {
                let (dx, dy) = (x as f64 - cx, y as f64 - cy);
                if dx * dx + dy * dy <= r * r {
                    for (k, v) in spec.values.iter().enumerate() {
                        cube.set(x, y, k, *v);
                    }
                }
            }
        }
    }
    Ok(cube)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_wavelength_grid, split_bands};

    fn sub_band_a() -> WavelengthGrid {
        let full = make_wavelength_grid(700.0, 1600.0, 52).unwrap();
        let split = split_bands(&full, 1050.0).unwrap();
        full.slice(split.low).unwrap()
    }

    #[test]
    fn full_density_mask_is_open() {
        let m = random_mask(10, 4, 3, 1.0, 5).unwrap();
        assert_eq!(m.width(), 12);
        assert!(m.values().iter().all(|v| *v == 1));
        assert!(random_mask(10, 4, 3, 0.0, 5).unwrap().values().iter().all(|v| *v == 0));
    }

    #[test]
    fn half_density_fraction() {
        // 249 + 7 extended columns by 256 rows
        let m = random_mask(249, 256, 8, 0.5, 42).unwrap();
        assert_eq!(m.width(), 256);
        assert!((m.ones_fraction() - 0.5).abs() <= 0.01);
    }

    #[test]
    fn mask_is_seeded() {
        assert_eq!(random_mask(16, 16, 4, 0.5, 3).unwrap(), random_mask(16, 16, 4, 0.5, 3).unwrap());
        assert_ne!(random_mask(16, 16, 4, 0.5, 3).unwrap(), random_mask(16, 16, 4, 0.5, 4).unwrap());
        assert!(random_mask(16, 16, 4, 1.2, 3).is_err());
        assert!(random_mask(16, 16, 4, -0.1, 3).is_err());
    }

    #[test]
    fn every_supported_glyph_has_ink() {
        for c in ('A'..='Z').chain('a'..='z').chain('0'..='9') {
            let rows = glyph_rows(c).unwrap();
            assert!(rows.iter().any(|r| *r != 0), "{c}");
            assert!(rows.iter().all(|r| *r < 32), "{c}");
        }
        assert!(glyph_rows('%').is_none());
    }

    #[test]
    fn zero_bandwidth_concentrates_in_one_channel() {
        let grid = make_wavelength_grid(700.0, 1050.0, 8).unwrap();
        let center = grid.as_slice()[3];
        let cube = letter_target(&[Glyph::new('I', center, 0.0)], 32, 16, &grid).unwrap();
        let px = glyph_pixels(&[Glyph::new('I', center, 0.0)], 32, 16).unwrap();
        let (x, y) = px[0][0];
        let s = cube.spectrum(x, y).unwrap();
        assert_eq!(s, vec![0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
        // a narrow Gaussian centered on a channel approaches the same limit
        let narrow = Glyph::new('I', center, 1e-3).spectrum(&grid);
        assert_eq!(narrow, s);
    }

    #[test]
    fn letter_argmax_is_nearest_channel() {
        let grid = sub_band_a();
        let glyphs = [Glyph::new('U', 850.0, LED_FWHM_NM), Glyph::new('P', 950.0, LED_FWHM_NM)];
        let cube = letter_target(&glyphs, 64, 32, &grid).unwrap();
        let stencils = glyph_pixels(&glyphs, 64, 32).unwrap();
        for (g, px) in glyphs.iter().zip(&stencils) {
            assert!(!px.is_empty());
            // 850 nm sits exactly between two channels of this grid, so
            // compare distances rather than indices
            let best = (grid.as_slice()[grid.nearest_channel(g.center_nm)] - g.center_nm).abs();
            for &(x, y) in px {
                let s = cube.spectrum(x, y).unwrap();
                let arg = (0..s.len()).max_by(|a, b| s[*a].total_cmp(&s[*b])).unwrap();
                assert!(((grid.as_slice()[arg] - g.center_nm).abs() - best).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn glyph_spectra_sum_to_analytic_gaussian() {
        let grid = make_wavelength_grid(700.0, 1050.0, 20).unwrap();
        let glyphs = [Glyph::new('a', 880.0, 40.0), Glyph::new('b', 1000.0, 12.0)];
        let cube = letter_target(&glyphs, 40, 20, &grid).unwrap();
        let stencils = glyph_pixels(&glyphs, 40, 20).unwrap();
        for (g, px) in glyphs.iter().zip(&stencils) {
            let sigma = g.fwhm_nm / (2.0 * (2.0 * 2f64.ln()).sqrt());
            let analytic: f64 = grid.as_slice().iter().map(|w| (-(w - g.center_nm).powi(2) / (2.0 * sigma * sigma)).exp()).sum();
            let (x, y) = px[px.len() / 2];
            let total: f64 = cube.spectrum(x, y).unwrap().iter().sum();
            assert!((total - analytic).abs() < 1e-9);
        }
    }

    #[test]
    fn letter_target_edge_cases() {
        let grid = make_wavelength_grid(700.0, 1050.0, 8).unwrap();
        let empty = letter_target(&[], 16, 16, &grid).unwrap();
        assert!(empty.data().iter().all(|v| *v == 0.0));
        assert!(letter_target(&[Glyph::new('U', 1550.0, 40.0)], 16, 16, &grid).is_err());
        let many: Vec<Glyph> = (0..10).map(|_| Glyph::new('U', 850.0, 40.0)).collect();
        assert!(letter_target(&many, 16, 16, &grid).is_err());
        assert!(letter_target(&[Glyph::new('%', 850.0, 40.0)], 16, 16, &grid).is_err());
    }

    #[test]
    fn phantom_values_in_unit_interval() {
        let grid = make_wavelength_grid(700.0, 1600.0, 52).unwrap();
        let real = MaterialSpectrum::real_apple_like(&grid);
        let fake = MaterialSpectrum::fake_apple_like(&grid);
        let scene = material_scene(40, 24, &grid, &real, &fake).unwrap();
        assert!(scene.data().iter().all(|v| (0.0..=1.0).contains(v)));
        let letters = letter_target(&[Glyph::new('b', 1550.0, laser_fwhm_nm(&grid))], 24, 24, &grid).unwrap();
        assert!(letters.data().iter().all(|v| (0.0..=1.0).contains(v)));
    }

    #[test]
    fn built_in_spectra_show_expected_signatures() {
        let grid = make_wavelength_grid(700.0, 1600.0, 52).unwrap();
        let real = MaterialSpectrum::real_apple_like(&grid);
        let fake = MaterialSpectrum::fake_apple_like(&grid);
        let mean_over = |s: &MaterialSpectrum, lo: f64, hi: f64| {
            let v: Vec<f64> = grid.as_slice().iter().zip(s.values()).filter(|(w, _)| **w >= lo && **w <= hi).map(|(_, v)| *v).collect();
            assert!(!v.is_empty());
            v.iter().sum::<f64>() / v.len() as f64
        };
        assert!(mean_over(&real, 1350.0, 1600.0) < mean_over(&fake, 1350.0, 1600.0));
        assert!(mean_over(&real, 900.0, 980.0) < mean_over(&real, 800.0, 880.0));
    }

    #[test]
    fn identical_spectra_mirror_across_scene() {
        let grid = sub_band_a();
        let fake = MaterialSpectrum::fake_apple_like(&grid);
        let scene = material_scene(33, 20, &grid, &fake, &fake).unwrap();
        let [(xa, ya), (xb, yb)] = material_probe_points(33, 20);
        assert_eq!(xb, 32 - xa);
        assert_eq!(scene.spectrum(xa, ya).unwrap(), scene.spectrum(xb, yb).unwrap());
        assert_eq!(scene.spectrum(xa, ya).unwrap(), fake.values());
        for y in 0..20 {
            for x in 0..33 {
                assert_eq!(scene.spectrum(x, y).unwrap(), scene.spectrum(32 - x, y).unwrap());
            }
        }
        assert!(scene.spectrum(16, 0).unwrap().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn material_grid_mismatch() {
        let a = sub_band_a();
        let b = make_wavelength_grid(700.0, 1600.0, 52).unwrap();
        let s = MaterialSpectrum::real_apple_like(&a);
        let t = MaterialSpectrum::real_apple_like(&b);
        assert!(material_scene(32, 32, &a, &s, &t).is_err());
        assert!(MaterialSpectrum::new("x", a.clone(), vec![0.5; 3]).is_err());
        assert!(MaterialSpectrum::new("x", a, vec![1.5; 20]).is_err());
    }
}
