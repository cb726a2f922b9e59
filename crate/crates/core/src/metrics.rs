//! Reconstruction quality against ground truth.

use crate::cube::SpectralCube;
use crate::error::{Error, Result};

/// Pearson correlation of two equal-length series, `None` if either has
/// zero variance.
pub fn pearson(a: &[f64], b: &[f64]) -> Option<f64> {
    assert_eq!(a.len(), b.len());
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa == 0.0 || sbb == 0.0 {
        return None;
    }
    Some((sab / (saa.sqrt() * sbb.sqrt())).clamp(-1.0, 1.0))
}

fn check_same_shape(recon: &SpectralCube, truth: &SpectralCube) -> Result<()> {
    if recon.nx() != truth.nx() || recon.ny() != truth.ny() || recon.n_bands() != truth.n_bands() {
        return Err(Error::DimensionMismatch(format!(
            "recon {}x{}x{} vs truth {}x{}x{}",
            recon.nx(),
            recon.ny(),
            recon.n_bands(),
            truth.nx(),
            truth.ny(),
            truth.n_bands()
        )));
    }
    Ok(())
}

/// Pearson correlation between the reconstructed and true spectra at one pixel.
pub fn spectral_correlation(recon: &SpectralCube, truth: &SpectralCube, point: (usize, usize)) -> Result<f64> {
    check_same_shape(recon, truth)?;
    let (x, y) = point;
    let r = recon.spectrum(x, y)?;
    let t = truth.spectrum(x, y)?;
    pearson(&r, &t).ok_or(Error::ZeroVariance { x, y })
}

/// Mean of [`spectral_correlation`] over several probe points.
pub fn mean_spectral_correlation(recon: &SpectralCube, truth: &SpectralCube, points: &[(usize, usize)]) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::InvalidParameter("no probe points given".into()));
    }
    let mut total = 0.0;
    for p in points {
        total += spectral_correlation(recon, truth, *p)?;
    }
    Ok(total / points.len() as f64)
}

/// `10·log10(peak² / MSE)` with `peak = max(truth)`; `+∞` when the cubes match.
pub fn psnr(recon: &SpectralCube, truth: &SpectralCube) -> Result<f64> {
    check_same_shape(recon, truth)?;
    let peak = truth.max_value();
    if truth.data().iter().all(|v| *v == 0.0) || peak <= 0.0 {
        return Err(Error::InvalidParameter("truth cube has no positive peak".into()));
    }
    let n = truth.data().len() as f64;
    let mse = recon.data().iter().zip(truth.data()).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / n;
    if mse == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (peak * peak / mse).log10())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_wavelength_grid;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cube_from(nx: usize, ny: usize, n: usize, f: impl Fn(usize) -> f64) -> SpectralCube {
        let grid = make_wavelength_grid(700.0, 1000.0, n).unwrap();
        SpectralCube::new(nx, ny, grid, (0..nx * ny * n).map(f).collect()).unwrap()
    }

    /// Textbook two-pass formula using sample moments, kept separate from
    /// the production routine.
    fn pearson_moments(a: &[f64], b: &[f64]) -> f64 {
        let n = a.len() as f64;
        let (sa, sb): (f64, f64) = (a.iter().sum(), b.iter().sum());
        let sab: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
        let saa: f64 = a.iter().map(|x| x * x).sum();
        let sbb: f64 = b.iter().map(|x| x * x).sum();
        let cov = sab / n - (sa / n) * (sb / n);
        let va = saa / n - (sa / n).powi(2);
        let vb = sbb / n - (sb / n).powi(2);
        cov / (va * vb).sqrt()
    }

    #[test]
    fn identical_spectra_correlate_perfectly() {
        let c = cube_from(3, 2, 6, |i| ((i * 13) % 7) as f64);
        assert!((spectral_correlation(&c, &c, (1, 1)).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn affine_invariance() {
        let t = cube_from(3, 2, 6, |i| ((i * 13) % 7) as f64 + 0.5);
        let r = cube_from(3, 2, 6, |i| 2.5 * (((i * 13) % 7) as f64 + 0.5) + 4.0);
        assert!((spectral_correlation(&r, &t, (2, 0)).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn reversed_spectrum_matches_independent_formula() {
        let grid = make_wavelength_grid(700.0, 1000.0, 9).unwrap();
        let truth_s = [0.1, 0.3, 0.9, 0.7, 0.2, 0.25, 0.4, 0.05, 0.6];
        let mut rev = truth_s;
        rev.reverse();
        let truth = SpectralCube::new(1, 1, grid.clone(), truth_s.to_vec()).unwrap();
        let recon = SpectralCube::new(1, 1, grid, rev.to_vec()).unwrap();
        let got = spectral_correlation(&recon, &truth, (0, 0)).unwrap();
        let want = pearson_moments(&rev, &truth_s);
        assert!((got - want).abs() < 1e-12, "{got} vs {want}");
    }

    #[test]
    fn correlation_errors() {
        let c = cube_from(2, 2, 4, |i| (i / 4) as f64);
        let flat = cube_from(2, 2, 4, |_| 1.0);
        assert!(matches!(spectral_correlation(&c, &flat, (0, 0)), Err(Error::ZeroVariance { .. })));
        assert!(matches!(spectral_correlation(&c, &c, (2, 0)), Err(Error::PointOutOfBounds { .. })));
        assert!(spectral_correlation(&c, &cube_from(2, 2, 3, |i| i as f64), (0, 0)).is_err());
        assert!(mean_spectral_correlation(&c, &c, &[]).is_err());
    }

    #[test]
    fn mean_over_points() {
        let c = cube_from(3, 3, 5, |i| ((i * 7) % 11) as f64);
        let m = mean_spectral_correlation(&c, &c, &[(0, 0), (2, 2)]).unwrap();
        assert!((m - 1.0).abs() < 1e-12);
    }

    #[test]
    fn psnr_values() {
        let truth = cube_from(4, 4, 2, |_| 1.0);
        let recon = cube_from(4, 4, 2, |_| 0.9);
        assert!((psnr(&recon, &truth).unwrap() - 20.0).abs() < 1e-9);
        assert_eq!(psnr(&truth, &truth).unwrap(), f64::INFINITY);
        let zero = cube_from(4, 4, 2, |_| 0.0);
        assert!(psnr(&recon, &zero).is_err());
    }

    #[test]
    fn psnr_scale_invariant() {
        let truth = cube_from(4, 3, 3, |i| (i % 5) as f64 * 0.2);
        let recon = cube_from(4, 3, 3, |i| (i % 5) as f64 * 0.19 + 0.01);
        let t2 = cube_from(4, 3, 3, |i| 2.0 * ((i % 5) as f64 * 0.2));
        let r2 = cube_from(4, 3, 3, |i| 2.0 * ((i % 5) as f64 * 0.19 + 0.01));
        assert!((psnr(&recon, &truth).unwrap() - psnr(&r2, &t2).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn psnr_falls_as_noise_grows() {
        let truth = cube_from(16, 16, 4, |i| ((i * 31) % 17) as f64 / 16.0);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let base: Vec<f64> = (0..truth.data().len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut last = f64::INFINITY;
        for sigma in [0.01, 0.02, 0.05, 0.1, 0.2] {
            let data = truth.data().iter().zip(&base).map(|(t, n)| t + sigma * n).collect();
            let noisy = SpectralCube::new(16, 16, truth.grid().clone(), data).unwrap();
            let p = psnr(&noisy, &truth).unwrap();
            assert!(p < last);
            last = p;
        }
    }

    #[test]
    fn random_spectra_agree_with_moment_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..50 {
            let a: Vec<f64> = (0..20).map(|_| rng.gen_range(0.0..1.0)).collect();
            let b: Vec<f64> = (0..20).map(|_| rng.gen_range(0.0..1.0)).collect();
            assert!((pearson(&a, &b).unwrap() - pearson_moments(&a, &b)).abs() < 1e-12);
        }
    }
}
