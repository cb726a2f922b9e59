//! Band images and spectrum tables for plotting.

use std::path::Path;

use std::fs::File;
use std::io::BufWriter;

use image::codecs::pnm::{PnmEncoder, PnmSubtype, SampleEncoding};
use image::{ExtendedColorType, GrayImage, ImageEncoder, ImageFormat};

use crate::cube::SpectralCube;
use crate::error::{Error, Result};

/// What [`export_band_image`] wrote.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandImage {
    pub channel: usize,
    pub min: f64,
    pub max: f64,
    /// The band had no contrast and was written as all zeros.
    pub constant: bool,
}

/// Writes one band as an 8-bit grayscale image, min-max stretched to
/// `[0, 255]`. The format follows the file extension (`.png`, `.pgm`, ...);
/// paths without a recognized extension get binary PGM.
pub fn export_band_image(cube: &SpectralCube, channel: usize, path: impl AsRef<Path>) -> Result<BandImage> {
    if channel >= cube.n_bands() {
        return Err(Error::InvalidParameter(format!(
            "channel {channel} out of range for {} bands",
            cube.n_bands()
        )));
    }
    let band = cube.band(channel);
    let min = band.iter().copied().fold(f64::INFINITY, f64::min);
    let max = band.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let constant = !(max > min);
    let pixels: Vec<u8> = if constant {
        vec![0; band.len()]
    } else {
        let scale = 255.0 / (max - min);
        band.iter().map(|v| ((v - min) * scale).round().clamp(0.0, 255.0) as u8).collect()
    };
    let img = GrayImage::from_raw(cube.nx() as u32, cube.ny() as u32, pixels)
        .ok_or_else(|| Error::InvalidParameter("band size does not match image size".into()))?;
    let path = path.as_ref();
    match ImageFormat::from_path(path) {
        Ok(ImageFormat::Pnm) | Err(_) => {
            let out = BufWriter::new(File::create(path)?);
            PnmEncoder::new(out)
                .with_subtype(PnmSubtype::Graymap(SampleEncoding::Binary))
                .write_image(img.as_raw(), img.width(), img.height(), ExtendedColorType::L8)?;
        }
        Ok(format) => img.save_with_format(path, format)?,
    }
    Ok(BandImage { channel, min, max, constant })
}

/// Writes `wavelength_nm,p1,p2,...` with one row per channel and one column
/// per probe point. Values use the shortest exact decimal form.
pub fn export_spectrum_csv(cube: &SpectralCube, points: &[(usize, usize)], path: impl AsRef<Path>) -> Result<()> {
    if points.is_empty() {
        return Err(Error::InvalidParameter("no probe points given".into()));
    }
    let spectra = points.iter().map(|(x, y)| cube.spectrum(*x, *y)).collect::<Result<Vec<_>>>()?;
    let mut wtr = csv::Writer::from_path(path)?;
    let mut header = vec!["wavelength_nm".to_string()];
    header.extend((1..=points.len()).map(|i| format!("p{i}")));
    wtr.write_record(&header)?;
    for (k, w) in cube.grid().as_slice().iter().enumerate() {
        let mut row = vec![w.to_string()];
        row.extend(spectra.iter().map(|s| s[k].to_string()));
        wtr.write_record(&row)?;
    }
    wtr.flush()?;
    Ok(())
}

/// Parsed spectrum CSV: wavelengths plus one column per probe point.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumTable {
    pub wavelengths: Vec<f64>,
    pub columns: Vec<Vec<f64>>,
}

pub fn read_spectrum_csv(path: impl AsRef<Path>) -> Result<SpectrumTable> {
    let mut rdr = csv::Reader::from_path(path)?;
    let n_cols = rdr.headers()?.len().saturating_sub(1);
    let mut table = SpectrumTable { wavelengths: Vec::new(), columns: vec![Vec::new(); n_cols] };
    for rec in rdr.records() {
        let rec = rec?;
        let parse = |s: &str| s.parse::<f64>().map_err(|e| Error::Format(format!("bad number {s:?}: {e}")));
        table.wavelengths.push(parse(&rec[0])?);
        for (c, col) in table.columns.iter_mut().enumerate() {
            col.push(parse(&rec[c + 1])?);
        }
    }
    Ok(table)
}
