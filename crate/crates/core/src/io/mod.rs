//! On-disk formats.
//!
//! * HSC: spectral cubes and measurements (a measurement is a one-channel cube).
//! * MSK: coded apertures.
//! * 8-bit grayscale band images, spectrum CSV, and JSON run reports.
//!
//! Binary formats are little-endian with no padding.

mod export;
mod hsc;
mod msk;
mod report;

pub use export::{export_band_image, export_spectrum_csv, read_spectrum_csv, BandImage, SpectrumTable};
pub use hsc::{decode_cube, encode_cube, read_cube, read_measurement, write_cube, write_measurement, HSC_MAGIC};
pub use msk::{decode_mask, encode_mask, read_mask, write_mask, MSK_MAGIC};
pub use report::{read_report, write_report, Metrics, PointCorrelation, RunReport};

use crate::error::{Error, Result};

pub(crate) fn check_magic(bytes: &[u8], magic: &[u8; 4]) -> Result<()> {
    if bytes.len() < 4 {
        return Err(Error::Format(format!("file too short for {} header", String::from_utf8_lossy(magic))));
    }
    let found = &bytes[..4];
    if found == magic {
        return Ok(());
    }
    if found[..3] == magic[..3] {
        return Err(Error::UnsupportedVersion(String::from_utf8_lossy(found).into_owned()));
    }
    Err(Error::Format(format!(
        "bad magic {:?}, expected {:?}",
        String::from_utf8_lossy(found),
        String::from_utf8_lossy(magic)
    )))
}

pub(crate) fn truncated(what: &str) -> Error {
    Error::Format(format!("truncated file while reading {what}"))
}
