//! `HSC1` cube format:
//!
//! ```text
//! "HSC1" | nx u32 | ny u32 | n_lambda u32 | n_lambda × f64 wavelengths | nx·ny·n_lambda × f32 data
//! ```
//!
//! Data follows the in-memory cube layout (band-major, then row-major).

use std::fs;
use std::io::Cursor;
use std::path::Path;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};

use super::{check_magic, truncated};
use crate::cube::{Measurement, SpectralCube};
use crate::error::{Error, Result};
use crate::grid::WavelengthGrid;

pub const HSC_MAGIC: &[u8; 4] = b"HSC1";

pub fn encode_cube(cube: &SpectralCube) -> Vec<u8> {
    let n = cube.n_bands();
    let mut out = Vec::with_capacity(16 + 8 * n + 4 * cube.data().len());
    out.extend_from_slice(HSC_MAGIC);
    for dim in [cube.nx(), cube.ny(), n] {
        out.write_u32::<LittleEndian>(dim as u32).unwrap();
    }
    for w in cube.grid().as_slice() {
        out.write_f64::<LittleEndian>(*w).unwrap();
    }
    for v in cube.data() {
        out.write_f32::<LittleEndian>(*v as f32).unwrap();
    }
    out
}

pub fn decode_cube(bytes: &[u8]) -> Result<SpectralCube> {
    check_magic(bytes, HSC_MAGIC)?;
    let mut rd = Cursor::new(&bytes[4..]);
    let mut dim = |what| rd.read_u32::<LittleEndian>().map(|v| v as usize).map_err(|_| truncated(what));
    let nx = dim("nx")?;
    let ny = dim("ny")?;
    let n_lambda = dim("n_lambda")?;
    if nx == 0 || ny == 0 || n_lambda == 0 {
        return Err(Error::Format(format!("zero dimension in header {nx}x{ny}x{n_lambda}")));
    }
    let count = nx
        .checked_mul(ny)
        .and_then(|v| v.checked_mul(n_lambda))
        .ok_or_else(|| Error::Format("header dimensions overflow".into()))?;
    let expected = 16 + 8 * n_lambda as u64 + 4 * count as u64;
    if (bytes.len() as u64) < expected {
        return Err(truncated("cube payload"));
    }
    if bytes.len() as u64 != expected {
        return Err(Error::Format(format!("{} trailing bytes after cube payload", bytes.len() as u64 - expected)));
    }
    let mut wavelengths = Vec::with_capacity(n_lambda);
    for _ in 0..n_lambda {
        wavelengths.push(rd.read_f64::<LittleEndian>().map_err(|_| truncated("wavelengths"))?);
    }
    let grid = WavelengthGrid::new(wavelengths).map_err(|e| Error::Format(e.to_string()))?;
    let mut data = Vec::with_capacity(count);
    for _ in 0..count {
        data.push(rd.read_f32::<LittleEndian>().map_err(|_| truncated("cube data"))? as f64);
    }
    SpectralCube::new(nx, ny, grid, data)
}

pub fn write_cube(cube: &SpectralCube, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, encode_cube(cube))?;
    Ok(())
}

pub fn read_cube(path: impl AsRef<Path>) -> Result<SpectralCube> {
    decode_cube(&fs::read(path)?)
}

/// Stores a measurement as a one-channel cube tagged with `wavelength_nm`.
pub fn write_measurement(meas: &Measurement, wavelength_nm: f64, path: impl AsRef<Path>) -> Result<()> {
    let grid = WavelengthGrid::new(vec![wavelength_nm])?;
    let cube = SpectralCube::new(meas.nx(), meas.ny(), grid, meas.data().to_vec())?;
    write_cube(&cube, path)
}

/// Reads a one-channel HSC file as a measurement; `noise_sigma` is not
/// stored in the file and comes back as 0.
pub fn read_measurement(path: impl AsRef<Path>) -> Result<Measurement> {
    let cube = read_cube(path)?;
    if cube.n_bands() != 1 {
        return Err(Error::Format(format!(
            "measurement file has {} channels, expected 1",
            cube.n_bands()
        )));
    }
    Measurement::new(cube.nx(), cube.ny(), cube.into_data())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_wavelength_grid;

    fn small() -> SpectralCube {
        let grid = WavelengthGrid::new(vec![800.0, 900.0]).unwrap();
        SpectralCube::new(2, 1, grid, vec![2.0, 3.0, 5.0, 7.0]).unwrap()
    }

    #[test]
    fn two_by_one_by_two_is_48_bytes() {
        let bytes = encode_cube(&small());
        assert_eq!(bytes.len(), 4 + 12 + 16 + 16);
        assert_eq!(&bytes[..4], b"HSC1");
        assert_eq!(&bytes[4..8], &[2, 0, 0, 0]);
        assert_eq!(&bytes[16..24], &800f64.to_le_bytes());
        assert_eq!(&bytes[32..36], &2f32.to_le_bytes());
        assert_eq!(decode_cube(&bytes).unwrap(), small());
    }

    #[test]
    fn other_version_is_unsupported() {
        let mut bytes = encode_cube(&small());
        bytes[3] = b'2';
        let err = decode_cube(&bytes).unwrap_err();
        assert!(matches!(err, Error::UnsupportedVersion(_)));
        assert!(err.to_string().contains("unsupported version"));
        bytes[0] = b'X';
        assert!(matches!(decode_cube(&bytes), Err(Error::Format(_))));
    }

    #[test]
    fn truncation_and_garbage() {
        let bytes = encode_cube(&small());
        for cut in [0, 3, 10, 20, 47] {
            assert!(decode_cube(&bytes[..cut]).is_err(), "cut {cut}");
        }
        let mut extra = bytes.clone();
        extra.push(0);
        assert!(decode_cube(&extra).is_err());
    }

    #[test]
    fn non_monotone_wavelengths_rejected() {
        let mut bytes = encode_cube(&small());
        bytes[24..32].copy_from_slice(&700f64.to_le_bytes());
        assert!(matches!(decode_cube(&bytes), Err(Error::Format(_))));
    }

    #[test]
    fn quantizes_to_f32() {
        let grid = make_wavelength_grid(700.0, 1600.0, 3).unwrap();
        let cube = SpectralCube::new(1, 1, grid, vec![0.1, 1.0 / 3.0, 1e-8]).unwrap();
        let back = decode_cube(&encode_cube(&cube)).unwrap();
        assert_eq!(back.grid(), cube.grid());
        for (a, b) in back.data().iter().zip(cube.data()) {
            assert_eq!(*a, *b as f32 as f64);
        }
    }

    #[test]
    fn measurement_file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.hsc");
        let meas = Measurement::new(3, 2, vec![1.0, 2.0, 3.0, 4.0, 5.5, 6.0]).unwrap();
        write_measurement(&meas, 875.0, &path).unwrap();
        assert_eq!(read_measurement(&path).unwrap(), meas);
        write_cube(&small(), &path).unwrap();
        assert!(read_measurement(&path).is_err());
    }
}
