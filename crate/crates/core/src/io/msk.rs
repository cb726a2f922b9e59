//! `MSK1` coded-aperture format:
//!
//! ```text
//! "MSK1" | width u32 | height u32 | origin_offset i32 | width·height × u8 ∈ {0, 1}
//! ```

use std::fs;
use std::io::Cursor;
use std::path::Path;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};

use super::{check_magic, truncated};
use crate::error::{Error, Result};
use crate::optics::CodedAperture;

pub const MSK_MAGIC: &[u8; 4] = b"MSK1";

pub fn encode_mask(mask: &CodedAperture) -> Vec<u8> {
    let mut out = Vec::with_capacity(16 + mask.values().len());
    out.extend_from_slice(MSK_MAGIC);
    out.write_u32::<LittleEndian>(mask.width() as u32).unwrap();
    out.write_u32::<LittleEndian>(mask.height() as u32).unwrap();
    out.write_i32::<LittleEndian>(mask.origin_offset() as i32).unwrap();
    out.extend_from_slice(mask.values());
    out
}

pub fn decode_mask(bytes: &[u8]) -> Result<CodedAperture> {
    check_magic(bytes, MSK_MAGIC)?;
    let mut rd = Cursor::new(&bytes[4..]);
    let width = rd.read_u32::<LittleEndian>().map_err(|_| truncated("width"))? as usize;
    let height = rd.read_u32::<LittleEndian>().map_err(|_| truncated("height"))? as usize;
    let origin = rd.read_i32::<LittleEndian>().map_err(|_| truncated("origin_offset"))? as i64;
    let count = width
        .checked_mul(height)
        .ok_or_else(|| Error::Format("mask dimensions overflow".into()))?;
    let payload = &bytes[16..];
    if payload.len() < count {
        return Err(truncated("mask payload"));
    }
    if payload.len() > count {
        return Err(Error::Format(format!("{} trailing bytes after mask payload", payload.len() - count)));
    }
    if let Some(pos) = payload.iter().position(|b| *b > 1) {
        return Err(Error::Format(format!("mask byte {} at offset {pos} is not 0 or 1", payload[pos])));
    }
    CodedAperture::new(width, height, origin, payload.to_vec())
}

pub fn write_mask(mask: &CodedAperture, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, encode_mask(mask))?;
    Ok(())
}

pub fn read_mask(path: impl AsRef<Path>) -> Result<CodedAperture> {
    decode_mask(&fs::read(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_by_one_layout() {
        let mask = CodedAperture::new(3, 1, -1, vec![1, 0, 1]).unwrap();
        let bytes = encode_mask(&mask);
        assert_eq!(&bytes[..4], b"MSK1");
        assert_eq!(&bytes[4..8], &[3, 0, 0, 0]);
        assert_eq!(&bytes[8..12], &[1, 0, 0, 0]);
        assert_eq!(&bytes[12..16], &(-1i32).to_le_bytes());
        assert_eq!(&bytes[16..], &[0x01, 0x00, 0x01]);
        assert_eq!(decode_mask(&bytes).unwrap(), mask);
    }

    #[test]
    fn non_binary_byte_rejected() {
        let mask = CodedAperture::new(3, 1, -1, vec![1, 0, 1]).unwrap();
        let mut bytes = encode_mask(&mask);
        bytes[17] = 2;
        assert!(matches!(decode_mask(&bytes), Err(Error::Format(_))));
    }

    #[test]
    fn truncated_mask() {
        let mask = CodedAperture::new(3, 2, 0, vec![1, 0, 1, 1, 1, 0]).unwrap();
        let bytes = encode_mask(&mask);
        for cut in [2, 9, 15, 20] {
            assert!(decode_mask(&bytes[..cut]).is_err());
        }
        let mut v2 = bytes.clone();
        v2[3] = b'2';
        assert!(matches!(decode_mask(&v2), Err(Error::UnsupportedVersion(_))));
    }
}
