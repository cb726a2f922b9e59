//! Parsers for compact flag values.

use anyhow::{anyhow, bail, Context, Result};
use rcassi::phantoms::{laser_fwhm_nm, Glyph, LED_FWHM_NM};
use rcassi::{make_wavelength_grid, split_bands, WavelengthGrid};

/// `λmin:λmax:n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub n: usize,
}

impl std::str::FromStr for GridSpec {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            bail!("grid must look like MIN:MAX:N, got {s:?}");
        }
        let min = parts[0].trim().parse().with_context(|| format!("bad grid minimum {:?}", parts[0]))?;
        let max = parts[1].trim().parse().with_context(|| format!("bad grid maximum {:?}", parts[1]))?;
        let n = parts[2].trim().parse().with_context(|| format!("bad channel count {:?}", parts[2]))?;
        Ok(Self { min, max, n })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Band {
    Low,
    High,
}

/// Builds the grid, optionally narrowed to one side of a sub-band split.
pub fn resolve_grid(spec: GridSpec, band: Option<Band>, boundary_nm: f64) -> Result<WavelengthGrid> {
    let full = make_wavelength_grid(spec.min, spec.max, spec.n)?;
    let Some(band) = band else {
        return Ok(full);
    };
    let split = split_bands(&full, boundary_nm)?;
    let range = match band {
        Band::Low => split.low,
        Band::High => split.high,
    };
    Ok(full.slice(range)?)
}

/// `CHAR@CENTER_NM[:FWHM_NM]`; the FWHM may also be `laser` (one channel
/// spacing) or `led` (40 nm, the default).
#[derive(Debug, Clone, PartialEq)]
pub struct GlyphSpec {
    pub ch: char,
    pub center_nm: f64,
    pub fwhm: Fwhm,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Fwhm {
    Nm(f64),
    Led,
    Laser,
}

impl GlyphSpec {
    pub fn to_glyph(&self, grid: &WavelengthGrid) -> Glyph {
        let fwhm = match self.fwhm {
            Fwhm::Nm(v) => v,
            Fwhm::Led => LED_FWHM_NM,
            Fwhm::Laser => laser_fwhm_nm(grid),
        };
        Glyph::new(self.ch, self.center_nm, fwhm)
    }
}

impl std::str::FromStr for GlyphSpec {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        let (ch, rest) = s.split_once('@').ok_or_else(|| anyhow!("glyph must look like CHAR@NM[:FWHM], got {s:?}"))?;
        let mut chars = ch.chars();
        let (Some(ch), None) = (chars.next(), chars.next()) else {
            bail!("glyph needs exactly one character, got {ch:?}");
        };
        let (center, fwhm) = match rest.split_once(':') {
            Some((c, f)) => (c, Some(f)),
            None => (rest, None),
        };
        let center_nm: f64 = center.parse().with_context(|| format!("bad glyph wavelength {center:?}"))?;
        let fwhm = match fwhm {
            None | Some("led") => Fwhm::Led,
            Some("laser") => Fwhm::Laser,
            Some(f) => {
                let v: f64 = f.parse().with_context(|| format!("bad glyph FWHM {f:?}"))?;
                if !(v >= 0.0) {
                    bail!("glyph FWHM must be >= 0, got {v}");
                }
                Fwhm::Nm(v)
            }
        };
        Ok(Self { ch, center_nm, fwhm })
    }
}

/// `x,y;x,y;...`
pub fn parse_points(s: &str) -> Result<Vec<(usize, usize)>> {
    let pts = s
        .split(';')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            let (x, y) = p.split_once(',').ok_or_else(|| anyhow!("point must look like X,Y, got {p:?}"))?;
            Ok((x.trim().parse()?, y.trim().parse()?))
        })
        .collect::<Result<Vec<_>>>()?;
    if pts.is_empty() {
        bail!("no probe points given");
    }
    Ok(pts)
}

pub fn format_points(points: &[(usize, usize)]) -> String {
    points.iter().map(|(x, y)| format!("{x},{y}")).collect::<Vec<_>>().join(";")
}
