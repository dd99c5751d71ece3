//! Readers for every supported input format, plus format detection.
//!
//! All readers are pure functions of the input bytes. They are strict about
//! structure and lenient about whitespace: any run of spaces or tabs
//! separates tokens and both `\n` and `\r\n` line endings are accepted.

mod band;
mod cell;
mod cif;
mod cube;
mod detect;
mod openmx;
mod symop;
mod xyz;

use std::borrow::Cow;

pub use band::parse_band;
pub use cell::lattice_from_parameters;
pub use cif::parse_cif;
pub use cube::parse_cube;
pub use detect::{detect_format, Confidence, DetectedFormat, FormatKind};
pub use openmx::{parse_openmx_dat, parse_openmx_md};
pub use symop::SymmetryOp;
pub use xyz::parse_xyz;

use crate::error::Result;
use crate::model::{BandData, Structure, Trajectory, VolumetricGrid};

/// Whatever a file parsed into.
#[derive(Debug, Clone, PartialEq)]
pub enum Parsed {
    Structure(Structure),
    Trajectory(Trajectory),
    Volume(VolumetricGrid),
    Band(BandData),
}

pub fn parse_as(kind: FormatKind, bytes: &[u8]) -> Result<Parsed> {
    Ok(match kind {
        FormatKind::Xyz | FormatKind::XyzMulti => Parsed::Trajectory(parse_xyz(bytes)?),
        FormatKind::Cif => Parsed::Structure(parse_cif(bytes)?),
        FormatKind::OpenmxDat => Parsed::Structure(parse_openmx_dat(bytes)?),
        FormatKind::OpenmxMd => Parsed::Trajectory(parse_openmx_md(bytes)?),
        FormatKind::Cube => Parsed::Volume(parse_cube(bytes)?),
        FormatKind::Band => Parsed::Band(parse_band(bytes)?),
    })
}

/// Detects the format from the file name and leading bytes, then parses.
pub fn parse_file(filename: &str, bytes: &[u8]) -> Result<(DetectedFormat, Parsed)> {
    let head = &bytes[..bytes.len().min(detect::HEAD_LEN)];
    let format = detect_format(filename, head)?;
    let parsed = parse_as(format.kind, bytes)?;
    Ok((format, parsed))
}

pub(crate) fn decode(bytes: &[u8]) -> Cow<'_, str> {
    String::from_utf8_lossy(bytes)
}

/// Parses a float, accepting Fortran `D` exponents.
pub(crate) fn parse_f64(tok: &str) -> Option<f64> {
    match tok.parse::<f64>() {
        Ok(v) if v.is_finite() => Some(v),
        Ok(_) => None,
        Err(_) if tok.contains(['d', 'D']) => tok
            .replace(['d', 'D'], "e")
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite()),
        Err(_) => None,
    }
}

pub(crate) fn parse_vec3(toks: &[&str]) -> Option<[f64; 3]> {
    if toks.len() < 3 {
        return None;
    }
    Some([parse_f64(toks[0])?, parse_f64(toks[1])?, parse_f64(toks[2])?])
}
