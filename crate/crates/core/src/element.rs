//! Embedded element table (Z = 1..103).
//!
//! Covalent radii are the Cordero et al. (2008) single-bond values; elements
//! beyond curium are not covered there and get [`DEFAULT_COVALENT_RADIUS`].
//! Colors follow the Jmol palette.

use std::sync::LazyLock;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

pub const DEFAULT_COVALENT_RADIUS: f64 = 1.5;

#[derive(Debug, Clone, PartialEq)]
pub struct Element {
    pub symbol: &'static str,
    pub atomic_number: u8,
    /// Å
    pub covalent_radius: f64,
    /// Sphere radius used for display, Å.
    pub display_radius: f64,
    pub color: [f64; 3],
}

impl Serialize for Element {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.symbol)
    }
}

// (symbol, covalent radius, rgb)
const RAW: [(&str, Option<f64>, u32); 103] = [
    ("H", Some(0.31), 0xFFFFFF),
    ("He", Some(0.28), 0xD9FFFF),
    ("Li", Some(1.28), 0xCC80FF),
    ("Be", Some(0.96), 0xC2FF00),
    ("B", Some(0.84), 0xFFB5B5),
    ("C", Some(0.76), 0x909090),
    ("N", Some(0.71), 0x3050F8),
    ("O", Some(0.66), 0xFF0D0D),
    ("F", Some(0.57), 0x90E050),
    ("Ne", Some(0.58), 0xB3E3F5),
    ("Na", Some(1.66), 0xAB5CF2),
    ("Mg", Some(1.41), 0x8AFF00),
    ("Al", Some(1.21), 0xBFA6A6),
    ("Si", Some(1.11), 0xF0C8A0),
    ("P", Some(1.07), 0xFF8000),
    ("S", Some(1.05), 0xFFFF30),
    ("Cl", Some(1.02), 0x1FF01F),
    ("Ar", Some(1.06), 0x80D1E3),
    ("K", Some(2.03), 0x8F40D4),
    ("Ca", Some(1.76), 0x3DFF00),
    ("Sc", Some(1.70), 0xE6E6E6),
    ("Ti", Some(1.60), 0xBFC2C7),
    ("V", Some(1.53), 0xA6A6AB),
    ("Cr", Some(1.39), 0x8A99C7),
    ("Mn", Some(1.39), 0x9C7AC7),
    ("Fe", Some(1.32), 0xE06633),
    ("Co", Some(1.26), 0xF090A0),
    ("Ni", Some(1.24), 0x50D050),
    ("Cu", Some(1.32), 0xC88033),
    ("Zn", Some(1.22), 0x7D80B0),
    ("Ga", Some(1.22), 0xC28F8F),
    ("Ge", Some(1.20), 0x668F8F),
    ("As", Some(1.19), 0xBD80E3),
    ("Se", Some(1.20), 0xFFA100),
    ("Br", Some(1.20), 0xA62929),
    ("Kr", Some(1.16), 0x5CB8D1),
    ("Rb", Some(2.20), 0x702EB0),
    ("Sr", Some(1.95), 0x00FF00),
    ("Y", Some(1.90), 0x94FFFF),
    ("Zr", Some(1.75), 0x94E0E0),
    ("Nb", Some(1.64), 0x73C2C9),
    ("Mo", Some(1.54), 0x54B5B5),
    ("Tc", Some(1.47), 0x3B9E9E),
    ("Ru", Some(1.46), 0x248F8F),
    ("Rh", Some(1.42), 0x0A7D8C),
    ("Pd", Some(1.39), 0x006985),
    ("Ag", Some(1.45), 0xC0C0C0),
    ("Cd", Some(1.44), 0xFFD98F),
    ("In", Some(1.42), 0xA67573),
    ("Sn", Some(1.39), 0x668080),
    ("Sb", Some(1.39), 0x9E63B5),
    ("Te", Some(1.38), 0xD47A00),
    ("I", Some(1.39), 0x940094),
    ("Xe", Some(1.40), 0x429EB0),
    ("Cs", Some(2.44), 0x57178F),
    ("Ba", Some(2.15), 0x00C900),
    ("La", Some(2.07), 0x70D4FF),
    ("Ce", Some(2.04), 0xFFFFC7),
    ("Pr", Some(2.03), 0xD9FFC7),
    ("Nd", Some(2.01), 0xC7FFC7),
    ("Pm", Some(1.99), 0xA3FFC7),
    ("Sm", Some(1.98), 0x8FFFC7),
    ("Eu", Some(1.98), 0x61FFC7),
    ("Gd", Some(1.96), 0x45FFC7),
    ("Tb", Some(1.94), 0x30FFC7),
    ("Dy", Some(1.92), 0x1FFFC7),
    ("Ho", Some(1.92), 0x00FF9C),
    ("Er", Some(1.89), 0x00E675),
    ("Tm", Some(1.90), 0x00D452),
    ("Yb", Some(1.87), 0x00BF38),
    ("Lu", Some(1.87), 0x00AB24),
    ("Hf", Some(1.75), 0x4DC2FF),
    ("Ta", Some(1.70), 0x4DA6FF),
    ("W", Some(1.62), 0x2194D6),
    ("Re", Some(1.51), 0x267DAB),
    ("Os", Some(1.44), 0x266696),
    ("Ir", Some(1.41), 0x175487),
    ("Pt", Some(1.36), 0xD0D0E0),
    ("Au", Some(1.36), 0xFFD123),
    ("Hg", Some(1.32), 0xB8B8D0),
    ("Tl", Some(1.45), 0xA6544D),
    ("Pb", Some(1.46), 0x575961),
    ("Bi", Some(1.48), 0x9E4FB5),
    ("Po", Some(1.40), 0xAB5C00),
    ("At", Some(1.50), 0x754F45),
    ("Rn", Some(1.50), 0x428296),
    ("Fr", Some(2.60), 0x420066),
    ("Ra", Some(2.21), 0x007D00),
    ("Ac", Some(2.15), 0x70ABFA),
    ("Th", Some(2.06), 0x00BAFF),
    ("Pa", Some(2.00), 0x00A1FF),
    ("U", Some(1.96), 0x008FFF),
    ("Np", Some(1.90), 0x0080FF),
    ("Pu", Some(1.87), 0x006BFF),
    ("Am", Some(1.80), 0x545CF2),
    ("Cm", Some(1.69), 0x785CE3),
    ("Bk", None, 0x8A4FE3),
    ("Cf", None, 0xA136D4),
    ("Es", None, 0xB31FD4),
    ("Fm", None, 0xB31FBA),
    ("Md", None, 0xB30DA6),
    ("No", None, 0xBD0D87),
    ("Lr", None, 0xC70066),
];

static TABLE: LazyLock<Vec<Element>> = LazyLock::new(|| {
    RAW.iter()
        .enumerate()
        .map(|(i, &(symbol, radius, rgb))| {
            let covalent_radius = radius.unwrap_or(DEFAULT_COVALENT_RADIUS);
            Element {
                symbol,
                atomic_number: (i + 1) as u8,
                covalent_radius,
                display_radius: 0.5 * covalent_radius,
                color: [
                    ((rgb >> 16) & 0xff) as f64 / 255.0,
                    ((rgb >> 8) & 0xff) as f64 / 255.0,
                    (rgb & 0xff) as f64 / 255.0,
                ],
            }
        })
        .collect()
});

pub fn all_elements() -> &'static [Element] {
    &TABLE
}

pub fn element_by_number(z: u32) -> Result<&'static Element> {
    if z == 0 {
        return Err(Error::UnknownElement(z.to_string()));
    }
    TABLE
        .get(z as usize - 1)
        .ok_or_else(|| Error::UnknownElement(z.to_string()))
}

fn by_symbol(candidate: &str) -> Option<&'static Element> {
    TABLE
        .iter()
        .find(|e| e.symbol.eq_ignore_ascii_case(candidate))
}

/// Resolve a symbol or species tag ("Si", "MoSe2", "Si7.0-s2p2d1", "C60tag", "Fe3+")
/// to an element.
///
/// Only the leading alphabetic run matters; its first two letters are tried
/// before the first one, case-insensitively. A purely numeric tag is read as
/// an atomic number.
pub fn element_lookup(tag: &str) -> Result<&'static Element> {
    let tag = tag.trim();
    if !tag.is_empty() && tag.bytes().all(|b| b.is_ascii_digit()) {
        return tag
            .parse::<u32>()
            .map_err(|_| Error::UnknownElement(tag.to_string()))
            .and_then(element_by_number);
    }
    let letters: String = tag
        .chars()
        .take_while(|c| c.is_ascii_alphabetic())
        .take(2)
        .collect();
    if letters.len() == 2 {
        if let Some(e) = by_symbol(&letters) {
            return Ok(e);
        }
    }
    letters
        .get(..1)
        .and_then(by_symbol)
        .ok_or_else(|| Error::UnknownElement(tag.to_string()))
}
