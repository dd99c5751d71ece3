//! OpenMX input (`.dat`) and MD/optimization trajectory (`.md`) files.

use std::collections::HashMap;

use super::xyz::{into_trajectory, read_frames};
use super::{decode, parse_f64, parse_vec3};
use crate::element::element_lookup;
use crate::error::{Error, Result};
use crate::model::{Atom, Lattice, Structure, Trajectory, Vec3};
use crate::units::BOHR_TO_ANG;

struct Input<'a> {
    /// (1-based line number, tokens) with comments removed
    lines: Vec<(usize, Vec<&'a str>)>,
}

impl<'a> Input<'a> {
    fn new(text: &'a str) -> Self {
        let lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").split_whitespace().collect::<Vec<_>>()))
            .filter(|(_, t)| !t.is_empty())
            .collect();
        Self { lines }
    }

    fn keyword(&self, name: &str) -> Option<(usize, &'a str)> {
        self.lines
            .iter()
            .find(|(_, t)| t[0].eq_ignore_ascii_case(name) && t.len() > 1)
            .map(|(n, t)| (*n, t[1]))
    }

    /// Rows between `<Name` and `Name>`.
    fn block(&self, name: &str) -> Option<&[(usize, Vec<&'a str>)]> {
        let open = format!("<{name}");
        let close = format!("{name}>");
        let start = self
            .lines
            .iter()
            .position(|(_, t)| t[0].eq_ignore_ascii_case(&open))?;
        let len = self.lines[start + 1..]
            .iter()
            .position(|(_, t)| t[0].eq_ignore_ascii_case(&close))?;
        Some(&self.lines[start + 1..start + 1 + len])
    }
}

enum CoordUnit {
    Ang,
    Bohr,
    Frac,
}

fn malformed(line: usize, reason: impl Into<String>) -> Error {
    Error::MalformedOpenmx {
        line,
        reason: reason.into(),
    }
}

fn read_unit_vectors(input: &Input) -> Result<Option<Lattice>> {
    let Some(rows) = input.block("Atoms.UnitVectors") else {
        return Ok(None);
    };
    let scale = match input.keyword("Atoms.UnitVectors.Unit") {
        None => 1.0,
        Some((_, u)) if u.eq_ignore_ascii_case("ang") => 1.0,
        Some((_, u)) if u.eq_ignore_ascii_case("au") => BOHR_TO_ANG,
        Some((line, u)) => return Err(malformed(line, format!("unknown unit '{u}'"))),
    };
    if rows.len() != 3 {
        let line = rows.first().map_or(0, |r| r.0);
        return Err(malformed(line, format!("expected 3 unit vectors, found {}", rows.len())));
    }
    let mut v = [[0.0; 3]; 3];
    for (r, (line, toks)) in rows.iter().enumerate() {
        let row = parse_vec3(toks).ok_or_else(|| malformed(*line, "bad unit vector"))?;
        v[r] = row.map(|x| x * scale);
    }
    Lattice::new(v).map(Some)
}

/// Species label → basis name ("Si" → "Si7.0-s2p2d1") from Definition.of.Atomic.Species.
fn species_definitions<'a>(input: &Input<'a>) -> HashMap<String, &'a str> {
    input
        .block("Definition.of.Atomic.Species")
        .map(|rows| {
            rows.iter()
                .filter(|(_, t)| t.len() >= 2)
                .map(|(_, t)| (t[0].to_string(), t[1]))
                .collect()
        })
        .unwrap_or_default()
}

pub fn parse_openmx_dat(bytes: &[u8]) -> Result<Structure> {
    let text = decode(bytes);
    let input = Input::new(&text);

    let (count_line, count) = input
        .keyword("Atoms.Number")
        .ok_or_else(|| Error::MissingKeyword("Atoms.Number".into()))?;
    let expected: usize = count
        .parse()
        .map_err(|_| malformed(count_line, format!("Atoms.Number '{count}' is not a count")))?;
    let rows = input
        .block("Atoms.SpeciesAndCoordinates")
        .ok_or_else(|| Error::MissingKeyword("<Atoms.SpeciesAndCoordinates".into()))?;

    let unit = match input.keyword("Atoms.SpeciesAndCoordinates.Unit") {
        None => CoordUnit::Ang,
        Some((_, u)) if u.eq_ignore_ascii_case("ang") => CoordUnit::Ang,
        Some((_, u)) if u.eq_ignore_ascii_case("au") => CoordUnit::Bohr,
        Some((_, u)) if u.eq_ignore_ascii_case("frac") => CoordUnit::Frac,
        Some((line, u)) => return Err(malformed(line, format!("unknown unit '{u}'"))),
    };
    let lattice = read_unit_vectors(&input)?;
    if matches!(unit, CoordUnit::Frac) && lattice.is_none() {
        return Err(Error::FracWithoutCell);
    }
    let defs = species_definitions(&input);

    let mut atoms = Vec::with_capacity(rows.len());
    for (line, toks) in rows {
        if toks.len() < 5 {
            return Err(malformed(*line, "expected 'serial species x y z up down'"));
        }
        let species = toks[1];
        let element = element_lookup(defs.get(species).copied().unwrap_or(species))
            .or_else(|_| element_lookup(species))?;
        let [x, y, z] = parse_vec3(&toks[2..5]).ok_or_else(|| malformed(*line, "bad coordinate"))?;
        let raw = Vec3::new(x, y, z);
        let position = match unit {
            CoordUnit::Ang => raw,
            CoordUnit::Bohr => raw * BOHR_TO_ANG,
            CoordUnit::Frac => lattice.as_ref().unwrap().frac_to_cart(&raw),
        };
        let mut atom = Atom::new(species, element, position);
        if toks.len() >= 7 {
            let up = parse_f64(toks[5]).ok_or_else(|| malformed(*line, "bad spin-up population"))?;
            let down = parse_f64(toks[6]).ok_or_else(|| malformed(*line, "bad spin-down population"))?;
            atom.properties.spin_up = Some(up);
            atom.properties.spin_down = Some(down);
            atom.properties.spin = Some(up - down);
        }
        atoms.push(atom);
    }
    if atoms.len() != expected {
        return Err(Error::CountMismatch {
            expected,
            found: atoms.len(),
        });
    }
    let comment = input
        .keyword("System.Name")
        .map(|(_, n)| n.to_string())
        .unwrap_or_default();
    Ok(Structure::new(atoms, lattice, comment))
}

/// Frames shaped like multi-frame XYZ; comments carry `time=` (fs) and `Energy=` (Hartree).
pub fn parse_openmx_md(bytes: &[u8]) -> Result<Trajectory> {
    let text = decode(bytes);
    let frames = read_frames(&text, |frame, line, reason| Error::MalformedFrame {
        frame,
        line,
        reason,
    })?;
    into_trajectory(frames)
}
