use std::fmt::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::{Lattice, Structure};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StructureFormat {
    Xyz,
    Cif,
    OmxCart,
    OmxFrac,
}

impl StructureFormat {
    pub fn name(self) -> &'static str {
        match self {
            StructureFormat::Xyz => "xyz",
            StructureFormat::Cif => "cif",
            StructureFormat::OmxCart => "omx-cart",
            StructureFormat::OmxFrac => "omx-frac",
        }
    }

    /// Usual file extension, without the dot.
    pub fn extension(self) -> &'static str {
        match self {
            StructureFormat::Xyz => "xyz",
            StructureFormat::Cif => "cif",
            StructureFormat::OmxCart | StructureFormat::OmxFrac => "dat",
        }
    }
}

impl FromStr for StructureFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "xyz" => Ok(StructureFormat::Xyz),
            "cif" => Ok(StructureFormat::Cif),
            "omx-cart" => Ok(StructureFormat::OmxCart),
            "omx-frac" => Ok(StructureFormat::OmxFrac),
            _ => Err(format!("unknown structure format '{s}' (expected xyz, cif, omx-cart or omx-frac)")),
        }
    }
}

pub fn write_structure(s: &Structure, format: StructureFormat) -> Result<String> {
    match format {
        StructureFormat::Xyz => Ok(xyz(s)),
        StructureFormat::Cif => cif(s),
        StructureFormat::OmxCart => openmx(s, false),
        StructureFormat::OmxFrac => openmx(s, true),
    }
}

fn one_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn lattice_numbers(l: &Lattice) -> String {
    l.vectors()
        .iter()
        .flatten()
        .map(|x| format!("{x:.10}"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn xyz(s: &Structure) -> String {
    let mut out = format!("{}\n", s.len());
    let mut comment = one_line(&s.comment);
    if let Some(l) = &s.lattice {
        if !comment.is_empty() {
            comment.push(' ');
        }
        write!(comment, "Lattice=\"{}\"", lattice_numbers(l)).unwrap();
    }
    out.push_str(&comment);
    out.push('\n');
    let with_velocity = !s.is_empty() && s.atoms.iter().all(|a| a.properties.velocity.is_some());
    let with_force = with_velocity && s.atoms.iter().all(|a| a.properties.force.is_some());
    for a in &s.atoms {
        let p = a.position;
        write!(out, "{} {:.6} {:.6} {:.6}", a.element.symbol, p.x, p.y, p.z).unwrap();
        if with_velocity {
            for v in a.properties.velocity.unwrap() {
                write!(out, " {v:.6}").unwrap();
            }
        }
        if with_force {
            for v in a.properties.force.unwrap() {
                write!(out, " {v:.6}").unwrap();
            }
        }
        out.push('\n');
    }
    out
}

fn block_name(comment: &str) -> String {
    let name: String = comment
        .split_whitespace()
        .next()
        .unwrap_or("")
        .chars()
        .filter(|c| c.is_ascii_graphic())
        .collect();
    if name.is_empty() {
        "structure".into()
    } else {
        name
    }
}

fn cif(s: &Structure) -> Result<String> {
    let l = s.lattice()?;
    let [a, b, c, alpha, beta, gamma] = l.parameters();
    let mut out = String::new();
    writeln!(out, "data_{}", block_name(&s.comment)).unwrap();
    out.push_str("_symmetry_space_group_name_H-M 'P 1'\n_symmetry_Int_Tables_number 1\n");
    for (tag, v) in [
        ("_cell_length_a", a),
        ("_cell_length_b", b),
        ("_cell_length_c", c),
        ("_cell_angle_alpha", alpha),
        ("_cell_angle_beta", beta),
        ("_cell_angle_gamma", gamma),
    ] {
        writeln!(out, "{tag} {v:.10}").unwrap();
    }
    out.push_str("loop_\n_symmetry_equiv_pos_as_xyz\n'x, y, z'\n");
    out.push_str("loop_\n_atom_site_label\n_atom_site_type_symbol\n_atom_site_fract_x\n_atom_site_fract_y\n_atom_site_fract_z\n");
    let mut counts = std::collections::HashMap::new();
    for atom in &s.atoms {
        let n = counts.entry(atom.element.symbol).or_insert(0usize);
        *n += 1;
        let f = l.cart_to_frac(&atom.position);
        writeln!(
            out,
            "{}{} {} {:.10} {:.10} {:.10}",
            atom.element.symbol, n, atom.element.symbol, f.x, f.y, f.z
        )
        .unwrap();
    }
    Ok(out)
}

fn openmx(s: &Structure, frac: bool) -> Result<String> {
    let lattice = if frac { Some(s.lattice()?) } else { s.lattice.as_ref() };
    let mut out = String::new();
    let name = block_name(&s.comment);
    writeln!(out, "System.Name {name}").unwrap();
    writeln!(out, "Species.Number {}", species_list(s).len()).unwrap();
    out.push_str("<Definition.of.Atomic.Species\n");
    for (label, symbol) in species_list(s) {
        writeln!(out, " {label} {symbol}7.0-s2p2d1 {symbol}_PBE19").unwrap();
    }
    out.push_str("Definition.of.Atomic.Species>\n");
    writeln!(out, "Atoms.Number {}", s.len()).unwrap();
    writeln!(out, "Atoms.SpeciesAndCoordinates.Unit {}", if frac { "FRAC" } else { "Ang" }).unwrap();
    if s.atoms.iter().any(|a| a.properties.spin_up.is_none() || a.properties.spin_down.is_none()) {
        out.push_str("# spin columns are 0.0 0.0 where the source had no spin data\n");
    }
    out.push_str("<Atoms.SpeciesAndCoordinates\n");
    for (n, a) in s.atoms.iter().enumerate() {
        let p = match lattice {
            Some(l) if frac => l.cart_to_frac(&a.position),
            _ => a.position,
        };
        let up = a.properties.spin_up.unwrap_or(0.0);
        let down = a.properties.spin_down.unwrap_or(0.0);
        if frac {
            writeln!(out, " {} {} {:.10} {:.10} {:.10} {up:.6} {down:.6}", n + 1, species_label(a), p.x, p.y, p.z).unwrap();
        } else {
            writeln!(out, " {} {} {:.6} {:.6} {:.6} {up:.6} {down:.6}", n + 1, species_label(a), p.x, p.y, p.z).unwrap();
        }
    }
    out.push_str("Atoms.SpeciesAndCoordinates>\n");
    if let Some(l) = lattice {
        out.push_str("Atoms.UnitVectors.Unit Ang\n<Atoms.UnitVectors\n");
        for row in l.vectors() {
            writeln!(out, " {:.10} {:.10} {:.10}", row[0], row[1], row[2]).unwrap();
        }
        out.push_str("Atoms.UnitVectors>\n");
    }
    Ok(out)
}

/// Species labels must be single tokens without comment characters.
fn species_label(a: &crate::model::Atom) -> String {
    let label: String = a.species.chars().filter(|c| c.is_ascii_graphic() && *c != '#').collect();
    if label.is_empty() {
        a.element.symbol.to_string()
    } else {
        label
    }
}

fn species_list(s: &Structure) -> Vec<(String, &'static str)> {
    let mut out: Vec<(String, &'static str)> = Vec::new();
    for a in &s.atoms {
        let label = species_label(a);
        if !out.iter().any(|(l, _)| *l == label) {
            out.push((label, a.element.symbol));
        }
    }
    out
}
