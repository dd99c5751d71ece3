//! CIF reading: cell parameters, the atom-site loop and the symmetry-operator
//! loop of the first data block. Sites are expanded by every operator into
//! the full conventional cell.

use std::collections::HashMap;

use super::cell::lattice_from_parameters;
use super::symop::{reduce, SymmetryOp};
use super::{decode, parse_f64};
use crate::element::element_lookup;
use crate::error::{Error, Result};
use crate::model::{Atom, Structure, Vec3};

/// Images closer than this (per fractional component, modulo 1) are merged.
pub const DEDUP_TOLERANCE: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Tag(String),
    Value(String),
    Loop,
    Data(String),
    Other,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>> {
    let mut out = Vec::new();
    let mut lines = text.lines().enumerate().peekable();
    while let Some((ln, line)) = lines.next() {
        let line_no = ln + 1;
        // semicolon text field
        if let Some(first) = line.strip_prefix(';') {
            let mut buf = first.to_string();
            let mut closed = false;
            for (_, l) in lines.by_ref() {
                if l.starts_with(';') {
                    closed = true;
                    break;
                }
                buf.push('\n');
                buf.push_str(l);
            }
            if !closed {
                return Err(Error::MalformedCif {
                    line: line_no,
                    reason: "unterminated text field".into(),
                });
            }
            out.push((line_no, Token::Value(buf.trim().to_string())));
            continue;
        }
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            if c == '#' {
                break;
            }
            if c == '\'' || c == '"' {
                // a quote closes only when followed by whitespace or end of line
                let start = i + 1;
                let mut j = start;
                while j < chars.len()
                    && !(chars[j] == c && (j + 1 == chars.len() || chars[j + 1].is_whitespace()))
                {
                    j += 1;
                }
                if j >= chars.len() {
                    return Err(Error::MalformedCif {
                        line: line_no,
                        reason: "unterminated quoted string".into(),
                    });
                }
                out.push((line_no, Token::Value(chars[start..j].iter().collect())));
                i = j + 1;
                continue;
            }
            let start = i;
            while i < chars.len() && !chars[i].is_whitespace() {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            let lower = word.to_ascii_lowercase();
            let tok = if word.starts_with('_') {
                Token::Tag(lower)
            } else if lower == "loop_" {
                Token::Loop
            } else if lower.starts_with("data_") {
                Token::Data(word[5..].to_string())
            } else if lower.starts_with("save_") || lower == "global_" || lower == "stop_" {
                Token::Other
            } else {
                Token::Value(word)
            };
            out.push((line_no, tok));
        }
    }
    Ok(out)
}

#[derive(Debug, Default)]
struct Block {
    name: String,
    items: HashMap<String, (usize, String)>,
    loops: Vec<Loop>,
}

#[derive(Debug)]
struct Loop {
    tags: Vec<String>,
    rows: Vec<Vec<String>>,
    line: usize,
}

impl Loop {
    fn column(&self, tag: &str) -> Option<usize> {
        self.tags.iter().position(|t| t == tag)
    }
}

impl Block {
    fn item(&self, tag: &str) -> Option<&str> {
        self.items
            .get(tag)
            .map(|(_, v)| v.as_str())
            .filter(|v| !is_null(v))
    }

    fn find_loop(&self, tag: &str) -> Option<&Loop> {
        self.loops.iter().find(|l| l.column(tag).is_some())
    }
}

fn is_null(v: &str) -> bool {
    v == "?" || v == "."
}

/// Reads the first data block.
fn read_block(tokens: &[(usize, Token)]) -> Result<Block> {
    let mut block = Block::default();
    let mut i = 0;
    let mut seen_data = false;
    while i < tokens.len() {
        let (line, tok) = &tokens[i];
        match tok {
            Token::Data(name) => {
                if seen_data {
                    break;
                }
                seen_data = true;
                block.name = name.clone();
                i += 1;
            }
            Token::Tag(tag) => {
                let Some((_, Token::Value(v))) = tokens.get(i + 1) else {
                    return Err(Error::MalformedCif {
                        line: *line,
                        reason: format!("tag {tag} has no value"),
                    });
                };
                block.items.insert(tag.clone(), (*line, v.clone()));
                i += 2;
            }
            Token::Loop => {
                let start_line = *line;
                i += 1;
                let mut tags = Vec::new();
                while let Some((_, Token::Tag(t))) = tokens.get(i) {
                    tags.push(t.clone());
                    i += 1;
                }
                let mut values = Vec::new();
                while let Some((_, Token::Value(v))) = tokens.get(i) {
                    values.push(v.clone());
                    i += 1;
                }
                if tags.is_empty() || values.len() % tags.len() != 0 {
                    return Err(Error::MalformedCif {
                        line: start_line,
                        reason: format!(
                            "loop with {} tags holds {} values",
                            tags.len(),
                            values.len()
                        ),
                    });
                }
                let rows = values.chunks(tags.len()).map(<[String]>::to_vec).collect();
                block.loops.push(Loop {
                    tags,
                    rows,
                    line: start_line,
                });
            }
            Token::Value(v) => {
                return Err(Error::MalformedCif {
                    line: *line,
                    reason: format!("unexpected value '{v}'"),
                });
            }
            Token::Other => i += 1,
        }
    }
    Ok(block)
}

/// Numeric CIF value with any parenthesized uncertainty removed: "5.4310(2)" → 5.431.
pub(crate) fn cif_number(v: &str) -> Option<f64> {
    let core = v.split('(').next()?;
    parse_f64(core)
}

const SYMOP_TAGS: [&str; 2] = [
    "_symmetry_equiv_pos_as_xyz",
    "_space_group_symop_operation_xyz",
];
const SPACE_GROUP_NAME_TAGS: [&str; 3] = [
    "_symmetry_space_group_name_h-m",
    "_space_group_name_h-m_alt",
    "_space_group_name_hall",
];
const SPACE_GROUP_NUMBER_TAGS: [&str; 2] = ["_symmetry_int_tables_number", "_space_group_it_number"];

fn symmetry_ops(block: &Block) -> Result<Vec<SymmetryOp>> {
    for tag in SYMOP_TAGS {
        if let Some(lp) = block.find_loop(tag) {
            let col = lp.column(tag).unwrap();
            return lp.rows.iter().map(|r| SymmetryOp::parse(&r[col])).collect();
        }
        if let Some(v) = block.item(tag) {
            return Ok(vec![SymmetryOp::parse(v)?]);
        }
    }
    // no operator list: only P1 can be taken at its word
    for tag in SPACE_GROUP_NAME_TAGS {
        if let Some(name) = block.item(tag) {
            let compact: String = name
                .chars()
                .filter(|c| !c.is_whitespace())
                .collect::<String>()
                .to_ascii_lowercase();
            if compact == "p1" {
                return Ok(vec![SymmetryOp::identity()]);
            }
            return Err(Error::UnsupportedSymmetry(name.to_string()));
        }
    }
    for tag in SPACE_GROUP_NUMBER_TAGS {
        if let Some(num) = block.item(tag) {
            if num.trim() == "1" {
                return Ok(vec![SymmetryOp::identity()]);
            }
            return Err(Error::UnsupportedSymmetry(num.to_string()));
        }
    }
    Ok(vec![SymmetryOp::identity()])
}

fn same_site(a: &Vec3, b: &Vec3) -> bool {
    (0..3).all(|i| {
        let d = a[i] - b[i];
        (d - d.round()).abs() < DEDUP_TOLERANCE
    })
}

/// All distinct images of `site` under `ops`, wrapped into [0, 1).
pub(crate) fn expand_site(site: &Vec3, ops: &[SymmetryOp]) -> Vec<Vec3> {
    let mut images: Vec<Vec3> = Vec::new();
    for op in ops {
        let img = op.apply(site).map(reduce);
        if !images.iter().any(|p| same_site(p, &img)) {
            images.push(img);
        }
    }
    images
}

pub fn parse_cif(bytes: &[u8]) -> Result<Structure> {
    let text = decode(bytes);
    let tokens = tokenize(&text)?;
    let block = read_block(&tokens)?;

    let param = |tag: &str| -> Result<f64> {
        let (line, raw) = block
            .items
            .get(tag)
            .ok_or_else(|| Error::MissingCell(tag.to_string()))?;
        cif_number(raw).ok_or_else(|| Error::MalformedCif {
            line: *line,
            reason: format!("{tag} is not a number: '{raw}'"),
        })
    };
    let lattice = lattice_from_parameters(
        param("_cell_length_a")?,
        param("_cell_length_b")?,
        param("_cell_length_c")?,
        param("_cell_angle_alpha")?,
        param("_cell_angle_beta")?,
        param("_cell_angle_gamma")?,
    )?;

    let sites = block.find_loop("_atom_site_fract_x").ok_or(Error::MissingSites)?;
    let col = |tag: &str| {
        sites.column(tag).ok_or_else(|| Error::MalformedCif {
            line: sites.line,
            reason: format!("atom-site loop lacks {tag}"),
        })
    };
    let (cx, cy, cz) = (
        col("_atom_site_fract_x")?,
        col("_atom_site_fract_y")?,
        col("_atom_site_fract_z")?,
    );
    let species_col = sites
        .column("_atom_site_type_symbol")
        .or_else(|| sites.column("_atom_site_label"))
        .ok_or_else(|| Error::MalformedCif {
            line: sites.line,
            reason: "atom-site loop has neither type_symbol nor label".into(),
        })?;
    let label_col = sites.column("_atom_site_label");
    if sites.rows.is_empty() {
        return Err(Error::MissingSites);
    }

    let ops = symmetry_ops(&block)?;
    let mut atoms = Vec::new();
    for row in &sites.rows {
        let coord = |c: usize| {
            cif_number(&row[c]).ok_or_else(|| Error::MalformedCif {
                line: sites.line,
                reason: format!("bad fractional coordinate '{}'", row[c]),
            })
        };
        let site = Vec3::new(coord(cx)?, coord(cy)?, coord(cz)?);
        let mut species = row[species_col].as_str();
        if is_null(species) {
            species = label_col.map(|c| row[c].as_str()).unwrap_or(species);
        }
        let element = element_lookup(species)?;
        for img in expand_site(&site, &ops) {
            atoms.push(Atom::new(species, element, lattice.frac_to_cart(&img)));
        }
    }
    Ok(Structure::new(atoms, Some(lattice), block.name))
}
