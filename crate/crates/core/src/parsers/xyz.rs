//! XYZ frames: `N` / comment / N rows of `Symbol x y z [extra columns]`.
//!
//! The same frame layout backs OpenMX `.md` trajectories. Columns 5–7 are
//! read as velocity and 8–10 as force when present. A comment carrying
//! `Lattice="a1x a1y a1z a2x ... a3z"` (extended XYZ) gives the cell.

use std::sync::LazyLock;

use regex::Regex;

use super::{decode, parse_f64, parse_vec3};
use crate::element::element_lookup;
use crate::error::{Error, Result};
use crate::model::{Atom, Lattice, Structure, Trajectory, Vec3};

pub(crate) struct RawFrame {
    pub structure: Structure,
    pub energy: Option<f64>,
    pub time: Option<f64>,
}

static LATTICE_RE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r#"(?i)\blattice\s*=\s*"([^"]*)""#).unwrap());

const NUMBER: &str = r"([-+]?(?:\d+\.?\d*|\.\d+)(?:[eEdD][-+]?\d+)?)";

static ENERGY_RE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(&format!(r"(?i)(?:^|[^a-z_])energy\s*=\s*{NUMBER}")).unwrap());

static TIME_RE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(&format!(r"(?i)(?:^|[^a-z_])time\s*=\s*{NUMBER}")).unwrap());

/// Reads a numeric `key=value` pair out of a comment line.
pub(crate) fn scan_energy(comment: &str) -> Option<f64> {
    ENERGY_RE
        .captures(comment)
        .and_then(|c| parse_f64(c.get(1)?.as_str()))
}

pub(crate) fn scan_time(comment: &str) -> Option<f64> {
    TIME_RE
        .captures(comment)
        .and_then(|c| parse_f64(c.get(1)?.as_str()))
}

/// Splits an extended-XYZ lattice out of the comment.
fn split_lattice(comment: &str) -> std::result::Result<(Option<Lattice>, String), String> {
    let Some(caps) = LATTICE_RE.captures(comment) else {
        return Ok((None, comment.trim().to_string()));
    };
    let nums: Option<Vec<f64>> = caps[1].split_whitespace().map(parse_f64).collect();
    let nums = match nums {
        Some(v) if v.len() == 9 => v,
        _ => return Err("Lattice= needs 9 numbers".into()),
    };
    let lattice = Lattice::new([
        [nums[0], nums[1], nums[2]],
        [nums[3], nums[4], nums[5]],
        [nums[6], nums[7], nums[8]],
    ])
    .map_err(|e| e.to_string())?;
    let whole = caps.get(0).unwrap();
    let rest = format!("{}{}", &comment[..whole.start()], &comment[whole.end()..]);
    Ok((Some(lattice), rest.trim().to_string()))
}

/// Reads consecutive frames. `err(frame, line, reason)` builds the error.
pub(crate) fn read_frames(
    text: &str,
    err: impl Fn(usize, usize, String) -> Error,
) -> Result<Vec<RawFrame>> {
    let lines: Vec<&str> = text.lines().collect();
    let mut frames = Vec::new();
    let mut i = 0;
    loop {
        while i < lines.len() && lines[i].trim().is_empty() {
            i += 1;
        }
        if i >= lines.len() {
            break;
        }
        let frame_no = frames.len() + 1;
        let n: usize = lines[i]
            .trim()
            .parse()
            .map_err(|_| err(frame_no, i + 1, format!("expected atom count, found '{}'", lines[i].trim())))?;
        let comment_line = i + 1;
        let Some(comment) = lines.get(comment_line) else {
            return Err(err(frame_no, comment_line + 1, "missing comment line".into()));
        };
        let (lattice, comment_text) =
            split_lattice(comment).map_err(|r| err(frame_no, comment_line + 1, r))?;

        let mut atoms = Vec::with_capacity(n);
        for row in 0..n {
            let ln = comment_line + 1 + row;
            let Some(line) = lines.get(ln) else {
                return Err(err(
                    frame_no,
                    ln + 1,
                    format!("expected {n} atom rows, file ends after {row}"),
                ));
            };
            atoms.push(parse_row(line).map_err(|r| err(frame_no, ln + 1, r))?);
        }
        frames.push(RawFrame {
            energy: scan_energy(comment),
            time: scan_time(comment),
            structure: Structure::new(atoms, lattice, comment_text),
        });
        i = comment_line + 1 + n;
    }
    if frames.is_empty() {
        return Err(err(1, 1, "no frames".into()));
    }
    Ok(frames)
}

fn parse_row(line: &str) -> std::result::Result<Atom, String> {
    let toks: Vec<&str> = line.split_whitespace().collect();
    if toks.len() < 4 {
        return Err(format!("expected 'Symbol x y z', found '{}'", line.trim()));
    }
    let element = element_lookup(toks[0]).map_err(|e| e.to_string())?;
    let [x, y, z] = parse_vec3(&toks[1..4]).ok_or_else(|| format!("non-numeric coordinate in '{}'", line.trim()))?;
    let mut atom = Atom::new(toks[0], element, Vec3::new(x, y, z));
    if toks.len() >= 7 {
        atom.properties.velocity = parse_vec3(&toks[4..7]);
    }
    if toks.len() >= 10 {
        atom.properties.force = parse_vec3(&toks[7..10]);
    }
    Ok(atom)
}

pub(crate) fn into_trajectory(frames: Vec<RawFrame>) -> Result<Trajectory> {
    let mut structures = Vec::with_capacity(frames.len());
    let mut energies = Vec::with_capacity(frames.len());
    let mut times = Vec::with_capacity(frames.len());
    for f in frames {
        structures.push(f.structure);
        energies.push(f.energy);
        times.push(f.time);
    }
    Trajectory::new(structures, energies, times)
}

/// Parses one or more XYZ frames. Coordinates are Å.
pub fn parse_xyz(bytes: &[u8]) -> Result<Trajectory> {
    let text = decode(bytes);
    let frames = read_frames(&text, |_, line, reason| Error::MalformedXyz { line, reason })?;
    into_trajectory(frames)
}
