use serde::Serialize;

use super::parse_f64;
use crate::error::{Error, Result};

/// Bytes of the file head that detection looks at.
pub const HEAD_LEN: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FormatKind {
    Xyz,
    XyzMulti,
    Cif,
    OpenmxDat,
    OpenmxMd,
    Cube,
    Band,
}

impl FormatKind {
    pub fn name(self) -> &'static str {
        match self {
            FormatKind::Xyz => "xyz",
            FormatKind::XyzMulti => "xyz_multi",
            FormatKind::Cif => "cif",
            FormatKind::OpenmxDat => "openmx_dat",
            FormatKind::OpenmxMd => "openmx_md",
            FormatKind::Cube => "cube",
            FormatKind::Band => "band",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Confidence {
    ByExtension,
    ByContent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DetectedFormat {
    pub kind: FormatKind,
    pub confidence: Confidence,
}

/// Picks a format from the file extension when the content agrees with it,
/// otherwise from content alone.
pub fn detect_format(filename: &str, head: &[u8]) -> Result<DetectedFormat> {
    let head = &head[..head.len().min(HEAD_LEN)];
    let text = String::from_utf8_lossy(head);
    let lines: Vec<&str> = text.lines().collect();

    let by_ext = extension_kind(filename).map(|k| refine_xyz(k, &lines));
    if let Some(kind) = by_ext {
        if content_matches(kind, &text, &lines) {
            return Ok(DetectedFormat {
                kind,
                confidence: Confidence::ByExtension,
            });
        }
    }
    if let Some(kind) = sniff(&text, &lines) {
        return Ok(DetectedFormat {
            kind,
            confidence: Confidence::ByContent,
        });
    }
    by_ext
        .map(|kind| DetectedFormat {
            kind,
            confidence: Confidence::ByExtension,
        })
        .ok_or(Error::UnknownFormat)
}

fn extension_kind(filename: &str) -> Option<FormatKind> {
    let ext = filename.rsplit_once('.')?.1.to_ascii_lowercase();
    Some(match ext.as_str() {
        "xyz" => FormatKind::Xyz,
        "cif" => FormatKind::Cif,
        "dat" => FormatKind::OpenmxDat,
        "md" => FormatKind::OpenmxMd,
        "cube" | "cub" => FormatKind::Cube,
        "band" => FormatKind::Band,
        _ => return None,
    })
}

fn refine_xyz(kind: FormatKind, lines: &[&str]) -> FormatKind {
    if kind == FormatKind::Xyz && xyz_frames_in_head(lines) > 1 {
        FormatKind::XyzMulti
    } else {
        kind
    }
}

fn content_matches(kind: FormatKind, text: &str, lines: &[&str]) -> bool {
    match kind {
        FormatKind::Xyz | FormatKind::XyzMulti | FormatKind::OpenmxMd => looks_like_xyz(lines),
        FormatKind::Cif => looks_like_cif(lines),
        FormatKind::OpenmxDat => looks_like_openmx_dat(text),
        FormatKind::Cube => looks_like_cube(lines),
        FormatKind::Band => looks_like_band(lines),
    }
}

fn sniff(text: &str, lines: &[&str]) -> Option<FormatKind> {
    if looks_like_cif(lines) {
        Some(FormatKind::Cif)
    } else if looks_like_openmx_dat(text) {
        Some(FormatKind::OpenmxDat)
    } else if looks_like_cube(lines) {
        Some(FormatKind::Cube)
    } else if looks_like_band(lines) {
        Some(FormatKind::Band)
    } else if looks_like_xyz(lines) {
        Some(refine_xyz(FormatKind::Xyz, lines))
    } else {
        None
    }
}

fn tokens(line: &str) -> Vec<&str> {
    line.split_whitespace().collect()
}

fn is_int(tok: &str) -> bool {
    tok.parse::<i64>().is_ok()
}

fn all_floats(toks: &[&str]) -> bool {
    toks.iter().all(|t| parse_f64(t).is_some())
}

fn looks_like_cif(lines: &[&str]) -> bool {
    lines.iter().any(|l| {
        let l = l.trim_start().to_ascii_lowercase();
        l.starts_with("data_") || l.starts_with("_cell_length_")
    })
}

fn looks_like_openmx_dat(text: &str) -> bool {
    text.lines().any(|l| {
        l.split_whitespace()
            .next()
            .is_some_and(|t| t.eq_ignore_ascii_case("atoms.number"))
    })
}

/// int + three floats (optionally one more integer)
fn count_and_vector(line: &str) -> bool {
    let t = tokens(line);
    (t.len() == 4 || t.len() == 5) && is_int(t[0]) && all_floats(&t[1..4])
}

fn looks_like_cube(lines: &[&str]) -> bool {
    lines.len() >= 6
        && (2..6).all(|i| count_and_vector(lines[i]))
        && tokens(lines[3]).len() == 4
}

fn looks_like_band(lines: &[&str]) -> bool {
    if lines.len() < 3 {
        return false;
    }
    let first = tokens(lines[0]);
    let second = tokens(lines[1]);
    let third = tokens(lines[2]);
    first.len() == 3
        && is_int(first[0])
        && is_int(first[1])
        && parse_f64(first[2]).is_some()
        && second.len() == 9
        && all_floats(&second)
        && third.len() == 1
        && is_int(third[0])
}

fn xyz_row(line: &str) -> bool {
    let t = tokens(line);
    t.len() >= 4
        && t[0].chars().next().is_some_and(|c| c.is_ascii_alphanumeric())
        && all_floats(&t[1..4])
}

fn looks_like_xyz(lines: &[&str]) -> bool {
    let mut it = lines.iter().skip_while(|l| l.trim().is_empty());
    let Some(Ok(n)) = it.next().map(|l| l.trim().parse::<usize>()) else {
        return false;
    };
    // comment line must exist; the first row must look like an atom if present
    if it.next().is_none() {
        return false;
    }
    match it.next() {
        Some(row) => n == 0 || xyz_row(row),
        None => n == 0,
    }
}

/// Number of complete or started frames visible in the head.
fn xyz_frames_in_head(lines: &[&str]) -> usize {
    let mut frames = 0;
    let mut i = 0;
    loop {
        while i < lines.len() && lines[i].trim().is_empty() {
            i += 1;
        }
        let Some(n) = lines.get(i).and_then(|l| l.trim().parse::<usize>().ok()) else {
            return frames;
        };
        frames += 1;
        i += n + 2;
        if i >= lines.len() {
            return frames;
        }
    }
}
