//! OpenMX `.Band` files.
//!
//! ```text
//! n_bands spin_switch chem_potential
//! 9 reciprocal-vector components (Bohr⁻¹, rows)
//! n_segments
//! n_points k_start(3) k_end(3) label_start label_end      (per segment)
//! n_bands kx ky kz                                         (per k-point, per spin)
//! e_1 ... e_n_bands                                        (may wrap over lines)
//! ```
//!
//! Everything after the header is read as a token stream, so eigenvalue
//! rows may be wrapped arbitrarily.

use super::{decode, parse_f64};
use crate::error::{Error, Result};
use crate::model::{BandData, BandSegment, KPointRecord};

struct Tokens<'a> {
    toks: Vec<(usize, &'a str)>,
    pos: usize,
}

impl<'a> Tokens<'a> {
    fn new(text: &'a str) -> Self {
        let toks = text
            .lines()
            .enumerate()
            .flat_map(|(i, l)| l.split_whitespace().map(move |t| (i + 1, t)))
            .collect();
        Self { toks, pos: 0 }
    }

    fn next(&mut self, what: &str) -> Result<(usize, &'a str)> {
        let t = self
            .toks
            .get(self.pos)
            .copied()
            .ok_or_else(|| Error::TruncatedBand(format!("file ends before {what}")))?;
        self.pos += 1;
        Ok(t)
    }

    fn float(&mut self, what: &str) -> Result<f64> {
        let (line, t) = self.next(what)?;
        parse_f64(t).ok_or_else(|| Error::TruncatedBand(format!("line {line}: {what} is not a number: '{t}'")))
    }

    fn int(&mut self, what: &str) -> Result<(usize, i64)> {
        let (line, t) = self.next(what)?;
        t.parse::<i64>()
            .map(|v| (line, v))
            .map_err(|_| Error::TruncatedBand(format!("line {line}: {what} is not an integer: '{t}'")))
    }

    fn count(&mut self, what: &str) -> Result<(usize, usize)> {
        let (line, v) = self.int(what)?;
        usize::try_from(v)
            .map(|v| (line, v))
            .map_err(|_| Error::TruncatedBand(format!("line {line}: negative {what}")))
    }

    fn vec3(&mut self, what: &str) -> Result<[f64; 3]> {
        Ok([self.float(what)?, self.float(what)?, self.float(what)?])
    }

    fn label(&mut self, what: &str) -> Result<String> {
        let (_, t) = self.next(what)?;
        Ok(t.trim_matches(['\'', '"']).to_string())
    }
}

pub fn parse_band(bytes: &[u8]) -> Result<BandData> {
    let text = decode(bytes);
    let mut t = Tokens::new(&text);

    let (_, n_bands) = t.count("band count")?;
    let (_, spin_switch) = t.int("spin switch")?;
    let spin_channels = match spin_switch {
        0 => 1,
        1 => 2,
        other => return Err(Error::UnsupportedSpin(other)),
    };
    let chem_potential = t.float("chemical potential")?;
    let mut reciprocal = [[0.0; 3]; 3];
    for row in reciprocal.iter_mut() {
        *row = t.vec3("reciprocal vectors")?;
    }

    let (_, n_segments) = t.count("segment count")?;
    let mut segments = Vec::with_capacity(n_segments);
    for s in 0..n_segments {
        let what = format!("segment {} line", s + 1);
        let (_, n_points) = t.count(&what)?;
        segments.push(BandSegment {
            n_points,
            k_start: t.vec3(&what)?,
            k_end: t.vec3(&what)?,
            label_start: t.label(&what)?,
            label_end: t.label(&what)?,
        });
    }

    let mut records = Vec::with_capacity(n_segments);
    for (s, seg) in segments.iter().enumerate() {
        let mut recs = Vec::with_capacity(seg.n_points);
        for p in 0..seg.n_points {
            let what = format!("segment {} k-point {}", s + 1, p + 1);
            let mut k = [0.0; 3];
            let mut eigenvalues = Vec::with_capacity(spin_channels);
            for _ in 0..spin_channels {
                let (line, n) = t.count(&what)?;
                if n != n_bands {
                    return Err(Error::BandCountMismatch {
                        line,
                        expected: n_bands,
                        found: n,
                    });
                }
                k = t.vec3(&what)?;
                let values = (0..n_bands)
                    .map(|_| t.float(&what))
                    .collect::<Result<Vec<f64>>>()?;
                eigenvalues.push(values);
            }
            recs.push(KPointRecord { k, eigenvalues });
        }
        records.push(recs);
    }

    let band = BandData {
        n_bands,
        spin_channels,
        chem_potential,
        reciprocal,
        segments,
        records,
    };
    band.validate()?;
    Ok(band)
}
