//! Gaussian cube files.
//!
//! Header lengths are Bohr unless the voxel count on that axis is negative,
//! in which case they are Å; the first axis decides for the origin and atoms.
//! Everything is converted to Å on ingest.

use super::{decode, parse_f64};
use crate::element::element_by_number;
use crate::error::{Error, Result};
use crate::model::{Atom, Vec3, VolumetricGrid};
use crate::units::BOHR_TO_ANG;

fn bad(line: usize, reason: impl Into<String>) -> Error {
    Error::BadHeader {
        line,
        reason: reason.into(),
    }
}

fn count_and_vec(line_no: usize, line: Option<&str>) -> Result<(i64, Vec3, Vec<String>)> {
    let line = line.ok_or_else(|| bad(line_no, "file ends inside the header"))?;
    let toks: Vec<&str> = line.split_whitespace().collect();
    if toks.len() < 4 {
        return Err(bad(line_no, "expected an integer and three numbers"));
    }
    let n: i64 = toks[0]
        .parse()
        .map_err(|_| bad(line_no, format!("'{}' is not an integer", toks[0])))?;
    let mut v = Vec3::zeros();
    for i in 0..3 {
        v[i] = parse_f64(toks[i + 1]).ok_or_else(|| bad(line_no, "non-numeric vector component"))?;
    }
    Ok((n, v, toks[4..].iter().map(|s| s.to_string()).collect()))
}

pub fn parse_cube(bytes: &[u8]) -> Result<VolumetricGrid> {
    let text = decode(bytes);
    let mut lines = text.lines();
    let c1 = lines.next().ok_or_else(|| bad(1, "empty file"))?.trim().to_string();
    let c2 = lines.next().ok_or_else(|| bad(2, "missing second comment"))?.trim().to_string();

    let (natoms, origin, extra) = count_and_vec(3, lines.next())?;
    if let Some(nval) = extra.first() {
        match nval.parse::<i64>() {
            Ok(1) => {}
            Ok(m) if m > 1 => return Err(Error::MultiOrbitalUnsupported(m as usize)),
            _ => return Err(bad(3, format!("bad value count '{nval}'"))),
        }
    }
    let mut dims = [0usize; 3];
    let mut steps = [Vec3::zeros(); 3];
    let mut first_in_ang = false;
    for axis in 0..3 {
        let (n, v, _) = count_and_vec(4 + axis, lines.next())?;
        if n == 0 {
            return Err(bad(4 + axis, "zero grid points"));
        }
        let scale = if n < 0 { 1.0 } else { BOHR_TO_ANG };
        if axis == 0 {
            first_in_ang = n < 0;
        }
        dims[axis] = n.unsigned_abs() as usize;
        steps[axis] = v * scale;
    }
    let length = if first_in_ang { 1.0 } else { BOHR_TO_ANG };

    let mut atoms = Vec::with_capacity(natoms.unsigned_abs() as usize);
    for a in 0..natoms.unsigned_abs() as usize {
        let line_no = 7 + a;
        let line = lines.next().ok_or_else(|| bad(line_no, "file ends inside the atom list"))?;
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() < 5 {
            return Err(bad(line_no, "expected 'Z charge x y z'"));
        }
        let z = parse_f64(toks[0])
            .filter(|z| z.fract() == 0.0 && *z >= 1.0)
            .ok_or_else(|| bad(line_no, format!("bad atomic number '{}'", toks[0])))?;
        let element = element_by_number(z as u32).map_err(|_| bad(line_no, format!("unknown atomic number {z}")))?;
        let mut p = Vec3::zeros();
        for i in 0..3 {
            p[i] = parse_f64(toks[i + 2]).ok_or_else(|| bad(line_no, "non-numeric atom position"))?;
        }
        atoms.push(Atom::new(element.symbol, element, p * length));
    }

    let expected: usize = dims.iter().product();
    let mut rest = lines.flat_map(str::split_whitespace);
    if natoms < 0 {
        // dataset-id line: m id1 .. idm
        let m = rest
            .next()
            .and_then(|t| t.parse::<i64>().ok())
            .ok_or_else(|| bad(7 + atoms.len(), "missing dataset id line"))?;
        if m > 1 {
            return Err(Error::MultiOrbitalUnsupported(m as usize));
        }
        if m < 1 {
            return Err(bad(7 + atoms.len(), format!("bad dataset count {m}")));
        }
        rest.next().ok_or(Error::TruncatedData { expected, got: 0 })?;
    }

    let mut values = Vec::with_capacity(expected);
    for tok in rest.take(expected) {
        values.push(parse_f64(tok).ok_or_else(|| bad(0, format!("non-numeric voxel value '{tok}'")))?);
    }
    if values.len() < expected {
        return Err(Error::TruncatedData {
            expected,
            got: values.len(),
        });
    }
    let mut grid = VolumetricGrid::new(origin * length, steps, dims, values, atoms)?;
    grid.comments = [c1, c2];
    Ok(grid)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cube(natoms: i64, counts: [i64; 3], tail: &str) -> String {
        format!(
            "comment one\ncomment two\n{natoms} 0.0 0.0 0.0\n{} 1.0 0.0 0.0\n{} 0.0 1.0 0.0\n{} 0.0 0.0 1.0\n1 1.0 0.0 0.0 0.0\n{tail}",
            counts[0], counts[1], counts[2]
        )
    }

    #[test]
    fn two_by_two() {
        let g = parse_cube(cube(1, [2, 2, 2], "1 1 1 1 1 1 1 1\n").as_bytes()).unwrap();
        assert_eq!(g.dims, [2, 2, 2]);
        assert_eq!(g.values.len(), 8);
        assert_eq!(g.max_abs(), 1.0);
        assert_eq!(g.atoms.len(), 1);
        assert_eq!(g.atoms[0].element.symbol, "H");
        assert_eq!(g.steps[0].x, BOHR_TO_ANG);
        assert_eq!(g.comments[0], "comment one");
    }

    #[test]
    fn negative_counts_mean_angstrom() {
        let g = parse_cube(cube(1, [-2, -2, -2], "1 2 3 4 5 6 7 8\n").as_bytes()).unwrap();
        assert_eq!(g.dims, [2, 2, 2]);
        assert_eq!(g.steps[1].y, 1.0);
        // k runs fastest
        assert_eq!(g.value(0, 0, 1), 2.0);
        assert_eq!(g.value(1, 0, 0), 5.0);
    }

    #[test]
    fn dataset_id_line() {
        let g = parse_cube(cube(-1, [2, 2, 2], "1 7\n1 1 1 1 1 1 1 1\n").as_bytes()).unwrap();
        assert_eq!(g.values, vec![1.0; 8]);
        assert_eq!(
            parse_cube(cube(-1, [2, 2, 2], "2 1 2\n1 1 1 1 1 1 1 1\n").as_bytes()),
            Err(Error::MultiOrbitalUnsupported(2))
        );
    }

    #[test]
    fn truncated() {
        assert_eq!(
            parse_cube(cube(1, [2, 2, 2], "1 1 1\n").as_bytes()),
            Err(Error::TruncatedData {
                expected: 8,
                got: 3
            })
        );
    }

    #[test]
    fn bad_headers() {
        assert!(matches!(parse_cube(b"a\nb\n"), Err(Error::BadHeader { line: 3, .. })));
        assert!(matches!(
            parse_cube(cube(1, [2, 0, 2], "").as_bytes()),
            Err(Error::BadHeader { line: 5, .. })
        ));
        let text = cube(1, [2, 2, 2], "1 1 1 1 1 1 1 1\n").replace("1 1.0 0.0 0.0 0.0", "0 0.0 0.0 0.0 0.0");
        assert!(matches!(parse_cube(text.as_bytes()), Err(Error::BadHeader { line: 7, .. })));
    }
}
