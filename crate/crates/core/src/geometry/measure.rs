use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Structure, Vec3};

pub fn distance(p1: &Vec3, p2: &Vec3) -> f64 {
    (p1 - p2).norm()
}

/// Angle p1–p2–p3 at vertex p2, degrees in [0, 180].
pub fn angle(p1: &Vec3, p2: &Vec3, p3: &Vec3) -> Result<f64> {
    let (u, v) = (p1 - p2, p3 - p2);
    let (nu, nv) = (u.norm(), v.norm());
    if nu == 0.0 || nv == 0.0 {
        return Err(Error::DegenerateGeometry("zero-length angle arm".into()));
    }
    Ok((u.dot(&v) / (nu * nv)).clamp(-1.0, 1.0).acos().to_degrees())
}

/// Signed dihedral p1–p2–p3–p4 in (−180, 180], right-hand rule about p2→p3.
pub fn dihedral(p1: &Vec3, p2: &Vec3, p3: &Vec3, p4: &Vec3) -> Result<f64> {
    let b1 = p2 - p1;
    let b2 = p3 - p2;
    let b3 = p4 - p3;
    if b1.norm() == 0.0 || b2.norm() == 0.0 || b3.norm() == 0.0 {
        return Err(Error::DegenerateGeometry("zero-length bond vector".into()));
    }
    let n1 = b1.cross(&b2);
    let n2 = b2.cross(&b3);
    let tol = 1e-10;
    if n1.norm() <= tol * b1.norm() * b2.norm() || n2.norm() <= tol * b2.norm() * b3.norm() {
        return Err(Error::DegenerateGeometry("three consecutive atoms are collinear".into()));
    }
    let y = b2.norm() * b1.dot(&n2);
    let x = n1.dot(&n2);
    let d = y.atan2(x).to_degrees();
    Ok(if d <= -180.0 { d + 360.0 } else { d })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PickedAtom {
    pub serial: usize,
    pub species: String,
    pub element: &'static str,
    pub position: [f64; 3],
}

/// Distances (1-2, 2-3, 3-4), angles (1-2-3, 2-3-4) and the 1-2-3-4 dihedral
/// for up to four picked atoms.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasurementReport {
    pub picked: Vec<PickedAtom>,
    pub distances: Vec<f64>,
    pub angles: Vec<f64>,
    pub dihedral: Option<f64>,
    /// Why the dihedral is missing when four atoms were picked.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dihedral_note: Option<String>,
}

/// `picks` are 0-based atom indices in pick order.
pub fn measure_selection(s: &Structure, picks: &[usize]) -> Result<MeasurementReport> {
    if picks.is_empty() || picks.len() > 4 {
        return Err(Error::BadSelection(picks.len()));
    }
    for (n, &p) in picks.iter().enumerate() {
        let atom = s.atoms.get(p).ok_or(Error::BadIndex(p))?;
        if picks[..n].contains(&p) {
            return Err(Error::DuplicatePick(atom.serial));
        }
    }
    let pos: Vec<Vec3> = picks.iter().map(|&p| s.atoms[p].position).collect();
    let picked = picks
        .iter()
        .map(|&p| {
            let a = &s.atoms[p];
            PickedAtom {
                serial: a.serial,
                species: a.species.clone(),
                element: a.element.symbol,
                position: [a.position.x, a.position.y, a.position.z],
            }
        })
        .collect();
    let distances = pos.windows(2).map(|w| distance(&w[0], &w[1])).collect();
    let angles = pos
        .windows(3)
        .map(|w| angle(&w[0], &w[1], &w[2]))
        .collect::<Result<Vec<_>>>()?;
    let (dihedral, dihedral_note) = if pos.len() == 4 {
        match dihedral(&pos[0], &pos[1], &pos[2], &pos[3]) {
            Ok(d) => (Some(d), None),
            Err(Error::DegenerateGeometry(reason)) => (None, Some(reason)),
            Err(e) => return Err(e),
        }
    } else {
        (None, None)
    };
    Ok(MeasurementReport {
        picked,
        distances,
        angles,
        dihedral,
        dihedral_note,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::element::element_lookup;
    use crate::model::Atom;

    fn v(x: f64, y: f64, z: f64) -> Vec3 {
        Vec3::new(x, y, z)
    }

    #[test]
    fn collinear_angle() {
        assert!((angle(&v(-1., 0., 0.), &v(0., 0., 0.), &v(2., 0., 0.)).unwrap() - 180.0).abs() < 1e-12);
    }

    #[test]
    fn tetrahedral_angle() {
        let c = v(0., 0., 0.);
        let h1 = v(1., 1., 1.);
        let h2 = v(1., -1., -1.);
        let want = (-1.0f64 / 3.0).acos().to_degrees();
        assert!((angle(&h1, &c, &h2).unwrap() - want).abs() < 1e-12);
        assert!((want - 109.4712206).abs() < 1e-6);
    }

    #[test]
    fn planar_dihedrals() {
        let trans = dihedral(&v(1., 1., 0.), &v(0., 0., 0.), &v(0., 0., 1.), &v(-1., -1., 1.)).unwrap();
        assert!((trans - 180.0).abs() < 1e-12);
        let cis = dihedral(&v(1., 1., 0.), &v(0., 0., 0.), &v(0., 0., 1.), &v(1., 1., 1.)).unwrap();
        assert!(cis.abs() < 1e-12);
        let gauche = dihedral(&v(1., 0., 0.), &v(0., 0., 0.), &v(0., 0., 1.), &v(0., 1., 1.)).unwrap();
        assert!((gauche - 90.0).abs() < 1e-12 || (gauche + 90.0).abs() < 1e-12);
        let mirror = dihedral(&v(1., 0., 0.), &v(0., 0., 0.), &v(0., 0., -1.), &v(0., 1., -1.)).unwrap();
        assert!((mirror + gauche).abs() < 1e-12);
    }

    #[test]
    fn trans_with_negative_zero_stays_positive() {
        // y evaluates to -0.0 here
        let d = dihedral(&v(0., 1., 0.), &v(0., 0., 0.), &v(1., 0., 0.), &v(1., -1., 0.)).unwrap();
        assert_eq!(d, 180.0);
    }

    #[test]
    fn degenerate() {
        let p = v(0., 0., 0.);
        assert!(angle(&p, &p, &v(1., 0., 0.)).is_err());
        assert!(matches!(
            dihedral(&v(0., 0., 0.), &v(1., 0., 0.), &v(2., 0., 0.), &v(2., 1., 0.)),
            Err(Error::DegenerateGeometry(_))
        ));
    }

    fn chain(points: &[Vec3]) -> Structure {
        let c = element_lookup("C").unwrap();
        Structure::new(points.iter().map(|p| Atom::new("C", c, *p)).collect(), None, "")
    }

    #[test]
    fn count_rules() {
        let s = chain(&[v(0., 0., 0.), v(1.5, 0., 0.), v(1.5, 1.5, 0.), v(1.5, 1.5, 1.5)]);
        let r = measure_selection(&s, &[0, 1]).unwrap();
        assert_eq!((r.distances.len(), r.angles.len(), r.dihedral), (1, 0, None));
        let r = measure_selection(&s, &[2]).unwrap();
        assert_eq!((r.distances.len(), r.angles.len()), (0, 0));
        let r = measure_selection(&s, &[0, 1, 2, 3]).unwrap();
        assert_eq!((r.distances.len(), r.angles.len()), (3, 2));
        assert!(r.dihedral.is_some());
        assert_eq!(r.picked[3].serial, 4);
    }

    #[test]
    fn collinear_four_has_reason() {
        let s = chain(&[v(0., 0., 0.), v(1., 0., 0.), v(2., 0., 0.), v(3., 0., 0.)]);
        let r = measure_selection(&s, &[0, 1, 2, 3]).unwrap();
        assert_eq!(r.dihedral, None);
        assert!(r.dihedral_note.is_some());
        assert_eq!(r.angles, vec![180.0, 180.0]);
    }

    #[test]
    fn selection_errors() {
        let s = chain(&[v(0., 0., 0.), v(1., 0., 0.)]);
        assert_eq!(measure_selection(&s, &[0, 0]), Err(Error::DuplicatePick(1)));
        assert_eq!(measure_selection(&s, &[0, 7]), Err(Error::BadIndex(7)));
        assert_eq!(measure_selection(&s, &[]), Err(Error::BadSelection(0)));
    }
}
