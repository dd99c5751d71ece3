use crate::error::{Error, Result};
use crate::model::{Atom, Structure, Vec3};

/// Replicates the cell `n[0]×n[1]×n[2]` times.
///
/// Atoms are emitted in (original atom, p, q, r) lexicographic order and
/// renumbered 1..N; per-atom properties are copied.
pub fn make_supercell(s: &Structure, n: [usize; 3]) -> Result<Structure> {
    let lattice = s.lattice()?;
    if n.contains(&0) {
        return Err(Error::BadSupercell);
    }
    let (a, b, c) = (lattice.vector(0), lattice.vector(1), lattice.vector(2));
    let mut atoms = Vec::with_capacity(s.len() * n.iter().product::<usize>());
    for atom in &s.atoms {
        for p in 0..n[0] {
            for q in 0..n[1] {
                for r in 0..n[2] {
                    let shift: Vec3 = a * p as f64 + b * q as f64 + c * r as f64;
                    atoms.push(Atom {
                        position: atom.position + shift,
                        ..atom.clone()
                    });
                }
            }
        }
    }
    Ok(Structure::new(atoms, Some(lattice.scaled(n)), s.comment.clone()))
}

/// Reads "AxBxC" (also accepts `×`, `*` or commas).
pub fn parse_dims(text: &str) -> Option<[usize; 3]> {
    let parts: Vec<&str> = text
        .split(['x', 'X', '×', '*', ','])
        .map(str::trim)
        .collect();
    if parts.len() != 3 {
        return None;
    }
    let mut out = [0usize; 3];
    for (o, p) in out.iter_mut().zip(parts) {
        *o = p.parse().ok().filter(|&v| v > 0)?;
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::element::element_lookup;
    use crate::model::Lattice;

    fn cell() -> Structure {
        let si = element_lookup("Si").unwrap();
        let l = Lattice::new([[2.0, 0.0, 0.0], [0.0, 3.0, 0.0], [0.0, 0.0, 4.0]]).unwrap();
        let mut a = Atom::new("Si", si, Vec3::new(0.1, 0.2, 0.3));
        a.properties.spin = Some(0.5);
        let b = Atom::new("Si", si, Vec3::new(1.0, 1.0, 1.0));
        Structure::new(vec![a, b], Some(l), "cell")
    }

    #[test]
    fn identity() {
        let s = cell();
        assert_eq!(make_supercell(&s, [1, 1, 1]).unwrap(), s);
    }

    #[test]
    fn ordering_and_properties() {
        let s = make_supercell(&cell(), [2, 1, 2]).unwrap();
        assert_eq!(s.len(), 8);
        assert_eq!(s.lattice.as_ref().unwrap().lengths(), [4.0, 3.0, 8.0]);
        let serials: Vec<usize> = s.atoms.iter().map(|a| a.serial).collect();
        assert_eq!(serials, (1..=8).collect::<Vec<_>>());
        // (atom 0, p=0, q=0, r=1) is second
        assert!((s.atoms[1].position - Vec3::new(0.1, 0.2, 4.3)).norm() < 1e-12);
        assert!((s.atoms[2].position - Vec3::new(2.1, 0.2, 0.3)).norm() < 1e-12);
        assert!(s.atoms[..4].iter().all(|a| a.properties.spin == Some(0.5)));
        assert!(s.atoms[4..].iter().all(|a| a.properties.spin.is_none()));
    }

    #[test]
    fn errors() {
        let mut molecule = cell();
        molecule.lattice = None;
        assert_eq!(make_supercell(&molecule, [2, 2, 2]), Err(Error::NeedsLattice));
        assert_eq!(make_supercell(&cell(), [0, 1, 1]), Err(Error::BadSupercell));
    }

    #[test]
    fn dims_text() {
        assert_eq!(parse_dims("5x5x5"), Some([5, 5, 5]));
        assert_eq!(parse_dims("2×1×3"), Some([2, 1, 3]));
        assert_eq!(parse_dims("1,2,3"), Some([1, 2, 3]));
        assert_eq!(parse_dims("0x1x1"), None);
        assert_eq!(parse_dims("2x2"), None);
    }
}
