//! Coordinate conversion, supercells, bond detection and the measurement math
//! behind the structure-analysis panel.

mod bonds;
mod measure;
mod supercell;

pub use bonds::{detect_bonds, Bond, MIN_BOND_LENGTH};
pub use measure::{angle, dihedral, distance, measure_selection, MeasurementReport, PickedAtom};
pub use supercell::{make_supercell, parse_dims};

use crate::model::{Lattice, Vec3};

pub fn frac_to_cart(f: &Vec3, lattice: &Lattice) -> Vec3 {
    lattice.frac_to_cart(f)
}

pub fn cart_to_frac(c: &Vec3, lattice: &Lattice) -> Vec3 {
    lattice.cart_to_frac(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn lattice() -> Lattice {
        Lattice::new([[4.0, 0.0, 0.0], [1.0, 3.5, 0.0], [0.5, -0.7, 5.2]]).unwrap()
    }

    #[test]
    fn basis_vectors() {
        let l = lattice();
        assert_eq!(frac_to_cart(&Vec3::zeros(), &l), Vec3::zeros());
        assert_eq!(frac_to_cart(&Vec3::x(), &l), l.vector(0));
        assert_eq!(frac_to_cart(&Vec3::z(), &l), l.vector(2));
    }

    proptest! {
        #[test]
        fn frac_roundtrip(x in -2.0f64..2.0, y in -2.0f64..2.0, z in -2.0f64..2.0) {
            let l = lattice();
            let f = Vec3::new(x, y, z);
            let back = cart_to_frac(&frac_to_cart(&f, &l), &l);
            prop_assert!((back - f).amax() < 1e-12);
        }
    }
}
