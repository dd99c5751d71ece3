//! Unit conversion constants. Every conversion in the crate routes through these.

/// Å per Bohr.
pub const BOHR_TO_ANG: f64 = 0.529177210903;

/// eV per Hartree.
pub const HARTREE_TO_EV: f64 = 27.211386245988;

#[inline]
pub fn bohr_to_ang(x: f64) -> f64 {
    x * BOHR_TO_ANG
}

#[inline]
pub fn ang_to_bohr(x: f64) -> f64 {
    x / BOHR_TO_ANG
}

#[inline]
pub fn hartree_to_ev(e: f64) -> f64 {
    e * HARTREE_TO_EV
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn bohr_roundtrip(x in -1.0e6f64..1.0e6) {
            let back = ang_to_bohr(bohr_to_ang(x));
            prop_assert!((back - x).abs() <= 1e-12 * x.abs().max(1e-300));
        }
    }

    #[test]
    fn one_hartree() {
        assert_eq!(hartree_to_ev(1.0), 27.211386245988);
    }
}
