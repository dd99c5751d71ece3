use crate::error::{Error, Result};
use crate::model::{Lattice, Vec3};

/// Builds lattice vectors from cell parameters (Å, degrees) in the standard
/// orientation: a₁ along x, a₂ in the xy plane.
pub fn lattice_from_parameters(
    a: f64,
    b: f64,
    c: f64,
    alpha: f64,
    beta: f64,
    gamma: f64,
) -> Result<Lattice> {
    let lengths_ok = [a, b, c].iter().all(|&l| l.is_finite() && l > 0.0);
    let angles_ok = [alpha, beta, gamma]
        .iter()
        .all(|&t| t.is_finite() && t > 0.0 && t < 180.0);
    if !lengths_ok || !angles_ok {
        return Err(Error::DegenerateCell);
    }
    let (ca, cb, cg) = (
        alpha.to_radians().cos(),
        beta.to_radians().cos(),
        gamma.to_radians().cos(),
    );
    let sg = gamma.to_radians().sin();
    let arg = 1.0 - ca * ca - cb * cb - cg * cg + 2.0 * ca * cb * cg;
    if arg <= 0.0 {
        return Err(Error::DegenerateCell);
    }
    let a1 = Vec3::new(a, 0.0, 0.0);
    let a2 = Vec3::new(b * cg, b * sg, 0.0);
    let a3 = Vec3::new(c * cb, c * (ca - cb * cg) / sg, c * arg.sqrt() / sg);
    Lattice::from_vectors(a1, a2, a3).map_err(|_| Error::DegenerateCell)
}
