//! Isosurface extraction from volumetric grids.
//!
//! Meshes are built in grid-index space by one of three algorithms and then
//! mapped to Cartesian space through the voxel step vectors. Both the
//! positive (`f = +iso`) and negative (`f = −iso`) surfaces can be produced.

mod field;
mod marching_cubes;
mod marching_tetrahedra;
mod surface_nets;
mod tables;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{MeshSign, TriangleMesh, Vec3, VolumetricGrid};

pub use field::{IndexMesh, ScalarField};
pub use marching_cubes::marching_cubes;
pub use marching_tetrahedra::marching_tetrahedra;
pub use surface_nets::surface_nets;

/// Delay between evolution ticks when none is given, seconds.
pub const DEFAULT_EVOLUTION_DELAY: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    #[default]
    Mc,
    Mt,
    Sn,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Mc => "mc",
            Algorithm::Mt => "mt",
            Algorithm::Sn => "sn",
        }
    }

    pub fn run(self, f: &ScalarField, iso: f64) -> IndexMesh {
        match self {
            Algorithm::Mc => marching_cubes(f, iso),
            Algorithm::Mt => marching_tetrahedra(f, iso),
            Algorithm::Sn => surface_nets(f, iso),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "mc" => Ok(Algorithm::Mc),
            "mt" => Ok(Algorithm::Mt),
            "sn" => Ok(Algorithm::Sn),
            _ => Err(format!("unknown algorithm '{s}' (expected mc, mt or sn)")),
        }
    }
}

/// Largest absolute value divided by 200.
pub fn default_isovalue(g: &VolumetricGrid) -> Result<f64> {
    if g.values.is_empty() {
        return Err(Error::EmptyGrid);
    }
    Ok(g.max_abs() / 200.0)
}

/// Maps an index-space mesh onto the grid's Cartesian frame.
pub fn transform_mesh(m: &IndexMesh, g: &VolumetricGrid, isovalue: f64, sign: MeshSign) -> Result<TriangleMesh> {
    let inv_t = g.inverse_steps()?.transpose();
    let v = g.step_matrix();
    let flip = v.determinant() < 0.0;
    let vertices = m
        .vertices
        .iter()
        .map(|p| {
            let c = g.origin + v * Vec3::new(p[0], p[1], p[2]);
            [c.x, c.y, c.z]
        })
        .collect();
    let normals = m
        .normals
        .iter()
        .map(|n| {
            let t = inv_t * Vec3::new(n[0], n[1], n[2]);
            let len = t.norm();
            if len > 0.0 && len.is_finite() {
                [t.x / len, t.y / len, t.z / len]
            } else {
                [0.0, 0.0, 1.0]
            }
        })
        .collect();
    let triangles = m
        .triangles
        .iter()
        .map(|&[a, b, c]| if flip { [a, c, b] } else { [a, b, c] })
        .collect();
    Ok(TriangleMesh {
        vertices,
        normals,
        triangles,
        isovalue,
        sign,
    })
}

/// One surface of a periodic, tiled grid: `f = iso` for the positive sign,
/// `−f = iso` for the negative one.
pub fn extract(
    g: &VolumetricGrid,
    iso: f64,
    algorithm: Algorithm,
    supercell: [usize; 3],
    sign: MeshSign,
) -> Result<TriangleMesh> {
    if !(iso > 0.0 && iso.is_finite()) {
        return Err(Error::BadIsovalue(iso));
    }
    let field = ScalarField::periodic(g, supercell)?;
    let field = match sign {
        MeshSign::Positive => field,
        MeshSign::Negative => field.negated(),
    };
    transform_mesh(&algorithm.run(&field, iso), g, iso, sign)
}

/// The positive and negative surfaces at ±iso.
pub fn extract_pair(
    g: &VolumetricGrid,
    iso: f64,
    algorithm: Algorithm,
    supercell: [usize; 3],
) -> Result<(TriangleMesh, TriangleMesh)> {
    let (pos, neg) = rayon::join(
        || extract(g, iso, algorithm, supercell, MeshSign::Positive),
        || extract(g, iso, algorithm, supercell, MeshSign::Negative),
    );
    Ok((pos?, neg?))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Evolution {
    pub isovalue: f64,
    /// +1 raises the isovalue, −1 lowers it.
    pub direction: i8,
    /// Seconds between ticks.
    pub delay: f64,
    pub step: f64,
}

impl Evolution {
    /// Starts at the default isovalue with a step of a tenth of it.
    pub fn for_grid(g: &VolumetricGrid) -> Result<Self> {
        let iso = default_isovalue(g)?;
        Ok(Self {
            isovalue: iso,
            direction: 1,
            delay: DEFAULT_EVOLUTION_DELAY,
            step: iso / 10.0,
        })
    }
}

/// Next isovalue of an evolution run, kept in `(0, max_abs]`. A step that
/// would reach zero or below leaves the isovalue unchanged.
pub fn evolve_isovalue(state: &Evolution, max_abs: f64) -> f64 {
    let dir = if state.direction < 0 { -1.0 } else { 1.0 };
    let next = state.isovalue + dir * state.step.abs();
    if next <= 0.0 {
        state.isovalue
    } else {
        next.min(max_abs)
    }
}
