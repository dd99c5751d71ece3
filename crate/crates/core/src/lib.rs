//! Crystalline and molecular structure toolkit.
//!
//! Reads XYZ, CIF, OpenMX (`.dat`, `.md`, `.Band`) and Gaussian cube files,
//! builds supercells, finds bonds, measures distances/angles/dihedrals,
//! extracts isosurfaces from volumetric data and assembles band plots.
//!
//! Lengths are stored in Å and energies in Hartree throughout; conversions
//! go through [`units`].

pub mod band;
pub mod element;
pub mod error;
pub mod geometry;
pub mod isosurface;
pub mod model;
pub mod parsers;
pub mod units;
pub mod writers;

pub use element::{element_by_number, element_lookup, Element};
pub use error::{Error, Result};
pub use model::{
    Vec3, Atom, AtomProperties, BandData, BandSegment, KPointRecord, Lattice, MeshSign, Structure,
    Trajectory, TriangleMesh, VolumetricGrid,
};
