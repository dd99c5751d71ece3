//! Text serializers for structures, meshes, band tables and cube grids.

mod band_table;
mod cube;
mod mesh;
mod structure;

pub use band_table::write_band_table;
pub use cube::write_cube;
pub use mesh::{write_mesh, write_obj, write_ply, MeshFormat};
pub use structure::{write_structure, StructureFormat};
