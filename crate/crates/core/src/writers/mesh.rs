use std::fmt::Write;
use std::str::FromStr;

use crate::model::{MeshSign, TriangleMesh};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshFormat {
    Obj,
    Ply,
}

impl MeshFormat {
    /// Picks the format from a file name's extension.
    pub fn from_path(path: &str) -> Option<Self> {
        let ext = path.rsplit_once('.')?.1;
        ext.parse().ok()
    }
}

impl FromStr for MeshFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "obj" => Ok(MeshFormat::Obj),
            "ply" => Ok(MeshFormat::Ply),
            _ => Err(format!("unknown mesh format '{s}' (expected obj or ply)")),
        }
    }
}

fn group_name(sign: MeshSign) -> &'static str {
    match sign {
        MeshSign::Positive => "positive",
        MeshSign::Negative => "negative",
    }
}

pub fn write_mesh(meshes: &[&TriangleMesh], format: MeshFormat) -> String {
    match format {
        MeshFormat::Obj => write_obj(meshes),
        MeshFormat::Ply => write_ply(meshes),
    }
}

/// Wavefront OBJ; each mesh becomes a group named after its sign.
pub fn write_obj(meshes: &[&TriangleMesh]) -> String {
    let mut out = String::from("# isosurface mesh\n");
    let mut base = 0usize;
    for m in meshes {
        writeln!(out, "# isovalue {}", m.isovalue).unwrap();
        writeln!(out, "g {}", group_name(m.sign)).unwrap();
        for v in &m.vertices {
            writeln!(out, "v {:.6} {:.6} {:.6}", v[0], v[1], v[2]).unwrap();
        }
        for n in &m.normals {
            writeln!(out, "vn {:.6} {:.6} {:.6}", n[0], n[1], n[2]).unwrap();
        }
        for t in &m.triangles {
            let [a, b, c] = t.map(|i| i as usize + base + 1);
            writeln!(out, "f {a}//{a} {b}//{b} {c}//{c}").unwrap();
        }
        base += m.vertices.len();
    }
    out
}

/// ASCII PLY with all meshes concatenated; comments record each group's ranges.
pub fn write_ply(meshes: &[&TriangleMesh]) -> String {
    let nv: usize = meshes.iter().map(|m| m.vertices.len()).sum();
    let nf: usize = meshes.iter().map(|m| m.triangles.len()).sum();
    let mut out = String::from("ply\nformat ascii 1.0\n");
    let (mut v0, mut f0) = (0, 0);
    for m in meshes {
        writeln!(
            out,
            "comment group {} isovalue {} vertices {} {} faces {} {}",
            group_name(m.sign),
            m.isovalue,
            v0,
            m.vertices.len(),
            f0,
            m.triangles.len()
        )
        .unwrap();
        v0 += m.vertices.len();
        f0 += m.triangles.len();
    }
    writeln!(out, "element vertex {nv}").unwrap();
    out.push_str("property float x\nproperty float y\nproperty float z\n");
    out.push_str("property float nx\nproperty float ny\nproperty float nz\n");
    writeln!(out, "element face {nf}").unwrap();
    out.push_str("property list uchar int vertex_indices\nend_header\n");
    for m in meshes {
        for (v, n) in m.vertices.iter().zip(&m.normals) {
            writeln!(out, "{:.6} {:.6} {:.6} {:.6} {:.6} {:.6}", v[0], v[1], v[2], n[0], n[1], n[2]).unwrap();
        }
    }
    let mut base = 0usize;
    for m in meshes {
        for t in &m.triangles {
            let [a, b, c] = t.map(|i| i as usize + base);
            writeln!(out, "3 {a} {b} {c}").unwrap();
        }
        base += m.vertices.len();
    }
    out
}
