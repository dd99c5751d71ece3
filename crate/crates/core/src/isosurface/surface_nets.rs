use rayon::prelude::*;

use super::field::{crossing, normalize, repair_normals, IndexMesh, ScalarField};
use super::marching_cubes::{corner_values, CORNERS};

const CUBE_EDGES: [(usize, usize); 12] = [
    (0, 1),
    (1, 2),
    (3, 2),
    (0, 3),
    (4, 5),
    (5, 6),
    (7, 6),
    (4, 7),
    (0, 4),
    (1, 5),
    (2, 6),
    (3, 7),
];

const NONE: u32 = u32::MAX;

/// Vertex and normal for one sign-changing cell.
fn cell_vertex(f: &ScalarField, iso: f64, cell: [usize; 3], v: &[f64; 8]) -> ([f64; 3], [f64; 3]) {
    let mut sum = [0.0; 3];
    let mut n = 0.0;
    for &(a, b) in &CUBE_EDGES {
        if (v[a] < iso) != (v[b] < iso) {
            let t = crossing(v[a], v[b], iso);
            for x in 0..3 {
                sum[x] += CORNERS[a][x] as f64 + t * (CORNERS[b][x] as f64 - CORNERS[a][x] as f64);
            }
            n += 1.0;
        }
    }
    let local = sum.map(|s| s / n);
    let mut g = [0.0; 3];
    for off in CORNERS.iter() {
        let w: f64 = (0..3)
            .map(|x| if off[x] == 1 { local[x] } else { 1.0 - local[x] })
            .product();
        let gc = f.gradient([cell[0] + off[0], cell[1] + off[1], cell[2] + off[2]]);
        for x in 0..3 {
            g[x] -= w * gc[x];
        }
    }
    let pos = [0, 1, 2].map(|x| cell[x] as f64 + local[x]);
    (pos, normalize(g).unwrap_or([0.0; 3]))
}

/// Surface nets: one vertex per sign-changing cell, one quad per crossing
/// lattice edge whose four surrounding cells all exist.
pub fn surface_nets(f: &ScalarField, iso: f64) -> IndexMesh {
    if !iso.is_finite() {
        return IndexMesh::default();
    }
    let [cx, cy, cz] = f.cells();
    let slabs: Vec<Vec<(usize, [f64; 3], [f64; 3])>> = (0..cx)
        .into_par_iter()
        .map(|i| {
            let mut out = Vec::new();
            for j in 0..cy {
                for k in 0..cz {
                    let v = corner_values(f, i, j, k);
                    let below = v.iter().filter(|&&x| x < iso).count();
                    if below != 0 && below != 8 {
                        let (p, n) = cell_vertex(f, iso, [i, j, k], &v);
                        out.push(((i * cy + j) * cz + k, p, n));
                    }
                }
            }
            out
        })
        .collect();

    let mut cell_index = vec![NONE; cx * cy * cz];
    let mut mesh = IndexMesh::default();
    for (cell, p, n) in slabs.into_iter().flatten() {
        cell_index[cell] = mesh.vertices.len() as u32;
        mesh.vertices.push(p);
        mesh.normals.push(n);
    }

    let cell_at = |c: [isize; 3]| -> u32 {
        if (0..3).any(|x| c[x] < 0) || c[0] as usize >= cx || c[1] as usize >= cy || c[2] as usize >= cz {
            return NONE;
        }
        cell_index[(c[0] as usize * cy + c[1] as usize) * cz + c[2] as usize]
    };
    let quads: Vec<Vec<[u32; 3]>> = (0..=cx)
        .into_par_iter()
        .map(|i| {
            let mut out = Vec::new();
            for j in 0..=cy {
                for k in 0..=cz {
                    let p = [i, j, k];
                    let fp = f.value(i, j, k);
                    for axis in 0..3 {
                        let mut q = p;
                        q[axis] += 1;
                        if q[0] > cx || q[1] > cy || q[2] > cz {
                            continue;
                        }
                        let fq = f.value(q[0], q[1], q[2]);
                        if (fp < iso) == (fq < iso) {
                            continue;
                        }
                        // (u, v) follow axis cyclically so u × v = axis
                        let (u, v) = ((axis + 1) % 3, (axis + 2) % 3);
                        let pc = p.map(|x| x as isize);
                        let around = [(-1, -1), (0, -1), (0, 0), (-1, 0)].map(|(du, dv)| {
                            let mut c = pc;
                            c[u] += du;
                            c[v] += dv;
                            cell_at(c)
                        });
                        if around.contains(&NONE) {
                            continue;
                        }
                        let [a, b, c, d] = around;
                        if fp < iso {
                            // field rises along +axis; face the other way
                            out.push([a, c, b]);
                            out.push([a, d, c]);
                        } else {
                            out.push([a, b, c]);
                            out.push([a, c, d]);
                        }
                    }
                }
            }
            out
        })
        .collect();
    mesh.triangles = quads.into_iter().flatten().collect();
    repair_normals(&mut mesh);
    mesh
}
