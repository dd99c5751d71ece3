use rayon::prelude::*;

use super::field::{cross, dir_index, dot, edge_point, sub, weld, EdgeKeys, IndexMesh, ScalarField};
use super::marching_cubes::{corner_values, CORNERS};

/// Six tetrahedra sharing the body diagonal from corner 0 to corner 6.
const TETS: [[usize; 4]; 6] = [
    [0, 6, 1, 2],
    [0, 6, 2, 3],
    [0, 6, 3, 7],
    [0, 6, 7, 4],
    [0, 6, 4, 5],
    [0, 6, 5, 1],
];

fn edge(a: usize, b: usize) -> ([usize; 3], usize) {
    let (ca, cb) = (CORNERS[a], CORNERS[b]);
    let low = [0, 1, 2].map(|x| ca[x].min(cb[x]));
    let d = [0, 1, 2].map(|x| ca[x].abs_diff(cb[x]));
    (low, dir_index(d))
}

/// Marching tetrahedra with the cube split along its main diagonal.
pub fn marching_tetrahedra(f: &ScalarField, iso: f64) -> IndexMesh {
    if !iso.is_finite() {
        return IndexMesh::default();
    }
    let cells = f.cells();
    let keys = EdgeKeys::new(cells);
    let slabs = (0..cells[0])
        .into_par_iter()
        .map(|i| {
            let mut out = Vec::new();
            for j in 0..cells[1] {
                for k in 0..cells[2] {
                    let v = corner_values(f, i, j, k);
                    if v.iter().all(|&x| x < iso) || v.iter().all(|&x| x >= iso) {
                        continue;
                    }
                    let at = |a: usize, b: usize| {
                        let (off, dir) = edge(a, b);
                        let p = [i + off[0], j + off[1], k + off[2]];
                        (keys.key(p, dir), edge_point(f, iso, p, dir).0)
                    };
                    for tet in TETS {
                        let (below, above): (Vec<usize>, Vec<usize>) =
                            tet.iter().partition(|&&c| v[c] < iso);
                        if below.is_empty() || above.is_empty() {
                            continue;
                        }
                        let centroid = |s: &[usize]| {
                            let mut c = [0.0; 3];
                            for &n in s {
                                for x in 0..3 {
                                    c[x] += CORNERS[n][x] as f64 / s.len() as f64;
                                }
                            }
                            c
                        };
                        let toward = sub(centroid(&below), centroid(&above));
                        let mut emit = |t: [(u64, [f64; 3]); 3]| {
                            let n = cross(sub(t[1].1, t[0].1), sub(t[2].1, t[0].1));
                            if dot(n, toward) < 0.0 {
                                out.push([t[0].0, t[2].0, t[1].0]);
                            } else {
                                out.push([t[0].0, t[1].0, t[2].0]);
                            }
                        };
                        match (below.len(), above.len()) {
                            (1, 3) => {
                                let b = below[0];
                                emit([at(b, above[0]), at(b, above[1]), at(b, above[2])]);
                            }
                            (3, 1) => {
                                let a = above[0];
                                emit([at(below[0], a), at(below[1], a), at(below[2], a)]);
                            }
                            _ => {
                                let (a, b, c, d) = (below[0], below[1], above[0], above[1]);
                                let (ac, ad, bd, bc) = (at(a, c), at(a, d), at(b, d), at(b, c));
                                emit([ac, ad, bd]);
                                emit([ac, bd, bc]);
                            }
                        }
                    }
                }
            }
            out
        })
        .collect();
    weld(f, iso, keys, slabs)
}
