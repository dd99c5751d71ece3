use rayon::prelude::*;

use super::field::{weld, EdgeKeys, IndexMesh, ScalarField};
use super::tables::TRI_TABLE;

pub(crate) const CORNERS: [[usize; 3]; 8] = [
    [0, 0, 0],
    [1, 0, 0],
    [1, 1, 0],
    [0, 1, 0],
    [0, 0, 1],
    [1, 0, 1],
    [1, 1, 1],
    [0, 1, 1],
];

// cube edge id -> (lowest corner offset, direction index)
const EDGES: [([usize; 3], usize); 12] = [
    ([0, 0, 0], 0),
    ([1, 0, 0], 1),
    ([0, 1, 0], 0),
    ([0, 0, 0], 1),
    ([0, 0, 1], 0),
    ([1, 0, 1], 1),
    ([0, 1, 1], 0),
    ([0, 0, 1], 1),
    ([0, 0, 0], 2),
    ([1, 0, 0], 2),
    ([1, 1, 0], 2),
    ([0, 1, 0], 2),
];

pub(crate) fn corner_values(f: &ScalarField, i: usize, j: usize, k: usize) -> [f64; 8] {
    CORNERS.map(|c| f.value(i + c[0], j + c[1], k + c[2]))
}

/// Table-driven marching cubes over every cell of the field.
pub fn marching_cubes(f: &ScalarField, iso: f64) -> IndexMesh {
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
                    let case = v
                        .iter()
                        .enumerate()
                        .fold(0usize, |c, (n, &x)| if x < iso { c | 1 << n } else { c });
                    let row = &TRI_TABLE[case];
                    for tri in row.chunks(3).take_while(|t| t[0] >= 0) {
                        out.push([0, 1, 2].map(|n| {
                            let (off, dir) = EDGES[tri[n] as usize];
                            keys.key([i + off[0], j + off[1], k + off[2]], dir)
                        }));
                    }
                }
            }
            out
        })
        .collect();
    weld(f, iso, keys, slabs)
}
