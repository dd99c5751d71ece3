use std::collections::HashMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::VolumetricGrid;

/// Read-only view of a grid, optionally tiled, with wrap-around sampling.
///
/// A periodic field treats the grid as one unit cell, so `t·n` cells per axis
/// are meshed and the last layer closes onto the first. An open field meshes
/// only between stored samples (`t·n − 1` cells per axis).
#[derive(Debug, Clone, Copy)]
pub struct ScalarField<'a> {
    grid: &'a VolumetricGrid,
    supercell: [usize; 3],
    periodic: bool,
    sign: f64,
}

impl<'a> ScalarField<'a> {
    pub fn new(grid: &'a VolumetricGrid, supercell: [usize; 3], periodic: bool) -> Result<Self> {
        if supercell.contains(&0) {
            return Err(Error::BadSupercell);
        }
        if grid.values.is_empty() {
            return Err(Error::EmptyGrid);
        }
        Ok(Self {
            grid,
            supercell,
            periodic,
            sign: 1.0,
        })
    }

    pub fn periodic(grid: &'a VolumetricGrid, supercell: [usize; 3]) -> Result<Self> {
        Self::new(grid, supercell, true)
    }

    pub fn open(grid: &'a VolumetricGrid) -> Result<Self> {
        Self::new(grid, [1, 1, 1], false)
    }

    /// The field −f over the same samples.
    pub fn negated(mut self) -> Self {
        self.sign = -self.sign;
        self
    }

    pub fn grid(&self) -> &VolumetricGrid {
        self.grid
    }

    pub fn supercell(&self) -> [usize; 3] {
        self.supercell
    }

    pub fn is_periodic(&self) -> bool {
        self.periodic
    }

    /// Number of cells meshed along each axis.
    pub fn cells(&self) -> [usize; 3] {
        [0, 1, 2].map(|a| {
            let n = self.grid.dims[a] * self.supercell[a];
            if self.periodic {
                n
            } else {
                n - 1
            }
        })
    }

    #[inline]
    pub fn value(&self, i: usize, j: usize, k: usize) -> f64 {
        let [n1, n2, n3] = self.grid.dims;
        self.sign * self.grid.value(i % n1, j % n2, k % n3)
    }

    /// Central-difference gradient at a lattice point, in index units.
    /// Open fields fall back to one-sided differences at their edges.
    pub fn gradient(&self, p: [usize; 3]) -> [f64; 3] {
        let cells = self.cells();
        let mut g = [0.0; 3];
        for (a, ga) in g.iter_mut().enumerate() {
            let n = self.grid.dims[a];
            let at = |off: isize| {
                let mut q = p;
                q[a] = if self.periodic {
                    (p[a] as isize + off).rem_euclid(n as isize) as usize
                } else {
                    (p[a] as isize + off) as usize
                };
                self.value(q[0], q[1], q[2])
            };
            *ga = if self.periodic {
                if n == 1 {
                    0.0
                } else {
                    0.5 * (at(1) - at(-1))
                }
            } else {
                let last = cells[a];
                match (p[a] > 0, p[a] < last) {
                    (true, true) => 0.5 * (at(1) - at(-1)),
                    (false, true) => at(1) - at(0),
                    (true, false) => at(0) - at(-1),
                    (false, false) => 0.0,
                }
            };
        }
        g
    }
}

/// Mesh in continuous grid-index coordinates.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct IndexMesh {
    pub vertices: Vec<[f64; 3]>,
    pub normals: Vec<[f64; 3]>,
    pub triangles: Vec<[u32; 3]>,
}

impl IndexMesh {
    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }
}

/// Lattice edge directions used by both cube and tetrahedral decompositions;
/// every edge runs from its lowest corner in one of these directions.
pub(crate) const DIRS: [[usize; 3]; 7] = [
    [1, 0, 0],
    [0, 1, 0],
    [0, 0, 1],
    [1, 1, 0],
    [1, 0, 1],
    [0, 1, 1],
    [1, 1, 1],
];

pub(crate) fn dir_index(d: [usize; 3]) -> usize {
    DIRS.iter().position(|&x| x == d).expect("edge direction")
}

/// Identifies lattice edges of the tiled point grid.
#[derive(Debug, Clone, Copy)]
pub(crate) struct EdgeKeys {
    ny: u64,
    nz: u64,
}

impl EdgeKeys {
    pub(crate) fn new(cells: [usize; 3]) -> Self {
        Self {
            ny: cells[1] as u64 + 1,
            nz: cells[2] as u64 + 1,
        }
    }

    #[inline]
    pub(crate) fn key(&self, p: [usize; 3], dir: usize) -> u64 {
        ((p[0] as u64 * self.ny + p[1] as u64) * self.nz + p[2] as u64) * 7 + dir as u64
    }

    #[inline]
    pub(crate) fn decode(&self, key: u64) -> ([usize; 3], usize) {
        let dir = (key % 7) as usize;
        let p = key / 7;
        let k = p % self.nz;
        let j = (p / self.nz) % self.ny;
        let i = p / (self.nz * self.ny);
        ([i as usize, j as usize, k as usize], dir)
    }
}

/// Interpolation parameter along A→B; flat edges take the midpoint.
#[inline]
pub(crate) fn crossing(fa: f64, fb: f64, iso: f64) -> f64 {
    if fa == fb {
        0.5
    } else {
        ((iso - fa) / (fb - fa)).clamp(0.0, 1.0)
    }
}

/// Position of the iso crossing on an edge.
pub(crate) fn edge_point(f: &ScalarField, iso: f64, p: [usize; 3], dir: usize) -> ([f64; 3], f64) {
    let d = DIRS[dir];
    let q = [p[0] + d[0], p[1] + d[1], p[2] + d[2]];
    let t = crossing(f.value(p[0], p[1], p[2]), f.value(q[0], q[1], q[2]), iso);
    let pos = [0, 1, 2].map(|a| p[a] as f64 + t * d[a] as f64);
    (pos, t)
}

pub(crate) fn normalize(v: [f64; 3]) -> Option<[f64; 3]> {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    (n > 0.0 && n.is_finite()).then(|| [v[0] / n, v[1] / n, v[2] / n])
}

pub(crate) fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub(crate) fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub(crate) fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Builds a welded mesh from triangles over edge keys, emitted slab by slab
/// in canonical cell order. Vertices are numbered by first use.
pub(crate) fn weld(f: &ScalarField, iso: f64, keys: EdgeKeys, slabs: Vec<Vec<[u64; 3]>>) -> IndexMesh {
    let total: usize = slabs.iter().map(Vec::len).sum();
    let mut index: HashMap<u64, u32> = HashMap::with_capacity(total);
    let mut order: Vec<u64> = Vec::new();
    let mut triangles = Vec::with_capacity(total);
    for tri in slabs.into_iter().flatten() {
        let t = tri.map(|k| {
            *index.entry(k).or_insert_with(|| {
                order.push(k);
                (order.len() - 1) as u32
            })
        });
        triangles.push(t);
    }
    let (vertices, normals): (Vec<[f64; 3]>, Vec<[f64; 3]>) = order
        .par_iter()
        .map(|&key| {
            let (p, dir) = keys.decode(key);
            let (pos, t) = edge_point(f, iso, p, dir);
            let d = DIRS[dir];
            let ga = f.gradient(p);
            let gb = f.gradient([p[0] + d[0], p[1] + d[1], p[2] + d[2]]);
            let g = [0, 1, 2].map(|a| -((1.0 - t) * ga[a] + t * gb[a]));
            (pos, normalize(g).unwrap_or([0.0; 3]))
        })
        .unzip();
    let mut mesh = IndexMesh {
        vertices,
        normals,
        triangles,
    };
    repair_normals(&mut mesh);
    mesh
}

/// Replaces zero normals by the area-weighted face normal, else +z.
pub(crate) fn repair_normals(m: &mut IndexMesh) {
    let missing: Vec<bool> = m.normals.iter().map(|n| *n == [0.0; 3]).collect();
    if !missing.contains(&true) {
        return;
    }
    let mut acc = vec![[0.0; 3]; m.vertices.len()];
    for t in &m.triangles {
        let [a, b, c] = t.map(|i| m.vertices[i as usize]);
        let n = cross(sub(b, a), sub(c, a));
        for &i in t {
            if missing[i as usize] {
                for x in 0..3 {
                    acc[i as usize][x] += n[x];
                }
            }
        }
    }
    for (i, miss) in missing.into_iter().enumerate() {
        if miss {
            m.normals[i] = normalize(acc[i]).unwrap_or([0.0, 0.0, 1.0]);
        }
    }
}
