use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Structure, Vec3};

/// Pairs closer than this (Å) are never bonded.
pub const MIN_BOND_LENGTH: f64 = 0.4;

/// A bond from atom `i` to the image of atom `j` shifted by `image` lattice vectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bond {
    pub i: usize,
    pub j: usize,
    pub image: [i32; 3],
    pub length: f64,
}

type BinKey = (i64, i64, i64);

struct Point {
    atom: usize,
    offset: [i32; 3],
    pos: Vec3,
}

fn bin_of(p: &Vec3, size: f64) -> BinKey {
    (
        (p.x / size).floor() as i64,
        (p.y / size).floor() as i64,
        (p.z / size).floor() as i64,
    )
}

/// Finds bonds with `MIN_BOND_LENGTH < d ≤ factor·(r_A + r_B)` using covalent radii.
///
/// For periodic structures, images in the adjacent cells are searched; the
/// cell must be at least one cutoff thick in every direction. Atoms outside
/// the cell are handled: images are reported relative to the stored positions.
/// The result is sorted by `(i, j, image)`.
pub fn detect_bonds(s: &Structure, factor: f64) -> Result<Vec<Bond>> {
    if !(factor > 0.0 && factor.is_finite()) {
        return Err(Error::BadBondFactor(factor));
    }
    if s.is_empty() {
        return Ok(Vec::new());
    }
    let max_radius = s
        .atoms
        .iter()
        .map(|a| a.element.covalent_radius)
        .fold(0.0, f64::max);
    let cutoff = factor * 2.0 * max_radius;

    let (points, centres, wrap) = match &s.lattice {
        None => {
            let points = s
                .atoms
                .iter()
                .enumerate()
                .map(|(i, a)| Point {
                    atom: i,
                    offset: [0; 3],
                    pos: a.position,
                })
                .collect();
            let centres: Vec<Vec3> = s.atoms.iter().map(|a| a.position).collect();
            (points, centres, vec![[0i32; 3]; s.len()])
        }
        Some(lattice) => {
            let heights = lattice.heights();
            if let Some(&h) = heights.iter().find(|&&h| h < cutoff) {
                return Err(Error::CellTooSmall { height: h, cutoff });
            }
            let pad = heights.map(|h| cutoff / h + 1e-9);
            let mut points = Vec::new();
            let mut centres = Vec::with_capacity(s.len());
            let mut wrap = Vec::with_capacity(s.len());
            for (i, a) in s.atoms.iter().enumerate() {
                let f = lattice.cart_to_frac(&a.position);
                let w = f.map(f64::floor);
                let fw = f - w;
                wrap.push([w.x as i32, w.y as i32, w.z as i32]);
                centres.push(lattice.frac_to_cart(&fw));
                for ox in -1..=1 {
                    for oy in -1..=1 {
                        for oz in -1..=1 {
                            let o = Vec3::new(ox as f64, oy as f64, oz as f64);
                            let g = fw + o;
                            if (0..3).all(|k| g[k] >= -pad[k] && g[k] <= 1.0 + pad[k]) {
                                points.push(Point {
                                    atom: i,
                                    offset: [ox, oy, oz],
                                    pos: lattice.frac_to_cart(&g),
                                });
                            }
                        }
                    }
                }
            }
            (points, centres, wrap)
        }
    };

    let bin = cutoff.max(1e-6);
    let mut bins: HashMap<BinKey, Vec<usize>> = HashMap::new();
    for (n, p) in points.iter().enumerate() {
        bins.entry(bin_of(&p.pos, bin)).or_default().push(n);
    }

    let mut bonds: Vec<Bond> = centres
        .par_iter()
        .enumerate()
        .flat_map_iter(|(i, ri)| {
            let ai = &s.atoms[i];
            let (bx, by, bz) = bin_of(ri, bin);
            let mut found = Vec::new();
            for dx in -1..=1 {
                for dy in -1..=1 {
                    for dz in -1..=1 {
                        let Some(members) = bins.get(&(bx + dx, by + dy, bz + dz)) else {
                            continue;
                        };
                        for &n in members {
                            let p = &points[n];
                            if p.atom <= i {
                                continue;
                            }
                            let d = (p.pos - ri).norm();
                            let limit = factor
                                * (ai.element.covalent_radius
                                    + s.atoms[p.atom].element.covalent_radius);
                            if d > MIN_BOND_LENGTH && d <= limit {
                                let (wi, wj) = (wrap[i], wrap[p.atom]);
                                found.push(Bond {
                                    i,
                                    j: p.atom,
                                    image: [0, 1, 2].map(|k| p.offset[k] + wi[k] - wj[k]),
                                    length: d,
                                });
                            }
                        }
                    }
                }
            }
            found
        })
        .collect();
    bonds.sort_by(|a, b| (a.i, a.j, a.image).cmp(&(b.i, b.j, b.image)));
    Ok(bonds)
}
