//! Band-structure plot assembly: cumulative k-path distance, energies
//! relative to the chemical potential in eV, and high-symmetry ticks.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::BandData;
use crate::units::HARTREE_TO_EV;

/// One band of one spin channel as polyline pieces of `[distance, energy]`.
/// Assembly yields a single piece; windowing can split it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BandCurve {
    pub spin: usize,
    pub band: usize,
    pub pieces: Vec<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tick {
    pub distance: f64,
    pub label: String,
}

/// Distances in Bohr⁻¹, energies in eV with the Fermi level at zero.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BandPlot {
    pub spin_channels: usize,
    pub n_bands: usize,
    pub curves: Vec<BandCurve>,
    pub ticks: Vec<Tick>,
    pub e_range: [f64; 2],
}

fn cartesian(k: [f64; 3], rec: &[[f64; 3]; 3]) -> [f64; 3] {
    [0, 1, 2].map(|c| k[0] * rec[0][c] + k[1] * rec[1][c] + k[2] * rec[2][c])
}

fn push_tick(ticks: &mut Vec<Tick>, distance: f64, label: &str) {
    if let Some(last) = ticks.last_mut() {
        if last.distance == distance {
            if last.label != label && !label.is_empty() {
                if last.label.is_empty() {
                    last.label = label.to_string();
                } else {
                    last.label = format!("{}|{}", last.label, label);
                }
            }
            return;
        }
    }
    ticks.push(Tick {
        distance,
        label: label.to_string(),
    });
}

pub fn assemble_band_plot(b: &BandData) -> Result<BandPlot> {
    b.validate()?;
    let mut distances = Vec::with_capacity(b.k_point_count());
    let mut ticks = Vec::new();
    let mut here = 0.0;
    for (seg, recs) in b.segments.iter().zip(&b.records) {
        push_tick(&mut ticks, here, &seg.label_start);
        let mut prev: Option<[f64; 3]> = None;
        for r in recs {
            let k = cartesian(r.k, &b.reciprocal);
            if let Some(p) = prev {
                here += ((k[0] - p[0]).powi(2) + (k[1] - p[1]).powi(2) + (k[2] - p[2]).powi(2)).sqrt();
            }
            prev = Some(k);
            distances.push(here);
        }
        push_tick(&mut ticks, here, &seg.label_end);
    }

    let mu = b.chem_potential;
    let mut curves = Vec::with_capacity(b.spin_channels * b.n_bands);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for spin in 0..b.spin_channels {
        for band in 0..b.n_bands {
            let piece: Vec<[f64; 2]> = b
                .records
                .iter()
                .flatten()
                .zip(&distances)
                .map(|(r, &d)| [d, (r.eigenvalues[spin][band] - mu) * HARTREE_TO_EV])
                .collect();
            for p in &piece {
                lo = lo.min(p[1]);
                hi = hi.max(p[1]);
            }
            curves.push(BandCurve {
                spin,
                band,
                pieces: vec![piece],
            });
        }
    }
    let e_range = if lo <= hi { [lo, hi] } else { [0.0, 0.0] };
    Ok(BandPlot {
        spin_channels: b.spin_channels,
        n_bands: b.n_bands,
        curves,
        ticks,
        e_range,
    })
}

/// Parameter range of the segment p→q lying inside `[lo, hi]` in energy.
fn clip(p: [f64; 2], q: [f64; 2], lo: f64, hi: f64) -> Option<(f64, f64)> {
    let dy = q[1] - p[1];
    if dy == 0.0 {
        return (p[1] >= lo && p[1] <= hi).then_some((0.0, 1.0));
    }
    let (ta, tb) = ((lo - p[1]) / dy, (hi - p[1]) / dy);
    let (enter, exit) = if dy > 0.0 { (ta, tb) } else { (tb, ta) };
    let (t0, t1) = (enter.max(0.0), exit.min(1.0));
    (t0 <= t1).then_some((t0, t1))
}

fn at(p: [f64; 2], q: [f64; 2], t: f64, lo: f64, hi: f64) -> [f64; 2] {
    if t == 0.0 {
        p
    } else if t == 1.0 {
        q
    } else {
        [p[0] + t * (q[0] - p[0]), (p[1] + t * (q[1] - p[1])).clamp(lo, hi)]
    }
}

/// Clips every polyline to `emin ≤ E ≤ emax`, interpolating at the crossings.
pub fn window(plot: &BandPlot, emin: f64, emax: f64) -> Result<BandPlot> {
    if !(emin < emax) || !emin.is_finite() || !emax.is_finite() {
        return Err(Error::BadWindow(emin, emax));
    }
    let inside = |y: f64| y >= emin && y <= emax;
    let mut any = false;
    let curves = plot
        .curves
        .iter()
        .map(|c| {
            let mut pieces: Vec<Vec<[f64; 2]>> = Vec::new();
            for piece in &c.pieces {
                if piece.len() == 1 {
                    if inside(piece[0][1]) {
                        pieces.push(piece.clone());
                    }
                    continue;
                }
                let mut current: Vec<[f64; 2]> = Vec::new();
                for w in piece.windows(2) {
                    let (p, q) = (w[0], w[1]);
                    match clip(p, q, emin, emax) {
                        Some((t0, t1)) => {
                            let a = at(p, q, t0, emin, emax);
                            let b = at(p, q, t1, emin, emax);
                            if current.is_empty() || t0 > 0.0 {
                                if !current.is_empty() {
                                    pieces.push(std::mem::take(&mut current));
                                }
                                current.push(a);
                            }
                            current.push(b);
                            if t1 < 1.0 {
                                pieces.push(std::mem::take(&mut current));
                            }
                        }
                        None => {
                            if !current.is_empty() {
                                pieces.push(std::mem::take(&mut current));
                            }
                        }
                    }
                }
                if !current.is_empty() {
                    pieces.push(current);
                }
            }
            any |= !pieces.is_empty();
            BandCurve {
                spin: c.spin,
                band: c.band,
                pieces,
            }
        })
        .collect();
    if !any {
        return Err(Error::EmptyWindow);
    }
    Ok(BandPlot {
        curves,
        ticks: plot.ticks.clone(),
        e_range: [emin, emax],
        ..*plot
    })
}
