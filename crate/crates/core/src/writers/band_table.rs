use std::fmt::Write;

use crate::band::{assemble_band_plot, window};
use crate::error::{Error, Result};
use crate::model::BandData;

/// CSV of `k_distance,spin,band,energy_ev` (spin and band 1-based), preceded by
/// a `# ticks:` line listing `distance label` pairs. With a window, only rows
/// whose energy lies inside it are kept.
pub fn write_band_table(b: &BandData, energy_window: Option<(f64, f64)>) -> Result<String> {
    let plot = assemble_band_plot(b)?;
    if let Some((lo, hi)) = energy_window {
        // validates the window and rejects one that excludes every point
        window(&plot, lo, hi)?;
    }
    let keep = |e: f64| energy_window.is_none_or(|(lo, hi)| e >= lo && e <= hi);
    let mut out = String::from("# ticks:");
    for (n, t) in plot.ticks.iter().enumerate() {
        let sep = if n == 0 { " " } else { "; " };
        write!(out, "{sep}{} {}", t.distance, t.label).unwrap();
    }
    out.push_str("\nk_distance,spin,band,energy_ev\n");
    let mut rows = 0;
    for c in &plot.curves {
        for p in c.pieces.iter().flatten() {
            if keep(p[1]) {
                writeln!(out, "{},{},{},{}", p[0], c.spin + 1, c.band + 1, p[1]).unwrap();
                rows += 1;
            }
        }
    }
    if rows == 0 && energy_window.is_some() {
        return Err(Error::EmptyWindow);
    }
    Ok(out)
}
