use std::fmt::Write;

use crate::model::VolumetricGrid;
use crate::units::ang_to_bohr;

/// Gaussian cube text with all lengths in Bohr.
pub fn write_cube(g: &VolumetricGrid) -> String {
    let mut out = String::new();
    for c in &g.comments {
        writeln!(out, "{}", c.lines().next().unwrap_or("")).unwrap();
    }
    let b = |x: f64| ang_to_bohr(x);
    writeln!(
        out,
        "{:5} {:.10} {:.10} {:.10}",
        g.atoms.len(),
        b(g.origin.x),
        b(g.origin.y),
        b(g.origin.z)
    )
    .unwrap();
    for (n, s) in g.dims.iter().zip(&g.steps) {
        writeln!(out, "{n:5} {:.10} {:.10} {:.10}", b(s.x), b(s.y), b(s.z)).unwrap();
    }
    for a in &g.atoms {
        let z = a.element.atomic_number;
        let p = a.position;
        writeln!(out, "{z:5} {:.6} {:.10} {:.10} {:.10}", f64::from(z), b(p.x), b(p.y), b(p.z)).unwrap();
    }
    let n3 = g.dims[2].max(1);
    for row in g.values.chunks(n3) {
        for line in row.chunks(6) {
            let text: Vec<String> = line.iter().map(|v| format!("{v:.12E}")).collect();
            writeln!(out, " {}", text.join(" ")).unwrap();
        }
    }
    out
}
