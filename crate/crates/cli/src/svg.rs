//! Minimal hand-rolled SVG chart for iterated-logarithm trajectories: the
//! normalized deviation and its running supremum against log log n, with the
//! +/-1 reference band.

use permlil_core::lil::PathRecord;
use std::fmt::Write;

const W: f64 = 720.0;
const H: f64 = 480.0;
const MARGIN: f64 = 48.0;

pub fn trajectory_chart(path: &[PathRecord]) -> String {
    let points: Vec<(f64, f64)> = path
        .iter()
        .filter_map(|r| Some((r.loglog_n?, r.normalized?)))
        .collect();

    let mut doc = String::new();
    let _ = writeln!(
        doc,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {W} {H}\" font-family=\"monospace\" font-size=\"12\">"
    );
    let _ = writeln!(doc, "<rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>");

    if points.len() >= 2 {
        let (mut x_lo, mut x_hi) = (f64::INFINITY, f64::NEG_INFINITY);
        let (mut y_lo, mut y_hi) = (-1.2f64, 1.2f64);
        let mut sup = f64::NEG_INFINITY;
        let mut sups = Vec::with_capacity(points.len());
        for &(x, y) in &points {
            x_lo = x_lo.min(x);
            x_hi = x_hi.max(x);
            y_lo = y_lo.min(y - 0.1);
            y_hi = y_hi.max(y + 0.1);
            sup = sup.max(y);
            sups.push((x, sup));
        }
        if x_hi <= x_lo {
            x_hi = x_lo + 1.0;
        }
        let sx = |x: f64| MARGIN + (x - x_lo) / (x_hi - x_lo) * (W - 2.0 * MARGIN);
        let sy = |y: f64| H - MARGIN - (y - y_lo) / (y_hi - y_lo) * (H - 2.0 * MARGIN);
        let polyline = |pts: &[(f64, f64)]| {
            pts.iter()
                .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
                .collect::<Vec<_>>()
                .join(" ")
        };

        // +/-1 band: the limsup/liminf targets
        for level in [1.0f64, -1.0] {
            let _ = writeln!(
                doc,
                "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#bbbbbb\" stroke-dasharray=\"4 4\"/>",
                sx(x_lo), sy(level), sx(x_hi), sy(level)
            );
        }
        let _ = writeln!(
            doc,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\"/>",
            polyline(&points)
        );
        let _ = writeln!(
            doc,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"#d62728\" stroke-width=\"1.5\"/>",
            polyline(&sups)
        );
        let _ = writeln!(
            doc,
            "<text x=\"{MARGIN}\" y=\"20\" fill=\"#1f77b4\">normalized deviation</text>"
        );
        let _ = writeln!(
            doc,
            "<text x=\"{:.0}\" y=\"20\" fill=\"#d62728\">running sup</text>",
            MARGIN + 180.0
        );
        let _ = writeln!(
            doc,
            "<text x=\"{:.0}\" y=\"{:.0}\">log log n</text>",
            W / 2.0 - 30.0,
            H - 12.0
        );
    } else {
        let _ = writeln!(
            doc,
            "<text x=\"{:.0}\" y=\"{:.0}\">not enough defined points to plot</text>",
            MARGIN,
            H / 2.0
        );
    }

    doc.push_str("</svg>\n");
    doc
}
