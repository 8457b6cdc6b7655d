//! Level-curve figures as SVG 1.1.

use std::fmt::Write;

use crate::trace::{PlaneBox, TracedCurve};

const SIZE: f64 = 600.0;
const PALETTE: &[&str] = &["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

/// One polyline per component; curves at level 0 are drawn thick.
pub fn curves_svg(bx: &PlaneBox, curves: &[TracedCurve]) -> String {
    let [x0, x1, y0, y1] = bx.bounds_f64();
    let sx = SIZE / (x1 - x0);
    let sy = SIZE / (y1 - y0);
    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(out, r#"  <rect x="0" y="0" width="{SIZE}" height="{SIZE}" fill="white" stroke="black"/>"#);
    for (i, c) in curves.iter().enumerate() {
        let width = if c.level == "0" { 4.0 } else { 1.5 };
        let color = PALETTE[i % PALETTE.len()];
        let _ = writeln!(out, r#"  <g stroke="{color}" stroke-width="{width}" fill="none" data-level="{}">"#, c.level);
        for comp in &c.components {
            let mut pts = String::new();
            for p in comp.points.iter().chain(comp.closed.then(|| &comp.points[0])) {
                let _ = write!(pts, "{:.3},{:.3} ", (p[0] - x0) * sx, (y1 - p[1]) * sy);
            }
            let _ = writeln!(out, r#"    <polyline points="{}"/>"#, pts.trim_end());
        }
        let _ = writeln!(out, "  </g>");
    }
    out.push_str("</svg>\n");
    out
}
