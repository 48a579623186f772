//! SVG overlay of the boundary, the detected skeleton closure and the
//! classifier output.

use std::fmt::Write;

use rayon::prelude::*;

use crate::curvature::Radius;
use crate::cutlocus::{classify_cell, Classification, SkeletonMask};
use crate::error::Result;
use crate::export::fmt_num;
use crate::geometry::{Domain, Point};

const WIDTH_PX: f64 = 800.0;

fn class_color(c: Classification) -> &'static str {
    match c {
        Classification::RegularPoint => "#cfe3f5",
        Classification::CutLocusPoint => "#e34a33",
        Classification::BoundaryCase => "#fdae33",
    }
}

/// Blue (small ρ*) to yellow (large ρ*) on a log scale; unbounded is green.
fn rho_color(r: Radius, lo: f64, hi: f64) -> String {
    match r {
        Radius::Unbounded => "#1a9850".into(),
        Radius::Finite { value, .. } => {
            let t = if hi > lo {
                ((value.max(lo).ln() - lo.ln()) / (hi.ln() - lo.ln())).clamp(0.0, 1.0)
            } else {
                0.5
            };
            let r = (40.0 + 215.0 * t) as u8;
            let g = (40.0 + 180.0 * t) as u8;
            let b = (200.0 * (1.0 - t)) as u8;
            format!("#{r:02x}{g:02x}{b:02x}")
        }
    }
}

/// Renders cells colored by classification, the skeleton closure on top and
/// the boundary colored by ρ*.
pub fn render_svg(domain: &Domain, mask: &SkeletonMask) -> Result<String> {
    let g = mask.grid;
    let q = domain.spec().query_box();
    let scale = WIDTH_PX / (q.x1 - q.x0);
    let height = (q.y1 - q.y0) * scale;
    let to_px = |p: Point| ((p.x - q.x0) * scale, (q.y1 - p.y) * scale);

    let classes: Vec<(usize, Classification)> = (0..g.len())
        .filter(|&k| mask.interior[k])
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&k| classify_cell(domain, g.center_of(k), g.h).map(|c| (k, c)))
        .collect::<Result<_>>()?;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}">"#,
        fmt_num(WIDTH_PX),
        fmt_num(height),
        fmt_num(WIDTH_PX),
        fmt_num(height)
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let cell = fmt_num(g.h * scale);
    let _ = writeln!(svg, r#"<g id="classification" stroke="none">"#);
    for (k, c) in &classes {
        let c0 = g.center_of(*k);
        let (x, y) = to_px(Point::new(c0.x - 0.5 * g.h, c0.y + 0.5 * g.h));
        let _ = writeln!(
            svg,
            r#"<rect x="{}" y="{}" width="{cell}" height="{cell}" fill="{}"/>"#,
            fmt_num(x),
            fmt_num(y),
            class_color(*c)
        );
    }
    let _ = writeln!(svg, "</g>");
    let _ = writeln!(svg, r#"<g id="skeleton" fill="black" fill-opacity="0.35" stroke="none">"#);
    for c0 in mask.closure_centers() {
        let (x, y) = to_px(Point::new(c0.x - 0.5 * g.h, c0.y + 0.5 * g.h));
        let _ = writeln!(
            svg,
            r#"<rect x="{}" y="{}" width="{cell}" height="{cell}"/>"#,
            fmt_num(x),
            fmt_num(y)
        );
    }
    let _ = writeln!(svg, "</g>");

    let table = domain.rho_table();
    let radii = &domain.tolerances().env_radii;
    let stars: Vec<Radius> = table
        .entries
        .par_iter()
        .map(|e| domain.rho_star(&e.sample, radii).map(|r| r.radius))
        .collect::<Result<_>>()?;
    let finite: Vec<f64> = stars
        .iter()
        .filter(|r| !r.is_unbounded())
        .map(|r| r.value())
        .filter(|&v| v > 0.0)
        .collect();
    let lo = finite.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = finite.iter().copied().fold(0.0, f64::max);
    let _ = writeln!(svg, r#"<g id="boundary" stroke-width="3" stroke-linecap="round">"#);
    for (w, pair) in table.entries.windows(2).zip(stars.windows(2)) {
        if w[0].sample.param.piece != w[1].sample.param.piece {
            continue;
        }
        let (a, b) = (w[0].sample.point, w[1].sample.point);
        if !q.contains(a) && !q.contains(b) {
            continue;
        }
        let (x1, y1) = to_px(a);
        let (x2, y2) = to_px(b);
        let _ = writeln!(
            svg,
            r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{}"/>"#,
            fmt_num(x1),
            fmt_num(y1),
            fmt_num(x2),
            fmt_num(y2),
            rho_color(pair[0].min(pair[1]), lo, hi)
        );
    }
    let _ = writeln!(svg, "</g>");
    let _ = writeln!(svg, "</svg>");
    Ok(svg)
}
