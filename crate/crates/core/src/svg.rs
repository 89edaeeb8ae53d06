//! Shed renderings: SVG for 2- and 3-dimensional fans, OFF meshes for
//! 3-dimensional ones.
//!
//! The shed of a fan is the union over top cones of the hull of the origin
//! and the primitive ray generators; it is convex exactly when the
//! anticanonical class is ample, so a picture makes non-convexity after an
//! antiflip directly visible.  Rendering is the one place in the crate that
//! uses floating point; all geometry stays exact up to the final projection.

use std::fmt::Write as _;

use crate::error::Error;
use crate::fan::Fan;
use crate::Result;

const PALETTE: [&str; 8] = [
    "#8ecae6", "#a8dadc", "#ffd6a5", "#caffbf", "#bdb2ff", "#ffc6ff", "#fdffb6", "#ffadad",
];

/// An SVG drawing of the shed; dimensions 2 and 3 only.
pub fn shed_svg(fan: &Fan) -> Result<String> {
    match fan.dim() {
        2 => Ok(render_2d(fan)),
        3 => Ok(render_3d(fan)),
        d => Err(Error::arg(format!(
            "no faithful flat rendering of a {d}-dimensional shed; supported dimensions are 2 and 3"
        ))),
    }
}

fn render_2d(fan: &Fan) -> String {
    let pts: Vec<[f64; 2]> = fan
        .rays()
        .iter()
        .map(|r| [r[0] as f64, -(r[1] as f64)])
        .collect();
    let mut faces = Vec::new();
    for (ci, cone) in fan.cones().iter().enumerate() {
        let a = pts[cone.rays[0]];
        let b = pts[cone.rays[1]];
        faces.push((0.0, vec![[0.0, 0.0], a, b], ci));
    }
    finish_svg(&pts, faces, true)
}

fn render_3d(fan: &Fan) -> String {
    // fixed oblique view; y is up
    let view = [0.55f64, 0.45, 0.704];
    let right = normalize(cross([0.0, 1.0, 0.0], view));
    let up = cross(view, right);
    let project = |r: &[i64]| -> ([f64; 2], f64) {
        let p = [r[0] as f64, r[1] as f64, r[2] as f64];
        ([dot(p, right), -dot(p, up)], dot(p, view))
    };
    let mut pts = Vec::new();
    let mut depths = Vec::new();
    for r in fan.rays() {
        let (q, d) = project(&r.0);
        pts.push(q);
        depths.push(d);
    }
    let mut faces = Vec::new();
    for (ci, cone) in fan.cones().iter().enumerate() {
        let poly: Vec<[f64; 2]> = cone.rays.iter().map(|&i| pts[i]).collect();
        let depth: f64 = cone.rays.iter().map(|&i| depths[i]).sum::<f64>() / 3.0;
        faces.push((depth, poly, ci));
    }
    finish_svg(&pts, faces, false)
}

fn finish_svg(
    pts: &[[f64; 2]],
    mut faces: Vec<(f64, Vec<[f64; 2]>, usize)>,
    include_origin_spokes: bool,
) -> String {
    faces.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut min = [f64::MAX, f64::MAX];
    let mut max = [f64::MIN, f64::MIN];
    for p in pts.iter().chain([[0.0, 0.0]].iter()) {
        for k in 0..2 {
            min[k] = min[k].min(p[k]);
            max[k] = max[k].max(p[k]);
        }
    }
    let pad = 0.6;
    let scale = 60.0;
    let w = (max[0] - min[0] + 2.0 * pad) * scale;
    let h = (max[1] - min[1] + 2.0 * pad) * scale;
    let tx = |p: [f64; 2]| -> (f64, f64) {
        ((p[0] - min[0] + pad) * scale, (p[1] - min[1] + pad) * scale)
    };
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {w:.1} {h:.1}" width="{w:.0}" height="{h:.0}">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for (_, poly, ci) in &faces {
        let mut d = String::new();
        for (k, p) in poly.iter().enumerate() {
            let (x, y) = tx(*p);
            let _ = write!(d, "{}{x:.2},{y:.2} ", if k == 0 { "M" } else { "L" });
        }
        let _ = writeln!(
            svg,
            r##"<path d="{}Z" fill="{}" fill-opacity="0.75" stroke="#1d3557" stroke-width="1.2" stroke-linejoin="round"/>"##,
            d,
            PALETTE[ci % PALETTE.len()]
        );
    }
    if include_origin_spokes {
        for p in pts {
            let (x, y) = tx(*p);
            let (ox, oy) = tx([0.0, 0.0]);
            let _ = writeln!(
                svg,
                r##"<line x1="{ox:.2}" y1="{oy:.2}" x2="{x:.2}" y2="{y:.2}" stroke="#457b9d" stroke-width="0.8" stroke-dasharray="3 3"/>"##
            );
        }
    }
    for p in pts {
        let (x, y) = tx(*p);
        let _ = writeln!(
            svg,
            r##"<circle cx="{x:.2}" cy="{y:.2}" r="3" fill="#e63946"/>"##
        );
    }
    let (ox, oy) = tx([0.0, 0.0]);
    let _ = writeln!(
        svg,
        r##"<circle cx="{ox:.2}" cy="{oy:.2}" r="2.5" fill="#1d3557"/>"##
    );
    svg.push_str("</svg>\n");
    svg
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn normalize(a: [f64; 3]) -> [f64; 3] {
    let n = dot(a, a).sqrt();
    [a[0] / n, a[1] / n, a[2] / n]
}

/// OFF mesh of the shed boundary of a 3-dimensional fan: the rays are the
/// vertices and each top cone contributes its roof triangle.
pub fn shed_off(fan: &Fan) -> Result<String> {
    if fan.dim() != 3 {
        return Err(Error::arg(
            "OFF meshes are produced for 3-dimensional fans only",
        ));
    }
    let mut s = String::from("OFF\n");
    let _ = writeln!(s, "{} {} 0", fan.rays().len(), fan.cones().len());
    for r in fan.rays() {
        let _ = writeln!(s, "{} {} {}", r[0], r[1], r[2]);
    }
    for c in fan.cones() {
        let _ = writeln!(s, "3 {} {} {}", c.rays[0], c.rays[1], c.rays[2]);
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fan::SimplexVariety;

    #[test]
    fn p3_renders() {
        let x = SimplexVariety::wps(&[1, 1, 1, 1]).unwrap();
        let svg = shed_svg(x.fan()).unwrap();
        assert!(svg.starts_with("<svg"));
        assert_eq!(svg.matches("<path").count(), 4);
        let off = shed_off(x.fan()).unwrap();
        assert!(off.starts_with("OFF\n4 4 0"));
    }

    #[test]
    fn two_dimensional_fan_renders() {
        let x = SimplexVariety::wps(&[1, 1, 2]).unwrap();
        let svg = shed_svg(x.fan()).unwrap();
        assert_eq!(svg.matches("<path").count(), 3);
    }

    #[test]
    fn four_dimensional_rendering_refused() {
        let x = SimplexVariety::wps(&[1, 1, 1, 1, 1]).unwrap();
        assert!(shed_svg(x.fan()).is_err());
    }
}
