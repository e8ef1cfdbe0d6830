//! Deterministic file writers: CSV (UTF-8, '\n' line ends, '.' decimal,
//! 15 significant digits), SVG 1.1, and binary portable pixmap.

use maskit_core::chains::{Chain, ChainReport, PleatingCurves};
use maskit_core::discreteness::ScanCell;
use maskit_core::limitset::PointCloud;
use maskit_core::locus::RayTrace;
use maskit_core::moebius::Boundary;
use num_complex::Complex64 as Complex;
use std::fmt::Write as _;

/// 15 significant digits, locale-independent.
pub fn fmt_f(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    format!("{x:.14e}")
}

/// One row per sample (t, Re, Im, flag); special points appended with
/// cusp / elliptic(n) labels. Header only for an empty trace.
pub fn ray_csv(ray: &RayTrace) -> String {
    let mut out = String::from("t,re,im,flag\n");
    for s in &ray.samples {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            fmt_f(s.t),
            fmt_f(s.param.re),
            fmt_f(s.param.im),
            s.flag
        );
    }
    for sp in &ray.special {
        let t = 2.0 * match sp.kind {
            maskit_core::locus::SpecialKind::Cusp => 1.0,
            maskit_core::locus::SpecialKind::Elliptic(n) => {
                (std::f64::consts::PI / n as f64).cos()
            }
        } * ray.trace_sign;
        let _ = writeln!(
            out,
            "{},{},{},{}",
            fmt_f(t),
            fmt_f(sp.param.re),
            fmt_f(sp.param.im),
            sp.kind
        );
    }
    out
}

/// Scan grid: one row per cell (center, J value, verdict).
pub fn scan_csv(cells: &[ScanCell]) -> String {
    let mut out = String::from("re,im,j,verdict\n");
    for c in cells {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            fmt_f(c.mu.re),
            fmt_f(c.mu.im),
            fmt_f(c.report.value),
            c.report.verdict
        );
    }
    out
}

/// Limit-set points (re, im, word depth).
pub fn cloud_csv(cloud: &PointCloud) -> String {
    let mut out = String::from("re,im,depth\n");
    for p in &cloud.points {
        let _ = writeln!(out, "{},{},{}", fmt_f(p.z.re), fmt_f(p.z.im), p.depth);
    }
    out
}

fn svg_num(x: f64) -> String {
    format!("{x:.9}")
}

/// Drawable items for the SVG writer.
pub enum SvgItem {
    Circle { center: Complex, radius: f64 },
    Segment { from: Complex, to: Complex },
    Path { points: Vec<Complex> },
    Polyline { points: Vec<Complex> },
}

/// SVG 1.1 document in plane units, y flipped so the upper half-plane is
/// up. Disks become circle elements, arcs path elements, rays polylines.
/// An empty item list yields a valid empty document.
pub fn svg_document(items: &[SvgItem], comment: Option<&str>) -> String {
    // Bounds from content.
    let mut x0 = f64::INFINITY;
    let mut y0 = f64::INFINITY;
    let mut x1 = f64::NEG_INFINITY;
    let mut y1 = f64::NEG_INFINITY;
    let mut feed = |z: Complex, r: f64| {
        x0 = x0.min(z.re - r);
        y0 = y0.min(z.im - r);
        x1 = x1.max(z.re + r);
        y1 = y1.max(z.im + r);
    };
    for item in items {
        match item {
            SvgItem::Circle { center, radius } => feed(*center, *radius),
            SvgItem::Segment { from, to } => {
                feed(*from, 0.0);
                feed(*to, 0.0);
            }
            SvgItem::Path { points } | SvgItem::Polyline { points } => {
                for p in points {
                    feed(*p, 0.0);
                }
            }
        }
    }
    if !x0.is_finite() {
        x0 = -1.0;
        y0 = -1.0;
        x1 = 1.0;
        y1 = 1.0;
    }
    let pad = 0.05 * ((x1 - x0).max(y1 - y0)).max(1e-9);
    let (x0, y0, x1, y1) = (x0 - pad, y0 - pad, x1 + pad, y1 + pad);
    let w = x1 - x0;
    let h = y1 - y0;
    let sw = 0.004 * w.max(h);

    let mut out = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    if let Some(c) = comment {
        let _ = writeln!(out, "<!-- {c} -->");
    }
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"{} {} {} {}\">",
        svg_num(x0),
        svg_num(-y1),
        svg_num(w),
        svg_num(h)
    );
    let _ = writeln!(out, "<g transform=\"scale(1,-1)\" fill=\"none\" stroke=\"black\" stroke-width=\"{}\">", svg_num(sw));
    for item in items {
        match item {
            SvgItem::Circle { center, radius } => {
                let _ = writeln!(
                    out,
                    "<circle cx=\"{}\" cy=\"{}\" r=\"{}\"/>",
                    svg_num(center.re),
                    svg_num(center.im),
                    svg_num(*radius)
                );
            }
            SvgItem::Segment { from, to } => {
                let _ = writeln!(
                    out,
                    "<path d=\"M {} {} L {} {}\"/>",
                    svg_num(from.re),
                    svg_num(from.im),
                    svg_num(to.re),
                    svg_num(to.im)
                );
            }
            SvgItem::Path { points } => {
                if points.is_empty() {
                    continue;
                }
                let mut d = format!("M {} {}", svg_num(points[0].re), svg_num(points[0].im));
                for p in &points[1..] {
                    let _ = write!(d, " L {} {}", svg_num(p.re), svg_num(p.im));
                }
                let _ = writeln!(out, "<path d=\"{d}\" stroke=\"crimson\"/>");
            }
            SvgItem::Polyline { points } => {
                let pts: Vec<String> = points
                    .iter()
                    .map(|p| format!("{},{}", svg_num(p.re), svg_num(p.im)))
                    .collect();
                let _ = writeln!(
                    out,
                    "<polyline points=\"{}\" stroke=\"steelblue\"/>",
                    pts.join(" ")
                );
            }
        }
    }
    out.push_str("</g>\n</svg>\n");
    out
}

/// Chain disks (plus pleating curves when available) as SVG items. The two
/// half-planes are drawn as their boundary lines over the chain's extent.
pub fn chain_svg_items(chain: &Chain, curves: Option<&PleatingCurves>) -> Vec<SvgItem> {
    let mut extent = 2.0f64;
    for e in &chain.entries {
        if let Boundary::Circle { center, radius } = e.disk.boundary {
            extent = extent.max(center.norm() + radius);
        }
    }
    let mut items = Vec::new();
    for e in &chain.entries {
        match e.disk.boundary {
            Boundary::Circle { center, radius } => {
                items.push(SvgItem::Circle { center, radius });
            }
            Boundary::Line { anchor, dir } => {
                items.push(SvgItem::Segment {
                    from: anchor - dir * (1.5 * extent),
                    to: anchor + dir * (1.5 * extent),
                });
            }
        }
    }
    if let Some(c) = curves {
        for arc in &c.arcs {
            items.push(SvgItem::Path {
                points: arc.samples.clone(),
            });
        }
    }
    items
}

/// Chain dump: index, carrier matrix, disk center/radius, verification
/// residuals.
pub fn chain_json(chain: &Chain, report: &ChainReport) -> serde_json::Value {
    let entries: Vec<serde_json::Value> = chain
        .entries
        .iter()
        .map(|e| {
            let disk = match e.disk.boundary {
                Boundary::Circle { center, radius } => serde_json::json!({
                    "kind": "circle",
                    "center": [center.re, center.im],
                    "radius": radius,
                }),
                Boundary::Line { anchor, dir } => serde_json::json!({
                    "kind": "half-plane",
                    "anchor": [anchor.re, anchor.im],
                    "direction": [dir.re, dir.im],
                }),
            };
            serde_json::json!({
                "index": e.index,
                "carrier": [
                    [e.carrier.a.re, e.carrier.a.im],
                    [e.carrier.b.re, e.carrier.b.im],
                    [e.carrier.c.re, e.carrier.c.im],
                    [e.carrier.d.re, e.carrier.d.im],
                ],
                "disk": disk,
            })
        })
        .collect();
    let conditions: Vec<serde_json::Value> = report
        .conditions
        .iter()
        .map(|c| {
            serde_json::json!({
                "name": c.name,
                "pass": c.pass,
                "residual": c.residual,
                "note": c.note,
            })
        })
        .collect();
    serde_json::json!({
        "fraction": format!("{}", chain.fraction),
        "upper": format!("{}", chain.upper),
        "order": chain.order,
        "mu": [chain.mu.re, chain.mu.im],
        "convention": report.convention,
        "entries": entries,
        "verification": {
            "all_pass": report.all_pass,
            "tangency_residual": report.tangency_residual,
            "min_nonadjacent_gap": report.min_nonadjacent_gap,
            "conditions": conditions,
        },
    })
}

/// Binary portable pixmap (P6), white background, black points; a comment
/// line carries the provenance string. Deterministic for fixed inputs.
pub fn raster_ppm(cloud: &PointCloud, width: usize, height: usize, comment: &str) -> Vec<u8> {
    let vp = cloud.viewport;
    let mut pixels = vec![255u8; width * height];
    for p in &cloud.points {
        if !vp.contains(p.z) {
            continue;
        }
        let fx = (p.z.re - vp.x0) / vp.width();
        let fy = (p.z.im - vp.y0) / vp.height();
        let px = ((fx * (width - 1) as f64).round() as usize).min(width - 1);
        // Image rows run top-down; the plane's y runs up.
        let py = height - 1 - ((fy * (height - 1) as f64).round() as usize).min(height - 1);
        pixels[py * width + px] = 0;
    }
    let mut out = Vec::with_capacity(width * height * 3 + 64);
    out.extend_from_slice(format!("P6\n# {comment}\n{width} {height}\n255\n").as_bytes());
    for v in pixels {
        out.extend_from_slice(&[v, v, v]);
    }
    out
}

/// Heat map of scan J-values (darker = smaller J, i.e. closer to a
/// violation), grid laid out row-major as produced by the scan.
pub fn scan_ppm(cells: &[ScanCell], grid: usize, comment: &str) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(format!("P6\n# {comment}\n{grid} {grid}\n255\n").as_bytes());
    for row in 0..grid {
        // Flip so increasing Im points up in the image.
        let r = grid - 1 - row;
        for col in 0..grid {
            let cell = &cells[r * grid + col];
            let j = cell.report.value;
            let v = (255.0 * (j / (1.0 + j))).clamp(0.0, 255.0) as u8;
            match cell.report.verdict {
                maskit_core::discreteness::Verdict::Violating => {
                    out.extend_from_slice(&[255, v / 2, v / 2])
                }
                maskit_core::discreteness::Verdict::ElementarySuspect => {
                    out.extend_from_slice(&[v / 2, v / 2, 255])
                }
                maskit_core::discreteness::Verdict::Inconclusive => {
                    out.extend_from_slice(&[v, v, v])
                }
            }
        }
    }
    out
}
