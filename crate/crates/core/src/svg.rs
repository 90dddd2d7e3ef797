//! Static SVG figures: log-log line plots of beta traces and triangle
//! heatmaps of a per-vertex scalar (diverging palette centered at zero).
//! Write-only conveniences; nothing downstream depends on pixels.

use crate::error::Result;
use crate::mesh::Mesh;
use std::fmt::Write as _;
use std::path::Path;

const W: f64 = 720.0;
const H: f64 = 540.0;
const MARGIN: f64 = 60.0;

/// Simple multi-series line plot. `log_log` plots log10 of both axes.
pub fn line_plot(
    path: &Path,
    title: &str,
    series: &[(&str, Vec<(f64, f64)>)],
    log_log: bool,
    meta_comment: &str,
) -> Result<()> {
    let tf = |v: f64| if log_log { v.log10() } else { v };
    let mut xs: Vec<f64> = Vec::new();
    let mut ys: Vec<f64> = Vec::new();
    for (_, pts) in series {
        for &(x, y) in pts {
            let (x, y) = (tf(x), tf(y));
            if x.is_finite() && y.is_finite() {
                xs.push(x);
                ys.push(y);
            }
        }
    }
    let (x0, x1) = span(&xs);
    let (y0, y1) = span(&ys);
    let sx = |x: f64| MARGIN + (tf(x) - x0) / (x1 - x0) * (W - 2.0 * MARGIN);
    let sy = |y: f64| H - MARGIN - (tf(y) - y0) / (y1 - y0) * (H - 2.0 * MARGIN);

    let palette = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"];
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    let _ = writeln!(s, "<!-- {meta_comment} -->");
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="24" text-anchor="middle" font-family="monospace" font-size="15">{title}</text>"#,
        W / 2.0
    );
    let _ = writeln!(
        s,
        r##"<rect x="{MARGIN}" y="{MARGIN}" width="{}" height="{}" fill="none" stroke="#555"/>"##,
        W - 2.0 * MARGIN,
        H - 2.0 * MARGIN
    );
    for (i, (name, pts)) in series.iter().enumerate() {
        let color = palette[i % palette.len()];
        let d: Vec<String> = pts
            .iter()
            .filter(|(x, y)| tf(*x).is_finite() && tf(*y).is_finite())
            .enumerate()
            .map(|(j, &(x, y))| {
                format!("{}{:.2},{:.2}", if j == 0 { "M" } else { "L" }, sx(x), sy(y))
            })
            .collect();
        let _ = writeln!(
            s,
            r#"<path d="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
            d.join(" ")
        );
        for &(x, y) in pts.iter() {
            if tf(x).is_finite() && tf(y).is_finite() {
                let _ = writeln!(
                    s,
                    r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{color}"/>"#,
                    sx(x),
                    sy(y)
                );
            }
        }
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-family="monospace" font-size="12" fill="{color}">{name}</text>"#,
            W - MARGIN + 5.0,
            MARGIN + 16.0 * (i as f64 + 1.0)
        );
    }
    s.push_str("</svg>\n");
    std::fs::write(path, s)?;
    Ok(())
}

/// Triangle heatmap of a per-vertex scalar: blue negative, white zero,
/// red positive, scaled symmetrically around zero.
pub fn mesh_heatmap(
    path: &Path,
    mesh: &Mesh,
    values: &[f64],
    title: &str,
    meta_comment: &str,
) -> Result<()> {
    let finite: Vec<f64> = values.iter().copied().filter(|v| v.is_finite()).collect();
    let amp = finite.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
    let (mut min, mut max) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in &mesh.vertices {
        for a in 0..2 {
            min[a] = min[a].min(p[a]);
            max[a] = max[a].max(p[a]);
        }
    }
    let scale = (W - 2.0 * MARGIN) / (max[0] - min[0]).max(max[1] - min[1]);
    let sx = |p: [f64; 2]| MARGIN + (p[0] - min[0]) * scale;
    let sy = |p: [f64; 2]| H - MARGIN - (p[1] - min[1]) * scale;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    let _ = writeln!(s, "<!-- {meta_comment} -->");
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="24" text-anchor="middle" font-family="monospace" font-size="15">{title}</text>"#,
        W / 2.0
    );
    for t in &mesh.triangles {
        let v = (values[t[0]] + values[t[1]] + values[t[2]]) / 3.0;
        let color = diverging(v / amp);
        let p: Vec<String> = t
            .iter()
            .map(|&i| format!("{:.2},{:.2}", sx(mesh.vertices[i]), sy(mesh.vertices[i])))
            .collect();
        let _ = writeln!(
            s,
            r#"<polygon points="{}" fill="{color}" stroke="none"/>"#,
            p.join(" ")
        );
    }
    s.push_str("</svg>\n");
    std::fs::write(path, s)?;
    Ok(())
}

fn span(vals: &[f64]) -> (f64, f64) {
    let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !lo.is_finite() || !hi.is_finite() {
        (0.0, 1.0)
    } else if hi - lo < 1e-12 {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

/// t in [-1, 1] -> blue / white / red.
fn diverging(t: f64) -> String {
    let t = t.clamp(-1.0, 1.0);
    let (r, g, b) = if t < 0.0 {
        let w = 1.0 + t;
        (59.0 + w * 196.0, 76.0 + w * 179.0, 192.0 + w * 63.0)
    } else {
        let w = 1.0 - t;
        (180.0 + w * 75.0, 4.0 + w * 251.0, 38.0 + w * 217.0)
    };
    format!("rgb({},{},{})", r as u8, g as u8, b as u8)
}
