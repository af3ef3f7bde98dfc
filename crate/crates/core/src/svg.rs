//! Scatter plots as plain SVG text. Clusters are filled dots colored from a
//! fixed palette by cluster id; noise is drawn as hollow black circles and
//! each cluster center gets an outer ring.

use std::fmt::Write;

use crate::clustering::{Clustering, Label};
use crate::dataset::Dataset;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 640.0;
const MARGIN: f64 = 40.0;
const RADIUS: f64 = 3.5;

pub const PALETTE: [&str; 12] = [
    "#e6194b", "#3cb44b", "#4363d8", "#f58231", "#911eb4", "#42d4f4", "#f032e6", "#bfef45", "#469990", "#9a6324",
    "#800000", "#000075",
];

pub fn color_of(cluster: usize) -> &'static str {
    PALETTE[cluster % PALETTE.len()]
}

pub fn render_svg(dataset: &Dataset, clustering: &Clustering, title: &str) -> String {
    let pts = dataset.points();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for p in pts {
        x0 = x0.min(p.x);
        x1 = x1.max(p.x);
        y0 = y0.min(p.y);
        y1 = y1.max(p.y);
    }
    let span = (x1 - x0).max(y1 - y0);
    let scale = if span > 0.0 {
        (WIDTH - 2.0 * MARGIN).min(HEIGHT - 2.0 * MARGIN) / span
    } else {
        1.0
    };
    let px = |x: f64| MARGIN + (x - x0) * scale;
    // SVG y grows downward
    let py = |y: f64| HEIGHT - MARGIN - (y - y0) * scale;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(out, r##"<rect width="100%" height="100%" fill="#ffffff"/>"##);
    let _ = writeln!(
        out,
        r#"<text x="{MARGIN}" y="24" font-family="sans-serif" font-size="14">{} ({} clusters, {} noise)</text>"#,
        escape(title),
        clustering.num_clusters(),
        clustering.noise_count()
    );
    for (p, label) in pts.iter().zip(&clustering.labels) {
        let (cx, cy) = (px(p.x), py(p.y));
        match label {
            Label::Cluster(c) => {
                let _ = writeln!(
                    out,
                    r#"<circle cx="{cx:.2}" cy="{cy:.2}" r="{RADIUS}" fill="{}"/>"#,
                    color_of(*c)
                );
            }
            Label::Noise => {
                let _ = writeln!(
                    out,
                    r##"<circle cx="{cx:.2}" cy="{cy:.2}" r="{RADIUS}" fill="none" stroke="#000000" stroke-width="1"/>"##
                );
            }
        }
    }
    for (c, &center) in clustering.centers.iter().enumerate() {
        let p = pts[center];
        let _ = writeln!(
            out,
            r#"<circle cx="{:.2}" cy="{:.2}" r="{}" fill="none" stroke="{}" stroke-width="1.5"/>"#,
            px(p.x),
            py(p.y),
            RADIUS * 2.0,
            color_of(c)
        );
    }
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
