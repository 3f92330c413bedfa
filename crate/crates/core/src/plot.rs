//! Minimal SVG scatter plots of persistence diagrams.

use std::fmt::Write as _;

use crate::persistence::PersistenceDiagram;

const SIZE: f64 = 400.0;
const MARGIN: f64 = 48.0;
const COLORS: [&str; 2] = ["#1f77b4", "#d62728"];

/// Birth on x, death on y, with the diagonal `birth = death` drawn for reference.
pub fn diagram_svg(diagrams: &[PersistenceDiagram], title: &str) -> String {
    let max = diagrams
        .iter()
        .flat_map(|d| d.pairs.iter().map(|p| p.death.max(p.birth)))
        .fold(0.0f64, f64::max);
    let extent = if max > 0.0 { max * 1.05 } else { 1.0 };
    let span = SIZE - 2.0 * MARGIN;
    let x = |v: f64| MARGIN + v / extent * span;
    let y = |v: f64| SIZE - MARGIN - v / extent * span;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="24" text-anchor="middle" font-family="sans-serif" font-size="14">{}</text>"#,
        SIZE / 2.0,
        escape(title)
    );
    // axes
    let _ = writeln!(
        svg,
        r#"<path d="M{m} {b} H{r} M{m} {b} V{m}" stroke="black" fill="none"/>"#,
        m = MARGIN,
        b = SIZE - MARGIN,
        r = SIZE - MARGIN
    );
    let _ = writeln!(
        svg,
        r#"<line class="diagonal" x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="gray" stroke-dasharray="4 3"/>"#,
        x(0.0),
        y(0.0),
        x(extent),
        y(extent)
    );
    for (label, lx, ly, anchor) in [
        ("birth", SIZE / 2.0, SIZE - 12.0, "middle"),
        ("0", MARGIN, SIZE - MARGIN + 16.0, "middle"),
    ] {
        let _ = writeln!(
            svg,
            r#"<text x="{lx}" y="{ly}" text-anchor="{anchor}" font-family="sans-serif" font-size="12">{label}</text>"#
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.3}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="12">{}</text>"#,
        x(extent),
        SIZE - MARGIN + 16.0,
        format_tick(extent)
    );
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{}" text-anchor="middle" font-family="sans-serif" font-size="12" transform="rotate(-90 16 {})">death</text>"#,
        SIZE / 2.0,
        SIZE / 2.0
    );
    for d in diagrams {
        let color = COLORS[d.dim.min(COLORS.len() - 1)];
        for p in &d.pairs {
            let _ = writeln!(
                svg,
                r#"<circle class="point dim{}" cx="{:.3}" cy="{:.3}" r="3.5" fill="{color}" fill-opacity="0.8"><title>H{} ({}, {})</title></circle>"#,
                d.dim,
                x(p.birth),
                y(p.death),
                d.dim,
                p.birth,
                p.death
            );
        }
    }
    svg.push_str("</svg>\n");
    svg
}

fn format_tick(v: f64) -> String {
    let s = format!("{v:.3}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
