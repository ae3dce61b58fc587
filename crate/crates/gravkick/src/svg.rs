//! Minimal standalone SVG plots.

use std::fmt::Write as _;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 50.0;

pub struct Curve<'a> {
    pub label: &'a str,
    pub color: &'a str,
    pub points: &'a [(f64, f64)],
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !(lo.is_finite() && hi.is_finite()) {
        (0.0, 1.0)
    } else if hi > lo {
        (lo, hi)
    } else {
        (lo - 0.5, hi + 0.5)
    }
}

fn header(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(out, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="24" text-anchor="middle" font-family="sans-serif" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
}

/// Line plot of several curves sharing axes.
pub fn line_plot(title: &str, x_label: &str, curves: &[Curve]) -> String {
    let (x0, x1) = bounds(curves.iter().flat_map(|c| c.points.iter().map(|p| p.0)));
    let (y0, y1) = bounds(curves.iter().flat_map(|c| c.points.iter().map(|p| p.1)).chain([0.0]));
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let sy = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

    let mut out = String::new();
    header(&mut out, title);
    let _ = writeln!(
        out,
        r#"<g stroke="black" stroke-width="1"><line x1="{MARGIN}" y1="{0}" x2="{1}" y2="{0}"/><line x1="{MARGIN}" y1="{MARGIN}" x2="{MARGIN}" y2="{2}"/></g>"#,
        sy(0.0),
        WIDTH - MARGIN,
        HEIGHT - MARGIN,
    );
    for (x, anchor) in [(x0, "start"), (x1, "end")] {
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="{anchor}" font-family="sans-serif" font-size="11">{x}</text>"#,
            sx(x),
            HEIGHT - MARGIN + 16.0,
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="12">{}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 12.0,
        escape(x_label)
    );
    for (i, c) in curves.iter().enumerate() {
        let pts: Vec<String> = c.points.iter().map(|&(x, y)| format!("{:.3},{:.3}", sx(x), sy(y))).collect();
        let _ = writeln!(
            out,
            r#"<polyline class="curve" data-label="{}" fill="none" stroke="{}" stroke-width="1.5" points="{}"/>"#,
            escape(c.label),
            c.color,
            pts.join(" ")
        );
        let ly = MARGIN + 14.0 * i as f64;
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{ly}" fill="{}" font-family="sans-serif" font-size="11">{}</text>"#,
            WIDTH - MARGIN - 150.0,
            c.color,
            escape(c.label)
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Heatmap of `values[i][j]` (row `i` along y, column `j` along x) on a
/// log10 colour scale.
pub fn heatmap(title: &str, x_label: &str, y_label: &str, values: &[Vec<f64>]) -> String {
    let rows = values.len();
    let cols = values.first().map_or(0, Vec::len);
    let logs: Vec<f64> = values.iter().flatten().filter(|v| **v > 0.0).map(|v| v.log10()).collect();
    let (lo, hi) = bounds(logs.iter().copied());
    let cw = (WIDTH - 2.0 * MARGIN) / cols.max(1) as f64;
    let ch = (HEIGHT - 2.0 * MARGIN) / rows.max(1) as f64;

    let mut out = String::new();
    header(&mut out, title);
    for (i, row) in values.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            let t = if *v > 0.0 { ((v.log10() - lo) / (hi - lo)).clamp(0.0, 1.0) } else { 0.0 };
            let (r, b) = ((255.0 * t) as u8, (255.0 * (1.0 - t)) as u8);
            let _ = writeln!(
                out,
                r#"<rect class="cell" x="{:.3}" y="{:.3}" width="{cw:.3}" height="{ch:.3}" fill="rgb({r},64,{b})"><title>{v:.8e}</title></rect>"#,
                MARGIN + j as f64 * cw,
                HEIGHT - MARGIN - (i + 1) as f64 * ch,
            );
        }
    }
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="12">{}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 12.0,
        escape(x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="16" y="{}" transform="rotate(-90 16 {0})" text-anchor="middle" font-family="sans-serif" font-size="12">{}</text>"#,
        HEIGHT / 2.0,
        escape(y_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="end" font-family="sans-serif" font-size="11">log10 range {lo:.3} .. {hi:.3}</text>"#,
        WIDTH - MARGIN,
        MARGIN - 8.0
    );
    out.push_str("</svg>\n");
    out
}
