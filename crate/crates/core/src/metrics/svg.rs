//! Minimal static SVG charts: error boxplots by label group and label
//! histograms.

use std::fmt::Write as _;

use super::GroupStats;

const W: f64 = 640.0;
const H: f64 = 400.0;
const LEFT: f64 = 60.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;

fn frame(out: &mut String, title: &str, x_label: &str, y_label: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(out, r#"<text x="{}" y="22" text-anchor="middle" font-size="15">{}</text>"#, W / 2.0, escape(title));
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        (LEFT + W - RIGHT) / 2.0,
        H - 10.0,
        escape(x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
        H / 2.0,
        H / 2.0,
        escape(y_label)
    );
    let _ = writeln!(
        out,
        r#"<path d="M{LEFT} {TOP} V{} H{}" stroke="black" fill="none"/>"#,
        H - BOTTOM,
        W - RIGHT
    );
}

fn y_axis(out: &mut String, max: f64) -> impl Fn(f64) -> f64 {
    let max = if max > 0.0 { max } else { 1.0 };
    let plot_h = H - TOP - BOTTOM;
    for k in 0..=4 {
        let v = max * k as f64 / 4.0;
        let y = H - BOTTOM - plot_h * k as f64 / 4.0;
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#,
            LEFT - 6.0,
            y + 4.0,
            tick(v)
        );
    }
    move |v: f64| H - BOTTOM - plot_h * (v / max)
}

fn tick(v: f64) -> String {
    if v >= 10.0 || v == v.round() {
        format!("{v:.0}")
    } else {
        format!("{v:.2}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// One box per group, labeled `(lo, hi]`; empty groups leave a gap.
pub fn boxplot_svg(groups: &[GroupStats], title: &str, y_label: &str) -> String {
    let mut out = String::new();
    frame(&mut out, title, "actual value group", y_label);
    let max = groups.iter().filter_map(|g| g.whisker_hi).fold(0.0, f64::max);
    let y = y_axis(&mut out, max * 1.05);
    let slot = (W - LEFT - RIGHT) / groups.len().max(1) as f64;
    for (i, g) in groups.iter().enumerate() {
        let cx = LEFT + slot * (i as f64 + 0.5);
        let _ = writeln!(
            out,
            r#"<text x="{cx}" y="{}" text-anchor="middle" font-size="10">({}, {}]</text>"#,
            H - BOTTOM + 14.0,
            g.bin_lo,
            g.bin_hi
        );
        let (Some(q1), Some(med), Some(q3), Some(lo), Some(hi)) = (g.q1, g.median, g.q3, g.whisker_lo, g.whisker_hi) else {
            continue;
        };
        let half = slot * 0.3;
        let _ = writeln!(
            out,
            r#"<line x1="{cx}" y1="{}" x2="{cx}" y2="{}" stroke="black"/><line x1="{cx}" y1="{}" x2="{cx}" y2="{}" stroke="black"/>"#,
            y(hi),
            y(q3),
            y(q1),
            y(lo)
        );
        let _ = writeln!(
            out,
            r#"<rect x="{}" y="{}" width="{}" height="{}" fill="steelblue" fill-opacity="0.5" stroke="black"/>"#,
            cx - half,
            y(q3),
            2.0 * half,
            (y(q1) - y(q3)).max(0.5)
        );
        let _ = writeln!(
            out,
            r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="black" stroke-width="2"/>"#,
            cx - half,
            y(med),
            cx + half,
            y(med)
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Bar chart of `(value, count)` pairs.
pub fn histogram_svg(bins: &[(usize, u64)], title: &str, x_label: &str) -> String {
    let mut out = String::new();
    frame(&mut out, title, x_label, "records");
    let max = bins.iter().map(|&(_, c)| c).max().unwrap_or(0) as f64;
    let y = y_axis(&mut out, max);
    let lo = bins.iter().map(|&(v, _)| v).min().unwrap_or(0);
    let hi = bins.iter().map(|&(v, _)| v).max().unwrap_or(0);
    let slot = (W - LEFT - RIGHT) / (hi - lo + 1) as f64;
    let label_every = ((hi - lo + 1) / 12).max(1);
    for &(v, c) in bins {
        let x = LEFT + slot * (v - lo) as f64;
        let _ = writeln!(
            out,
            r#"<rect x="{}" y="{}" width="{}" height="{}" fill="steelblue"/>"#,
            x + slot * 0.1,
            y(c as f64),
            slot * 0.8,
            H - BOTTOM - y(c as f64)
        );
        if (v - lo) % label_every == 0 {
            let _ = writeln!(
                out,
                r#"<text x="{}" y="{}" text-anchor="middle" font-size="10">{v}</text>"#,
                x + slot / 2.0,
                H - BOTTOM + 14.0
            );
        }
    }
    out.push_str("</svg>\n");
    out
}
