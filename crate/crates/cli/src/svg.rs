use std::fmt::Write as _;

const W: f64 = 640.0;
const H: f64 = 400.0;
const PAD: f64 = 48.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    /// Markers instead of a polyline.
    pub markers: bool,
}

fn range(vals: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = vals.filter(|v| v.is_finite()).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-12 * (1.0 + lo.abs()) {
        return (lo - 0.5, hi + 0.5);
    }
    let m = 0.05 * (hi - lo);
    (lo - m, hi + m)
}

/// Line plot of several series on common axes. With `log`, both axes are log10.
pub fn plot(title: &str, xlabel: &str, ylabel: &str, series: &[Series], log: bool) -> String {
    let tr = |v: f64| if log { v.log10() } else { v };
    let (x0, x1) = range(series.iter().flat_map(|s| s.points.iter().map(|p| tr(p.0))));
    let (y0, y1) = range(series.iter().flat_map(|s| s.points.iter().map(|p| tr(p.1))));
    let sx = |x: f64| PAD + (tr(x) - x0) / (x1 - x0) * (W - 2.0 * PAD);
    let sy = |y: f64| H - PAD - (tr(y) - y0) / (y1 - y0) * (H - 2.0 * PAD);
    let mut out = String::new();
    writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#).unwrap();
    writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#).unwrap();
    writeln!(out, r#"<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>"#).unwrap();
    writeln!(out, r#"<rect x="{PAD}" y="{PAD}" width="{}" height="{}" fill="none" stroke="black"/>"#, W - 2.0 * PAD, H - 2.0 * PAD).unwrap();
    writeln!(out, r#"<text x="{}" y="24" font-size="14" text-anchor="middle">{}</text>"#, W / 2.0, escape(title)).unwrap();
    writeln!(out, r#"<text x="{}" y="{}" font-size="12" text-anchor="middle">{}</text>"#, W / 2.0, H - 12.0, escape(xlabel)).unwrap();
    writeln!(out, r#"<text x="14" y="{}" font-size="12" text-anchor="middle" transform="rotate(-90 14 {})">{}</text>"#, H / 2.0, H / 2.0, escape(ylabel)).unwrap();
    for (v, anchor, x, y) in [(x0, "start", PAD, H - PAD + 14.0), (x1, "end", W - PAD, H - PAD + 14.0)] {
        writeln!(out, r#"<text x="{x}" y="{y}" font-size="10" text-anchor="{anchor}">{}</text>"#, tick(v, log)).unwrap();
    }
    for (v, y) in [(y0, H - PAD), (y1, PAD + 10.0)] {
        writeln!(out, r#"<text x="{}" y="{y}" font-size="10" text-anchor="end">{}</text>"#, PAD - 4.0, tick(v, log)).unwrap();
    }
    for (i, s) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        if s.markers {
            for &(x, y) in &s.points {
                writeln!(out, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#, sx(x), sy(y)).unwrap();
            }
        } else {
            let pts: Vec<String> = s.points.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
            writeln!(out, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, pts.join(" ")).unwrap();
        }
        writeln!(out, r#"<text x="{}" y="{}" font-size="11" fill="{color}">{}</text>"#, W - PAD - 120.0, PAD + 16.0 + 14.0 * i as f64, escape(&s.label)).unwrap();
    }
    out.push_str("</svg>\n");
    out
}

/// Rays `x = speed · t` of a wave fan in the `(x, t)` plane; rarefactions are shaded.
pub fn fan_diagram(title: &str, waves: &[(f64, f64)]) -> String {
    let reach = waves.iter().flat_map(|w| [w.0.abs(), w.1.abs()]).fold(1e-3, f64::max) * 1.2;
    let sx = |x: f64| W / 2.0 + x / reach * (W / 2.0 - PAD);
    let (top, bottom) = (PAD, H - PAD);
    let mut out = String::new();
    writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#).unwrap();
    writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#).unwrap();
    writeln!(out, r#"<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>"#).unwrap();
    writeln!(out, r#"<text x="{}" y="24" font-size="14" text-anchor="middle">{}</text>"#, W / 2.0, escape(title)).unwrap();
    writeln!(out, r#"<line x1="{PAD}" y1="{bottom}" x2="{}" y2="{bottom}" stroke="black"/>"#, W - PAD).unwrap();
    writeln!(out, r#"<text x="{}" y="{}" font-size="12">x</text>"#, W - PAD + 6.0, bottom + 4.0).unwrap();
    writeln!(out, r#"<text x="{}" y="{}" font-size="12">t</text>"#, W / 2.0 + 4.0, top - 6.0).unwrap();
    for (i, &(a, b)) in waves.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let (xa, xb) = (sx(a), sx(b));
        if (b - a).abs() > 1e-12 {
            writeln!(out, r#"<polygon points="{:.2},{bottom} {xa:.2},{top} {xb:.2},{top}" fill="{color}" fill-opacity="0.25" stroke="{color}"/>"#, sx(0.0)).unwrap();
        } else {
            writeln!(out, r#"<line x1="{:.2}" y1="{bottom}" x2="{xa:.2}" y2="{top}" stroke="{color}" stroke-width="2"/>"#, sx(0.0)).unwrap();
        }
    }
    out.push_str("</svg>\n");
    out
}

fn tick(v: f64, log: bool) -> String {
    if log {
        format!("1e{v:.1}")
    } else {
        format!("{v:.3}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
