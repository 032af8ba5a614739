//! Resonance scatter in the `s`-plane as a standalone SVG.

use std::fmt::Write as _;

use warpres::resonance::Resonance;

const WIDTH: f64 = 900.0;
const HEIGHT: f64 = 640.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 190.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 60.0;
const LEGEND_ROWS: usize = 24;

/// Colour of the `k`-th spectral line: hues spaced by the golden angle.
fn colour(k: usize) -> String {
    let hue = (k as f64 * 137.507_764) % 360.0;
    format!("hsl({hue:.1},70%,42%)")
}

/// Round `v` up to a multiple of `step`.
fn ceil_to(v: f64, step: f64) -> f64 {
    (v / step).ceil() * step
}

fn tick_step(span: f64) -> f64 {
    let raw = span / 8.0;
    let mag = 10f64.powf(raw.log10().floor());
    [1.0, 2.0, 5.0, 10.0].iter().map(|m| m * mag).find(|s| *s >= raw).unwrap_or(10.0 * mag)
}

/// Scatter of `(Re s, |Im s|)`, one marker per resonance with area
/// proportional to its multiplicity, coloured by spectral line.
pub fn resonance_svg(resonances: &[Resonance], n: usize, title: &str) -> String {
    let half = n as f64 / 2.0;
    let x_max = half + 0.5;
    let x_min = resonances.iter().map(|z| z.s.re).fold(half - 1.0, f64::min);
    let y_max = resonances.iter().map(|z| z.s.im.abs()).fold(1.0, f64::max);
    let xs = tick_step(x_max - x_min);
    let ys = tick_step(y_max);
    let x_min = -ceil_to(-x_min, xs);
    let y_max = ceil_to(y_max, ys);
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let px = |x: f64| LEFT + (x - x_min) / (x_max - x_min) * pw;
    let py = |y: f64| TOP + (1.0 - y / y_max) * ph;

    let mut lines: Vec<(f64, u64)> = Vec::new();
    for z in resonances {
        if lines.last().map_or(true, |l| l.0 != z.lambda) {
            lines.push((z.lambda, z.mult_lambda));
        }
    }
    let line_index = |lambda: f64| lines.iter().position(|l| l.0 == lambda).unwrap_or(0);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="18" text-anchor="middle" font-size="14">{}</text>"#, LEFT + pw / 2.0, escape(title));
    // Axes and ticks.
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    let mut x = x_min;
    while x <= x_max + 1e-9 {
        let gx = px(x);
        let _ = writeln!(
            s,
            r#"<line x1="{gx:.2}" y1="{:.2}" x2="{gx:.2}" y2="{:.2}" stroke="black"/><text x="{gx:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            TOP + ph,
            TOP + ph + 5.0,
            TOP + ph + 19.0,
            fmt_tick(x)
        );
        x += xs;
    }
    let mut y = 0.0;
    while y <= y_max + 1e-9 {
        let gy = py(y);
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{gy:.2}" x2="{LEFT}" y2="{gy:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT - 5.0,
            LEFT - 8.0,
            gy + 4.0,
            fmt_tick(y)
        );
        y += ys;
    }
    let _ = writeln!(
        s,
        r#"<line x1="{0:.2}" y1="{TOP}" x2="{0:.2}" y2="{1:.2}" stroke="grey" stroke-dasharray="4 3"/>"#,
        px(half),
        TOP + ph
    );
    let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">Re s</text>"#, LEFT + pw / 2.0, HEIGHT - 15.0);
    let _ = writeln!(
        s,
        r#"<text x="18" y="{0:.2}" text-anchor="middle" transform="rotate(-90 18 {0:.2})">|Im s|</text>"#,
        TOP + ph / 2.0
    );
    // Markers.
    for z in resonances {
        let k = line_index(z.lambda);
        let r = 1.6 * (z.mult_lambda as f64 * z.order as f64).sqrt().min(12.0);
        let _ = writeln!(
            s,
            r#"<circle cx="{:.2}" cy="{:.2}" r="{r:.2}" fill="{}" fill-opacity="0.7"/>"#,
            px(z.s.re),
            py(z.s.im.abs()),
            colour(k)
        );
    }
    // Legend.
    let lx = WIDTH - RIGHT + 15.0;
    let _ = writeln!(s, r#"<text x="{lx}" y="{}">λ (mult)</text>"#, TOP + 10.0);
    for (k, (lambda, mult)) in lines.iter().enumerate().take(LEGEND_ROWS) {
        let ly = TOP + 28.0 + 20.0 * k as f64;
        let _ = writeln!(
            s,
            r#"<circle cx="{lx}" cy="{:.2}" r="5" fill="{}"/><text x="{}" y="{:.2}">{lambda:.4} ({mult})</text>"#,
            ly - 4.0,
            colour(k),
            lx + 12.0,
            ly
        );
    }
    if lines.len() > LEGEND_ROWS {
        let ly = TOP + 28.0 + 20.0 * LEGEND_ROWS as f64;
        let _ = writeln!(s, r#"<text x="{lx}" y="{ly:.2}">+{} more</text>"#, lines.len() - LEGEND_ROWS);
    }
    s.push_str("</svg>\n");
    s
}

fn fmt_tick(v: f64) -> String {
    let r = (v * 1e6).round() / 1e6;
    if r == r.trunc() {
        format!("{}", r as i64)
    } else {
        format!("{r}")
    }
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
