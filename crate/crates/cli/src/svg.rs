//! Minimal SVG 1.1 line plots.

use std::fmt::Write;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 600.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 60.0;
const BOTTOM: f64 = 70.0;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

pub struct Series {
    pub label: String,
    /// Colour key; the same key always maps to the same colour.
    pub key: usize,
    pub points: Vec<(f64, f64)>,
}

pub fn color_for(key: usize) -> &'static str {
    let idx = match key {
        1 => 0,
        2 => 1,
        3 => 2,
        4 => 3,
        6 => 4,
        12 => 5,
        other => 6 + other % 2,
    };
    PALETTE[idx]
}

/// x axis fixed to [0, 1]; y axis to [0, y_max].
pub fn render_line_plot(
    title: &str,
    x_label: &str,
    y_label: &str,
    y_max: f64,
    series: &[Series],
) -> String {
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + x * plot_w;
    let sy = |y: f64| TOP + (1.0 - y / y_max) * plot_h;

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" viewBox="0 0 {WIDTH} {HEIGHT}" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="35" text-anchor="middle" font-size="20">{}</text>"#,
        LEFT + plot_w / 2.0,
        escape(title)
    );

    // grid and ticks
    for i in 0..=10 {
        let x = i as f64 / 10.0;
        let px = sx(x);
        let _ = writeln!(
            s,
            r##"<line x1="{px:.1}" y1="{TOP}" x2="{px:.1}" y2="{:.1}" stroke="#e0e0e0"/>"##,
            TOP + plot_h
        );
        let _ = writeln!(
            s,
            r#"<text x="{px:.1}" y="{:.1}" text-anchor="middle" font-size="13">{x:.1}</text>"#,
            TOP + plot_h + 20.0
        );
    }
    let y_ticks = y_max.round().max(1.0) as usize;
    for i in 0..=y_ticks {
        let y = y_max * i as f64 / y_ticks as f64;
        let py = sy(y);
        let _ = writeln!(
            s,
            r##"<line x1="{LEFT}" y1="{py:.1}" x2="{:.1}" y2="{py:.1}" stroke="#e0e0e0"/>"##,
            LEFT + plot_w
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end" font-size="13">{y:.1}</text>"#,
            LEFT - 8.0,
            py + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT}" y="{TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-size="15">{}</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 25.0,
        escape(x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="25" y="{:.1}" text-anchor="middle" font-size="15" transform="rotate(-90 25 {:.1})">{}</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0,
        escape(y_label)
    );

    for (i, ser) in series.iter().enumerate() {
        let color = color_for(ser.key);
        let pts: Vec<String> = ser
            .points
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y.max(0.0))))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
            pts.join(" ")
        );
        let ly = TOP + 20.0 + 24.0 * i as f64;
        let lx = LEFT + plot_w + 20.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="3"/>"#,
            lx + 30.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" font-size="14">{}</text>"#,
            lx + 38.0,
            ly + 5.0,
            escape(&ser.label)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
