//! CSV and SVG writers.

use std::fmt::Write;

/// Significant digits in CSV output.
pub const SIGNIFICANT_DIGITS: usize = 12;

/// `value` rounded to 12 significant digits, in plain decimal notation
/// unless the exponent is outside `[-5, 15)`.
pub fn format_number(value: f64) -> String {
    if value.is_nan() {
        return "nan".into();
    }
    if value.is_infinite() {
        return if value > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if value == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, value);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..15).contains(&exp) {
        return format!("{}e{}", trim_zeros(mantissa), exp);
    }
    let rounded: f64 = sci.parse().expect("round-trips");
    let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{rounded:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// A time series table: one column per channel.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub times: Vec<f64>,
    pub channels: Vec<String>,
    pub columns: Vec<Vec<f64>>,
}

impl Table {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t");
        for c in &self.channels {
            out.push(',');
            out.push_str(c);
        }
        out.push('\n');
        for (i, t) in self.times.iter().enumerate() {
            out.push_str(&format_number(*t));
            for col in &self.columns {
                out.push(',');
                out.push_str(&format_number(col[i]));
            }
            out.push('\n');
        }
        out
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.channels.iter().position(|c| c == name).map(|i| self.columns[i].as_slice())
    }
}

const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"];

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 640.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 450.0;

/// Line plot of every channel against `t`, 800×500 viewBox, legend on the right.
pub fn svg_plot(title: &str, table: &Table) -> String {
    let t0 = table.times.first().copied().unwrap_or(0.0);
    let t1 = table.times.last().copied().unwrap_or(1.0);
    let finite = table.columns.iter().flatten().copied().filter(|v| v.is_finite());
    let (mut lo, mut hi) = finite.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        (lo, hi) = (0.0, 1.0);
    }
    if hi - lo < 1e-12 * hi.abs().max(1.0) {
        let pad = 0.05 * hi.abs().max(1.0);
        lo -= pad;
        hi += pad;
    }
    let tx = |t: f64| LEFT + (t - t0) / (t1 - t0).max(f64::MIN_POSITIVE) * (RIGHT - LEFT);
    let vy = |v: f64| BOTTOM - (v - lo) / (hi - lo) * (BOTTOM - TOP);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" width="{WIDTH}" height="{HEIGHT}">"#
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="20" font-family="sans-serif" font-size="14" text-anchor="middle">{}</text>"#,
        (LEFT + RIGHT) / 2.0,
        escape(title)
    );
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT}" y="{TOP}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        RIGHT - LEFT,
        BOTTOM - TOP
    );
    for (x, anchor, label) in [(LEFT, "start", t0), (RIGHT, "end", t1)] {
        let _ = writeln!(
            s,
            r#"<text x="{x}" y="{}" font-family="sans-serif" font-size="11" text-anchor="{anchor}">{}</text>"#,
            BOTTOM + 16.0,
            tick(label)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle">t</text>"#,
        (LEFT + RIGHT) / 2.0,
        BOTTOM + 32.0
    );
    for (y, label) in [(BOTTOM, lo), (TOP + 10.0, hi)] {
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{y}" font-family="sans-serif" font-size="11" text-anchor="end">{}</text>"#,
            LEFT - 6.0,
            tick(label)
        );
    }
    for (i, (name, col)) in table.channels.iter().zip(&table.columns).enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let points: Vec<String> = table
            .times
            .iter()
            .zip(col)
            .filter(|(_, v)| v.is_finite())
            .map(|(t, v)| format!("{:.2},{:.2}", tx(*t), vy(*v)))
            .collect();
        let _ =
            writeln!(s, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, points.join(" "));
        let ly = TOP + 10.0 + 18.0 * i as f64;
        let _ = writeln!(s, r#"<line x1="655" y1="{ly}" x2="680" y2="{ly}" stroke="{color}" stroke-width="2"/>"#);
        let _ = writeln!(
            s,
            r#"<text x="686" y="{}" font-family="sans-serif" font-size="12">{}</text>"#,
            ly + 4.0,
            escape(name)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn tick(v: f64) -> String {
    format!("{:.4}", v).trim_end_matches('0').trim_end_matches('.').to_string()
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
