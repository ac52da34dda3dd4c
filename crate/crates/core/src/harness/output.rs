//! CSV and SVG writers for sweep tables.

use std::fmt::Write as _;

/// `%.12g`: twelve significant digits, trailing zeros dropped.
pub fn format_g12(x: f64) -> String {
    const DIGITS: i32 = 12;
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').unwrap_or((&sci, "0"));
    let exp: i32 = exp.parse().unwrap_or(0);
    if (-5..DIGITS).contains(&exp) {
        let decimals = (DIGITS - 1 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa.to_string()), exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

pub fn csv_table(header: &[&str], rows: &[Vec<f64>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|&v| format_g12(v)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub struct Curve {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub color: &'static str,
    /// `stroke-dasharray` value; empty for a solid line.
    pub dash: &'static str,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn ticks(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect()
}

fn tick_label(v: f64) -> String {
    let s = format!("{v:.3}");
    trim_zeros(s)
}

/// Line chart with axes, ticks, a legend and one polyline per curve.
pub fn line_chart(title: &str, x_label: &str, y_label: &str, curves: &[Curve]) -> String {
    let (w, h) = (640.0, 440.0);
    let (left, right, top, bottom) = (70.0, 20.0, 40.0, 60.0);
    let pw = w - left - right;
    let ph = h - top - bottom;

    let all = curves.iter().flat_map(|c| c.points.iter());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !(x1 > x0) {
        x1 = x0 + 1.0;
    }
    y0 = y0.min(0.0);
    if !(y1 > y0) {
        y1 = y0 + 1.0;
    }
    let sx = |x: f64| left + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| top + (1.0 - (y - y0) / (y1 - y0)) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#, w / 2.0, escape(title));
    let _ = writeln!(
        s,
        r#"<g stroke="black" stroke-width="1"><line x1="{left}" y1="{yb}" x2="{xr}" y2="{yb}"/><line x1="{left}" y1="{top}" x2="{left}" y2="{yb}"/></g>"#,
        yb = top + ph,
        xr = left + pw
    );
    for v in ticks(x0, x1, 5) {
        let x = sx(v);
        let y = top + ph;
        let _ = writeln!(s, r#"<line x1="{x:.2}" y1="{y}" x2="{x:.2}" y2="{}" stroke="black"/>"#, y + 5.0);
        let _ = writeln!(s, r#"<text x="{x:.2}" y="{}" text-anchor="middle">{}</text>"#, y + 18.0, tick_label(v));
    }
    for v in ticks(y0, y1, 5) {
        let y = sy(v);
        let _ = writeln!(s, r#"<line x1="{}" y1="{y:.2}" x2="{left}" y2="{y:.2}" stroke="black"/>"#, left - 5.0);
        let _ = writeln!(s, r#"<text x="{}" y="{:.2}" text-anchor="end">{}</text>"#, left - 8.0, y + 4.0, tick_label(v));
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, left + pw / 2.0, h - 18.0, escape(x_label));
    let _ = writeln!(
        s,
        r#"<text x="18" y="{cy}" text-anchor="middle" transform="rotate(-90 18 {cy})">{}</text>"#,
        escape(y_label),
        cy = top + ph / 2.0
    );

    for c in curves {
        let pts: Vec<String> = c.points.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        let dash = if c.dash.is_empty() { String::new() } else { format!(r#" stroke-dasharray="{}""#, c.dash) };
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{}" stroke-width="2"{dash} points="{}"/>"#,
            c.color,
            pts.join(" ")
        );
    }

    for (i, c) in curves.iter().enumerate() {
        let y = top + 14.0 + 18.0 * i as f64;
        let x = left + pw - 150.0;
        let dash = if c.dash.is_empty() { String::new() } else { format!(r#" stroke-dasharray="{}""#, c.dash) };
        let _ = writeln!(
            s,
            r#"<line x1="{x}" y1="{y}" x2="{}" y2="{y}" stroke="{}" stroke-width="2"{dash}/>"#,
            x + 30.0,
            c.color
        );
        let _ = writeln!(s, r#"<text x="{}" y="{}">{}</text>"#, x + 36.0, y + 4.0, escape(&c.label));
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g12_formatting() {
        assert_eq!(format_g12(0.0), "0");
        assert_eq!(format_g12(1.0), "1");
        assert_eq!(format_g12(4.0 / 9.0), "0.444444444444");
        assert_eq!(format_g12(-2.5), "-2.5");
        assert_eq!(format_g12(1.0 / 3.0 * 1e-7), "3.33333333333e-08");
        assert_eq!(format_g12(123456789012345.0), "1.23456789012e+14");
        assert_eq!(format_g12(0.000123), "0.000123");
        assert_eq!(format_g12(16.0 / 81.0), "0.197530864198");
    }

    #[test]
    fn g12_round_trips_twelve_digits() {
        for &x in &[std::f64::consts::PI, 1e-3 / 7.0, 5.0 / 18.0, 123.456] {
            let back: f64 = format_g12(x).parse().unwrap();
            assert!(((back - x) / x).abs() < 1e-11);
        }
    }

    #[test]
    fn csv_layout() {
        let t = csv_table(&["a", "b"], &[vec![1.0, 0.5], vec![2.0, 0.25]]);
        assert_eq!(t, "a,b\n1,0.5\n2,0.25\n");
    }

    #[test]
    fn chart_has_one_polyline_per_curve() {
        let curves = vec![
            Curve { label: "a & b".into(), points: vec![(0.0, 1.0), (1.0, 2.0)], color: "black", dash: "" },
            Curve { label: "c".into(), points: vec![(0.0, 0.5), (1.0, 0.1)], color: "red", dash: "6 3" },
        ];
        let svg = line_chart("t", "x", "y", &curves);
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains("a &amp; b"));
    }
}
