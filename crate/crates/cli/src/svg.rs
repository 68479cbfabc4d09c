//! Minimal self-contained SVG line plots.

use std::fmt::Write;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const LEFT: f64 = 64.0;
const RIGHT: f64 = 620.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 360.0;

pub struct LinePlot<'a> {
    pub title: &'a str,
    pub x_label: &'a str,
    pub y_label: &'a str,
    /// `(key, value)` pairs written into `<metadata>`.
    pub metadata: Vec<(&'a str, String)>,
    pub points: &'a [(f64, f64)],
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !(lo < hi) {
        let pad = lo.abs().max(1.0) * 0.05;
        (lo - pad, hi + pad)
    } else {
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    }
}

impl LinePlot<'_> {
    pub fn render(&self) -> String {
        let (x0, x1) = range(self.points.iter().map(|p| p.0));
        let (y0, y1) = range(self.points.iter().map(|p| p.1));
        let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * (RIGHT - LEFT);
        let sy = |y: f64| BOTTOM - (y - y0) / (y1 - y0) * (BOTTOM - TOP);

        let mut out = String::new();
        out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
        let _ = writeln!(
            out,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">"
        );
        let _ = writeln!(out, "<title>{}</title>", escape(self.title));
        out.push_str("<metadata>\n");
        for (k, v) in &self.metadata {
            let _ = writeln!(out, "{}={}", escape(k), escape(v));
        }
        out.push_str("</metadata>\n");
        let _ = writeln!(out, "<rect x=\"0\" y=\"0\" width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>");
        let _ = writeln!(
            out,
            "<rect x=\"{LEFT}\" y=\"{TOP}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>",
            RIGHT - LEFT,
            BOTTOM - TOP
        );
        if y0 < 0.0 && y1 > 0.0 {
            let _ = writeln!(
                out,
                "<line x1=\"{LEFT}\" y1=\"{z:.3}\" x2=\"{RIGHT}\" y2=\"{z:.3}\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>",
                z = sy(0.0)
            );
        }
        for (x, anchor) in [(x0, "start"), (x1, "end")] {
            let _ = writeln!(
                out,
                "<text x=\"{:.3}\" y=\"{}\" font-size=\"12\" text-anchor=\"{anchor}\">{}</text>",
                sx(x),
                BOTTOM + 16.0,
                crate::format::fmt_g(round_label(x))
            );
        }
        for y in [y0, y1] {
            let _ = writeln!(
                out,
                "<text x=\"{}\" y=\"{:.3}\" font-size=\"12\" text-anchor=\"end\">{}</text>",
                LEFT - 4.0,
                sy(y) + 4.0,
                crate::format::fmt_g(round_label(y))
            );
        }
        let _ = writeln!(
            out,
            "<text x=\"{}\" y=\"{}\" font-size=\"13\" text-anchor=\"middle\">{}</text>",
            0.5 * (LEFT + RIGHT),
            BOTTOM + 34.0,
            escape(self.x_label)
        );
        let _ = writeln!(
            out,
            "<text x=\"16\" y=\"{}\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 16 {})\">{}</text>",
            0.5 * (TOP + BOTTOM),
            0.5 * (TOP + BOTTOM),
            escape(self.y_label)
        );
        let _ = writeln!(
            out,
            "<text x=\"{}\" y=\"24\" font-size=\"14\" text-anchor=\"middle\">{}</text>",
            0.5 * (LEFT + RIGHT),
            escape(self.title)
        );
        out.push_str("<polyline fill=\"none\" stroke=\"#1f4e99\" stroke-width=\"1.5\" points=\"");
        for (i, &(x, y)) in self.points.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{:.3},{:.3}", sx(x), sy(y));
        }
        out.push_str("\"/>\n</svg>\n");
        out
    }
}

fn round_label(v: f64) -> f64 {
    (v * 1e4).round() / 1e4
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn structure() {
        let pts = [(0.0, 0.0), (0.5, 1.0), (1.0, 0.0)];
        let svg = LinePlot {
            title: "a < b",
            x_label: "x",
            y_label: "u",
            metadata: vec![("lambda", "1".into())],
            points: &pts,
        }
        .render();
        assert_eq!(svg.matches("<svg").count(), 1);
        assert!(svg.contains("viewBox=\"0 0 640 400\""));
        assert!(svg.contains("<polyline"));
        assert!(svg.contains("lambda=1"));
        assert!(svg.contains("a &lt; b"));
        assert!(svg.trim_end().ends_with("</svg>"));
    }
}
