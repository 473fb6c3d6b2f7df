//! Self-contained SVG scatter plots with an optional fitted line.

use std::io::Write;
use std::path::Path;

const W: f64 = 640.0;
const H: f64 = 440.0;
const MARGIN: f64 = 60.0;

pub struct Plot<'a> {
    pub title: &'a str,
    pub x_label: &'a str,
    pub y_label: &'a str,
    /// Data points (already in plot coordinates, e.g. log10 values).
    pub points: &'a [(f64, f64)],
    /// Optional y = slope x + intercept line drawn across the x-range.
    pub line: Option<(f64, f64)>,
}

pub fn write_plot(path: &Path, plot: &Plot) -> std::io::Result<()> {
    let (mut x_lo, mut x_hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y_lo, mut y_hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in plot.points {
        x_lo = x_lo.min(x);
        x_hi = x_hi.max(x);
        y_lo = y_lo.min(y);
        y_hi = y_hi.max(y);
    }
    if let Some((m, b)) = plot.line {
        y_lo = y_lo.min(m * x_lo + b).min(m * x_hi + b);
        y_hi = y_hi.max(m * x_lo + b).max(m * x_hi + b);
    }
    if !x_lo.is_finite() {
        x_lo = 0.0;
        x_hi = 1.0;
        y_lo = 0.0;
        y_hi = 1.0;
    }
    let pad = |lo: &mut f64, hi: &mut f64| {
        let span = (*hi - *lo).max(1e-12);
        *lo -= 0.06 * span;
        *hi += 0.06 * span;
    };
    pad(&mut x_lo, &mut x_hi);
    pad(&mut y_lo, &mut y_hi);

    let sx = |x: f64| MARGIN + (x - x_lo) / (x_hi - x_lo) * (W - 2.0 * MARGIN);
    let sy = |y: f64| H - MARGIN - (y - y_lo) / (y_hi - y_lo) * (H - 2.0 * MARGIN);

    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n"
    ));
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    out.push_str(&format!(
        "<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">{}</text>\n",
        W / 2.0,
        xml_escape(plot.title)
    ));
    // axes
    out.push_str(&format!(
        "<line x1=\"{m}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>\n<line x1=\"{m}\" y1=\"{t}\" x2=\"{m}\" y2=\"{b}\" stroke=\"black\"/>\n",
        m = MARGIN,
        r = W - MARGIN,
        t = MARGIN,
        b = H - MARGIN
    ));
    // ticks
    for i in 0..=5 {
        let fx = x_lo + (x_hi - x_lo) * i as f64 / 5.0;
        let fy = y_lo + (y_hi - y_lo) * i as f64 / 5.0;
        out.push_str(&format!(
            "<line x1=\"{x}\" y1=\"{b}\" x2=\"{x}\" y2=\"{b2}\" stroke=\"black\"/>\n<text x=\"{x}\" y=\"{ty}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">{v:.2}</text>\n",
            x = sx(fx),
            b = H - MARGIN,
            b2 = H - MARGIN + 5.0,
            ty = H - MARGIN + 18.0,
            v = fx
        ));
        out.push_str(&format!(
            "<line x1=\"{m}\" y1=\"{y}\" x2=\"{m2}\" y2=\"{y}\" stroke=\"black\"/>\n<text x=\"{tx}\" y=\"{y2}\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">{v:.2}</text>\n",
            m = MARGIN,
            m2 = MARGIN - 5.0,
            y = sy(fy),
            tx = MARGIN - 8.0,
            y2 = sy(fy) + 4.0,
            v = fy
        ));
    }
    // labels
    out.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">{}</text>\n",
        W / 2.0,
        H - 12.0,
        xml_escape(plot.x_label)
    ));
    out.push_str(&format!(
        "<text x=\"16\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 16 {})\">{}</text>\n",
        H / 2.0,
        H / 2.0,
        xml_escape(plot.y_label)
    ));
    if let Some((m, b)) = plot.line {
        out.push_str(&format!(
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#c22\" stroke-width=\"1.5\"/>\n",
            sx(x_lo),
            sy(m * x_lo + b),
            sx(x_hi),
            sy(m * x_hi + b)
        ));
    }
    for &(x, y) in plot.points {
        out.push_str(&format!(
            "<circle cx=\"{}\" cy=\"{}\" r=\"3.5\" fill=\"#226\" fill-opacity=\"0.8\"/>\n",
            sx(x),
            sy(y)
        ));
    }
    out.push_str("</svg>\n");
    let mut f = std::fs::File::create(path)?;
    f.write_all(out.as_bytes())
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
