//! Static SVG line and scatter plots.

use std::fmt::Write as _;

use anyhow::{bail, Result};

use cubedisc::quadrature::FitReport;

const W: f64 = 640.0;
const H: f64 = 420.0;
const PAD: f64 = 56.0;

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn fit(xs: &[f64], ys: &[f64]) -> Self {
        let (x0, x1) = bounds(xs);
        let (y0, y1) = bounds(ys);
        Self { x0, x1, y0, y1 }
    }

    fn px(&self, x: f64) -> f64 {
        PAD + (x - self.x0) / (self.x1 - self.x0) * (W - 2.0 * PAD)
    }

    fn py(&self, y: f64) -> f64 {
        H - PAD - (y - self.y0) / (self.y1 - self.y0) * (H - 2.0 * PAD)
    }
}

fn bounds(v: &[f64]) -> (f64, f64) {
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi > lo {
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    } else {
        (lo - 1.0, hi + 1.0)
    }
}

fn header(out: &mut String, title: &str, xlabel: &str, ylabel: &str, f: &Frame) {
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\" font-family=\"sans-serif\" font-size=\"12\">"
    );
    let _ = writeln!(out, "<rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>");
    let _ = writeln!(
        out,
        "<rect x=\"{PAD}\" y=\"{PAD}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>",
        W - 2.0 * PAD,
        H - 2.0 * PAD
    );
    let _ = writeln!(
        out,
        "<text x=\"{}\" y=\"24\" text-anchor=\"middle\">{title}</text>",
        W / 2.0
    );
    let _ = writeln!(
        out,
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{xlabel}</text>",
        W / 2.0,
        H - 14.0
    );
    let _ = writeln!(
        out,
        "<text x=\"16\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {})\">{ylabel}</text>",
        H / 2.0,
        H / 2.0
    );
    for (v, anchor, x, y) in [
        (f.x0, "start", PAD, H - PAD + 16.0),
        (f.x1, "end", W - PAD, H - PAD + 16.0),
    ] {
        let _ = writeln!(
            out,
            "<text x=\"{x}\" y=\"{y}\" text-anchor=\"{anchor}\">{v:.3}</text>"
        );
    }
    for (v, y) in [(f.y0, H - PAD), (f.y1, PAD + 10.0)] {
        let _ = writeln!(
            out,
            "<text x=\"{}\" y=\"{y}\" text-anchor=\"end\">{v:.3}</text>",
            PAD - 4.0
        );
    }
}

fn polyline(out: &mut String, f: &Frame, xs: &[f64], ys: &[f64], stroke: &str, dash: bool) {
    let pts: Vec<String> = xs
        .iter()
        .zip(ys)
        .map(|(&x, &y)| format!("{:.2},{:.2}", f.px(x), f.py(y)))
        .collect();
    let dash = if dash { " stroke-dasharray=\"6 4\"" } else { "" };
    let _ = writeln!(
        out,
        "<polyline points=\"{}\" fill=\"none\" stroke=\"{stroke}\" stroke-width=\"1.5\"{dash}/>",
        pts.join(" ")
    );
}

/// Spherical integral of `|D|` against `r`.
pub fn profile_svg(title: &str, r: &[f64], values: &[f64]) -> Result<String> {
    if r.is_empty() || r.len() != values.len() {
        bail!("cannot plot an empty profile");
    }
    let f = Frame::fit(r, values);
    let mut out = String::new();
    header(&mut out, title, "r", "integral of |D| over directions", &f);
    polyline(&mut out, &f, r, values, "#1f4e9c", false);
    out.push_str("</svg>\n");
    Ok(out)
}

/// `log S(M)` against `log M` with reference slopes 0 and `d − 1` through the first point.
pub fn fit_svg(report: &FitReport) -> Result<String> {
    if report.rows.is_empty() {
        bail!("cannot plot an empty fit report");
    }
    let xs: Vec<f64> = report.rows.iter().map(|r| (r.m as f64).ln()).collect();
    let ys: Vec<f64> = report.rows.iter().map(|r| r.sup_value.ln()).collect();
    let d = report.rows[0].d as f64;
    let (xa, xb) = (xs[0], *xs.last().expect("nonempty"));
    let ya = ys[0];
    let flat = [ya, ya];
    let steep = [ya, ya + (d - 1.0) * (xb - xa)];
    let mut all_y = ys.clone();
    all_y.extend_from_slice(&steep);
    let f = Frame::fit(&xs, &all_y);
    let mut out = String::new();
    let title = format!(
        "d = {}, alpha = {}, slope {:.3}",
        report.rows[0].d, report.rows[0].alpha, report.slope
    );
    header(&mut out, &title, "log M", "log sup_r S(M)", &f);
    polyline(&mut out, &f, &[xa, xb], &flat, "#888888", true);
    polyline(&mut out, &f, &[xa, xb], &steep, "#c0392b", true);
    polyline(&mut out, &f, &xs, &ys, "#1f4e9c", false);
    for (&x, &y) in xs.iter().zip(&ys) {
        let _ = writeln!(
            out,
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3.5\" fill=\"#1f4e9c\"/>",
            f.px(x),
            f.py(y)
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}
