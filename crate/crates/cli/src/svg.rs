//! SVG plot emission.
//!
//! Write-only presentation: none of the numeric contract lives here.
//! The cumulative plot draws the curve from the origin over the full
//! accumulated-weight axis [0, 1], with a triangle of tip-to-tip height
//! four sigma at the origin indicating the expected null variation.
//! Reliability plots overlay both populations' per-bin means, and the
//! two-covariate case gets a scatter of the covariate plane shaded by
//! score.

use crate::pipeline::{DiagramEntry, PlotBundle, ScatterData};
use std::fmt::Write;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 540.0;
const MARGIN_L: f64 = 72.0;
const MARGIN_R: f64 = 24.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 56.0;

struct Frame {
    x_lo: f64,
    x_hi: f64,
    y_lo: f64,
    y_hi: f64,
}

impl Frame {
    fn new(x_lo: f64, x_hi: f64, y_lo: f64, y_hi: f64) -> Self {
        // Guard against a zero-height range so division stays finite.
        let (y_lo, y_hi) = if y_hi > y_lo {
            (y_lo, y_hi)
        } else {
            (y_lo - 1.0, y_hi + 1.0)
        };
        Self { x_lo, x_hi, y_lo, y_hi }
    }

    fn sx(&self, x: f64) -> f64 {
        MARGIN_L + (x - self.x_lo) / (self.x_hi - self.x_lo) * (WIDTH - MARGIN_L - MARGIN_R)
    }

    fn sy(&self, y: f64) -> f64 {
        HEIGHT - MARGIN_B
            - (y - self.y_lo) / (self.y_hi - self.y_lo) * (HEIGHT - MARGIN_T - MARGIN_B)
    }
}

fn header(title: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n\
         <rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n\
         <text x=\"{}\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\" \
         text-anchor=\"middle\">{title}</text>\n",
        WIDTH / 2.0
    )
}

fn axes(out: &mut String, frame: &Frame, x_label: &str, y_label: &str) {
    let (x0, x1) = (frame.sx(frame.x_lo), frame.sx(frame.x_hi));
    let (y0, y1) = (frame.sy(frame.y_lo), frame.sy(frame.y_hi));
    let _ = writeln!(
        out,
        "<rect x=\"{x0:.2}\" y=\"{y1:.2}\" width=\"{:.2}\" height=\"{:.2}\" \
         fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>",
        x1 - x0,
        y0 - y1
    );
    for i in 0..=4 {
        let fx = frame.x_lo + (frame.x_hi - frame.x_lo) * i as f64 / 4.0;
        let fy = frame.y_lo + (frame.y_hi - frame.y_lo) * i as f64 / 4.0;
        let _ = writeln!(
            out,
            "<line x1=\"{0:.2}\" y1=\"{1:.2}\" x2=\"{0:.2}\" y2=\"{2:.2}\" stroke=\"black\"/>\n\
             <text x=\"{0:.2}\" y=\"{3:.2}\" font-family=\"sans-serif\" font-size=\"11\" \
             text-anchor=\"middle\">{4:.3}</text>",
            frame.sx(fx),
            y0,
            y0 + 5.0,
            y0 + 18.0,
            fx
        );
        let _ = writeln!(
            out,
            "<line x1=\"{1:.2}\" y1=\"{0:.2}\" x2=\"{2:.2}\" y2=\"{0:.2}\" stroke=\"black\"/>\n\
             <text x=\"{3:.2}\" y=\"{4:.2}\" font-family=\"sans-serif\" font-size=\"11\" \
             text-anchor=\"end\">{5:.4}</text>",
            frame.sy(fy),
            x0,
            x0 - 5.0,
            x0 - 8.0,
            frame.sy(fy) + 4.0,
            fy
        );
    }
    let _ = writeln!(
        out,
        "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"13\" \
         text-anchor=\"middle\">{x_label}</text>",
        (x0 + x1) / 2.0,
        HEIGHT - 12.0
    );
    let _ = writeln!(
        out,
        "<text x=\"16\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"13\" \
         text-anchor=\"middle\" transform=\"rotate(-90 16 {0:.2})\">{y_label}</text>",
        (y0 + y1) / 2.0
    );
}

fn polyline(out: &mut String, frame: &Frame, points: &[(f64, f64)], style: &str) {
    let mut path = String::new();
    for &(x, y) in points {
        let _ = write!(path, "{:.2},{:.2} ", frame.sx(x), frame.sy(y));
    }
    let _ = writeln!(out, "<polyline points=\"{}\" {style}/>", path.trim_end());
}

/// Cumulative-difference plot with the 4-sigma origin triangle.
pub fn cumulative_svg(bundle: &PlotBundle) -> String {
    let curve = &bundle.curve;
    let m = &bundle.metrics;
    let mut y_lo = curve.ordinates().iter().copied().fold(0.0f64, f64::min);
    let mut y_hi = curve.ordinates().iter().copied().fold(0.0f64, f64::max);
    y_lo = y_lo.min(-2.0 * m.sigma);
    y_hi = y_hi.max(2.0 * m.sigma);
    let pad = 0.08 * (y_hi - y_lo).max(1e-12);
    let frame = Frame::new(0.0, 1.0, y_lo - pad, y_hi + pad);

    let ratio = |r: Option<f64>| match r {
        Some(v) => format!("{v:.4}"),
        None => "undefined".into(),
    };
    let title = format!(
        "Cumulative difference; Kuiper {:.5} ({}σ), KS {:.5} ({}σ)",
        m.kuiper,
        ratio(m.kuiper_over_sigma),
        m.kolmogorov_smirnov,
        ratio(m.ks_over_sigma)
    );
    let mut out = header(&title);
    axes(
        &mut out,
        &frame,
        "accumulated weight",
        "cumulative difference",
    );

    // Zero reference line.
    let _ = writeln!(
        out,
        "<line x1=\"{:.2}\" y1=\"{1:.2}\" x2=\"{2:.2}\" y2=\"{1:.2}\" \
         stroke=\"#bbbbbb\" stroke-dasharray=\"4 3\"/>",
        frame.sx(0.0),
        frame.sy(0.0),
        frame.sx(1.0)
    );

    if m.sigma > 0.0 {
        let _ = writeln!(
            out,
            "<polygon points=\"{:.2},{:.2} {:.2},{:.2} {:.2},{:.2}\" \
             fill=\"#d0d0d0\" stroke=\"#808080\"/>",
            frame.sx(0.0),
            frame.sy(-2.0 * m.sigma),
            frame.sx(0.0),
            frame.sy(2.0 * m.sigma),
            frame.sx(0.025),
            frame.sy(0.0)
        );
    }

    let mut points = Vec::with_capacity(curve.len() + 1);
    points.push((0.0, 0.0));
    points.extend(
        curve
            .abscissae()
            .iter()
            .zip(curve.ordinates())
            .map(|(&a, &c)| (a, c)),
    );
    polyline(
        &mut out,
        &frame,
        &points,
        "fill=\"none\" stroke=\"black\" stroke-width=\"1.2\"",
    );
    out.push_str("</svg>\n");
    out
}

/// Reliability diagram: per-bin mean responses of both populations
/// against the per-bin mean score.
pub fn reliability_svg(entry: &DiagramEntry) -> String {
    let d = &entry.diagram;
    let all = d.q_mean().iter().chain(d.r_mean());
    let y_lo = all.clone().copied().fold(f64::INFINITY, f64::min);
    let y_hi = all.copied().fold(f64::NEG_INFINITY, f64::max);
    let x_lo = d.s_mean().first().copied().unwrap_or(0.0);
    let x_hi = d.s_mean().last().copied().unwrap_or(1.0);
    let pad = 0.08 * (y_hi - y_lo).max(1e-12);
    let xpad = 0.04 * (x_hi - x_lo).max(1e-12);
    let frame = Frame::new(x_lo - xpad, x_hi + xpad, y_lo - pad, y_hi + pad);

    let mut out = header(&format!(
        "Reliability diagram ({}, {} bins requested, {} nonempty)",
        entry.strategy,
        entry.bins_requested,
        d.len()
    ));
    axes(&mut out, &frame, "mean score", "mean response");

    let q: Vec<(f64, f64)> = d.s_mean().iter().copied().zip(d.q_mean().iter().copied()).collect();
    let r: Vec<(f64, f64)> = d.s_mean().iter().copied().zip(d.r_mean().iter().copied()).collect();
    polyline(&mut out, &frame, &q, "fill=\"none\" stroke=\"black\" stroke-width=\"1\"");
    polyline(&mut out, &frame, &r, "fill=\"none\" stroke=\"#888888\" stroke-width=\"1\"");
    for &(x, y) in &q {
        let _ = writeln!(
            out,
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2.5\" fill=\"black\"/>",
            frame.sx(x),
            frame.sy(y)
        );
    }
    for &(x, y) in &r {
        let _ = writeln!(
            out,
            "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"5\" height=\"5\" \
             fill=\"white\" stroke=\"#888888\"/>",
            frame.sx(x) - 2.5,
            frame.sy(y) - 2.5
        );
    }
    let _ = writeln!(
        out,
        "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"12\">● q &#160;&#160; ▢ r</text>",
        MARGIN_L + 10.0,
        MARGIN_T + 16.0
    );
    out.push_str("</svg>\n");
    out
}

/// Two-covariate scatter shaded by score (darker = lower score).
pub fn scatter_svg(scatter: &ScatterData) -> String {
    let frame = Frame::new(-0.04, 1.04, -0.04, 1.04);
    let mut out = header("Covariates shaded by Hilbert score");
    axes(&mut out, &frame, "covariate 1 (normalized)", "covariate 2 (normalized)");
    for i in 0..scatter.x.len() {
        let g = (scatter.score[i].clamp(0.0, 1.0) * 235.0).round() as u8;
        let _ = writeln!(
            out,
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2\" fill=\"rgb({g},{g},{g})\"/>",
            frame.sx(scatter.x[i]),
            frame.sy(scatter.y[i])
        );
    }
    out.push_str("</svg>\n");
    out
}
