//! JSON emission.
//!
//! JSON is the machine interface, so it is written by hand with a fixed
//! key order and floating-point values at 17 significant digits, enough
//! to reproduce every `f64` bit-exactly on reparse. Reruns with the same
//! inputs produce byte-identical files.

use crate::pipeline::{DiagramEntry, PlotBundle, Provenance};
use pairdiff_core::hilbert::TieMode;

/// 17-significant-digit decimal form; round-trips any finite `f64`.
pub fn fmt_f64(x: f64) -> String {
    debug_assert!(x.is_finite(), "refusing to serialize {x}");
    format!("{x:.16e}")
}

fn fmt_array(xs: &[f64]) -> String {
    let mut out = String::from("[");
    for (i, &x) in xs.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        out.push_str(&fmt_f64(x));
    }
    out.push(']');
    out
}

fn fmt_opt(x: Option<f64>) -> String {
    match x {
        Some(v) => fmt_f64(v),
        None => "null".into(),
    }
}

fn fmt_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn sigma_triangle_json(sigma: f64) -> String {
    if sigma > 0.0 {
        // Tip-to-tip height 4 sigma at the origin; the third vertex marks
        // the triangle's width along the abscissa (presentation only).
        let two_sigma = 2.0 * sigma;
        format!(
            "{{\"omitted\": false, \"tip_to_tip_height\": {}, \"vertices\": [[{}, {}], [{}, {}], [{}, {}]]}}",
            fmt_f64(4.0 * sigma),
            fmt_f64(0.0),
            fmt_f64(-two_sigma),
            fmt_f64(0.0),
            fmt_f64(two_sigma),
            fmt_f64(0.025),
            fmt_f64(0.0),
        )
    } else {
        "{\"omitted\": true, \"reason\": \"sigma is zero\"}".into()
    }
}

fn diagram_json(entry: &DiagramEntry, indent: &str) -> String {
    let d = &entry.diagram;
    format!(
        "{indent}{{\n{indent}  \"strategy\": {},\n{indent}  \"bins_requested\": {},\n{indent}  \"s_mean\": {},\n{indent}  \"q_mean\": {},\n{indent}  \"r_mean\": {},\n{indent}  \"bin_weight\": {},\n{indent}  \"boundaries\": {}\n{indent}}}",
        fmt_string(entry.strategy),
        entry.bins_requested,
        fmt_array(d.s_mean()),
        fmt_array(d.q_mean()),
        fmt_array(d.r_mean()),
        fmt_array(d.bin_weight()),
        fmt_array(d.boundaries().interior()),
    )
}

fn provenance_json(p: &Provenance, indent: &str) -> String {
    let covariates = p
        .covariates
        .iter()
        .map(|c| fmt_string(c))
        .collect::<Vec<_>>()
        .join(", ");
    let bin_counts = p
        .bin_counts
        .iter()
        .map(|b| b.to_string())
        .collect::<Vec<_>>()
        .join(", ");
    let tie_mode = match p.tie_mode {
        TieMode::Aggregate => "aggregate",
        TieMode::Perturb => "perturb",
    };
    let weight = match &p.weight_column {
        Some(w) => fmt_string(w),
        None => "null".into(),
    };
    format!(
        "{indent}\"covariates\": [{covariates}],\n\
         {indent}\"q_column\": {},\n\
         {indent}\"r_column\": {},\n\
         {indent}\"weight_column\": {weight},\n\
         {indent}\"tie_mode\": {},\n\
         {indent}\"seed\": {},\n\
         {indent}\"perturb_scale\": {},\n\
         {indent}\"bits_per_dim\": {},\n\
         {indent}\"bin_counts\": [{bin_counts}],\n\
         {indent}\"bin_strategy\": {},\n\
         {indent}\"dropped_rows\": {},\n\
         {indent}\"n_records\": {},\n\
         {indent}\"m_groups\": {}",
        fmt_string(&p.q_column),
        fmt_string(&p.r_column),
        fmt_string(tie_mode),
        p.seed,
        fmt_f64(p.perturb_scale),
        p.bits_per_dim,
        fmt_string(p.bin_strategy.as_str()),
        p.dropped_rows,
        p.n_records,
        p.m_groups,
    )
}

/// Full analysis document: `curve`, `metrics`, `diagrams`, `provenance`.
pub fn bundle_to_json(bundle: &PlotBundle) -> String {
    let m = &bundle.metrics;
    let diagrams = bundle
        .diagrams
        .iter()
        .map(|d| diagram_json(d, "    "))
        .collect::<Vec<_>>()
        .join(",\n");
    format!(
        "{{\n  \"curve\": {{\n    \"abscissae\": {},\n    \"ordinates\": {},\n    \"sigma_triangle\": {}\n  }},\n  \"metrics\": {{\n    \"kuiper\": {},\n    \"ks\": {},\n    \"avg_diff\": {},\n    \"sigma\": {},\n    \"kuiper_over_sigma\": {},\n    \"ks_over_sigma\": {}\n  }},\n  \"diagrams\": [\n{}\n  ],\n  \"provenance\": {{\n{}\n  }}\n}}\n",
        fmt_array(bundle.curve.abscissae()),
        fmt_array(bundle.curve.ordinates()),
        sigma_triangle_json(m.sigma),
        fmt_f64(m.kuiper),
        fmt_f64(m.kolmogorov_smirnov),
        fmt_f64(m.average_difference),
        fmt_f64(m.sigma),
        fmt_opt(m.kuiper_over_sigma),
        fmt_opt(m.ks_over_sigma),
        diagrams,
        provenance_json(&bundle.provenance, "    "),
    )
}

/// Diagrams-plus-provenance document for the `reliability` subcommand.
pub fn diagrams_to_json(bundle: &PlotBundle) -> String {
    let diagrams = bundle
        .diagrams
        .iter()
        .map(|d| diagram_json(d, "    "))
        .collect::<Vec<_>>()
        .join(",\n");
    format!(
        "{{\n  \"diagrams\": [\n{}\n  ],\n  \"provenance\": {{\n{}\n  }}\n}}\n",
        diagrams,
        provenance_json(&bundle.provenance, "    "),
    )
}

/// Ground-truth document for the `synth` subcommand: the expected curve
/// and its metrics.
pub fn expected_to_json(
    curve: &pairdiff_core::cumulative::CumulativeCurve,
    metrics: &pairdiff_core::cumulative::CurveMetrics,
) -> String {
    format!(
        "{{\n  \"curve\": {{\n    \"abscissae\": {},\n    \"ordinates\": {}\n  }},\n  \"metrics\": {{\n    \"kuiper\": {},\n    \"ks\": {},\n    \"avg_diff\": {},\n    \"sigma\": {},\n    \"kuiper_over_sigma\": {},\n    \"ks_over_sigma\": {}\n  }}\n}}\n",
        fmt_array(curve.abscissae()),
        fmt_array(curve.ordinates()),
        fmt_f64(metrics.kuiper),
        fmt_f64(metrics.kolmogorov_smirnov),
        fmt_f64(metrics.average_difference),
        fmt_f64(metrics.sigma),
        fmt_opt(metrics.kuiper_over_sigma),
        fmt_opt(metrics.ks_over_sigma),
    )
}
