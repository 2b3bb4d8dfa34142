//! Static SVG 1.1 figures: grayscale heatmaps and ROC polylines.

use std::fmt::Write;

use fnirs_core::RocCurve;

use crate::output::fmt6;

const HEAD: &str = r#"<?xml version="1.0" encoding="UTF-8"?>
"#;

fn open(width: f64, height: f64) -> String {
    format!(
        "{HEAD}<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\" font-family=\"sans-serif\">\n",
        w = fmt6(width),
        h = fmt6(height)
    )
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// ROC curve with the chance diagonal.
pub fn roc(curve: &RocCurve, title: &str) -> String {
    let (size, pad) = (400.0, 50.0);
    let mut s = open(size + 2.0 * pad, size + 2.0 * pad);
    let x = |fpr: f64| pad + fpr * size;
    let y = |tpr: f64| pad + (1.0 - tpr) * size;
    let _ = writeln!(s, "<rect x=\"{pad}\" y=\"{pad}\" width=\"{size}\" height=\"{size}\" fill=\"white\" stroke=\"black\"/>");
    let _ = writeln!(
        s,
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"gray\" stroke-dasharray=\"4 4\"/>",
        x(0.0),
        y(0.0),
        x(1.0),
        y(1.0)
    );
    let pts: Vec<String> = curve
        .points
        .iter()
        .map(|p| format!("{},{}", fmt6(x(p.fpr)), fmt6(y(p.tpr))))
        .collect();
    let _ = writeln!(s, "<polyline points=\"{}\" fill=\"none\" stroke=\"black\" stroke-width=\"2\"/>", pts.join(" "));
    let _ = writeln!(
        s,
        "<text x=\"{}\" y=\"30\" text-anchor=\"middle\" font-size=\"14\">{} (AUC = {})</text>",
        pad + size / 2.0,
        escape(title),
        fmt6(curve.auc)
    );
    let _ = writeln!(s, "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"12\">false positive rate</text>", pad + size / 2.0, size + pad + 35.0);
    let _ = writeln!(
        s,
        "<text x=\"15\" y=\"{}\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 15 {})\">true positive rate</text>",
        pad + size / 2.0,
        pad + size / 2.0
    );
    for t in [0.0, 0.5, 1.0] {
        let _ = writeln!(s, "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"10\">{t}</text>", x(t), size + pad + 15.0);
        let _ = writeln!(s, "<text x=\"{}\" y=\"{}\" text-anchor=\"end\" font-size=\"10\">{t}</text>", pad - 5.0, y(t) + 4.0);
    }
    s.push_str("</svg>\n");
    s
}

/// Grayscale heatmap: lightness rises linearly from `lo` (black) to `hi` (white).
pub fn heatmap(values: &[Vec<f64>], row_labels: &[String], col_labels: &[String], lo: f64, hi: f64, title: &str) -> String {
    let rows = values.len();
    let cols = values.first().map_or(0, Vec::len);
    let cell = if cols > 30 { 10.0 } else { 20.0 };
    let (left, top) = (60.0, 50.0);
    let width = left + cols as f64 * cell + 20.0;
    let height = top + rows as f64 * cell + 20.0;
    let mut s = open(width, height);
    let _ = writeln!(s, "<text x=\"{left}\" y=\"20\" font-size=\"14\">{}</text>", escape(title));
    let span = hi - lo;
    for (i, row) in values.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            let t = if span > 0.0 { ((v - lo) / span).clamp(0.0, 1.0) } else { 1.0 };
            let g = (t * 255.0).round() as u8;
            let _ = writeln!(
                s,
                "<rect x=\"{}\" y=\"{}\" width=\"{cell}\" height=\"{cell}\" fill=\"rgb({g},{g},{g})\"><title>{}</title></rect>",
                fmt6(left + j as f64 * cell),
                fmt6(top + i as f64 * cell),
                fmt6(v)
            );
        }
    }
    let font = (cell * 0.6).min(10.0);
    for (j, label) in col_labels.iter().enumerate() {
        let _ = writeln!(
            s,
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"{font}\">{}</text>",
            fmt6(left + (j as f64 + 0.5) * cell),
            top - 5.0,
            escape(label)
        );
    }
    for (i, label) in row_labels.iter().enumerate() {
        let _ = writeln!(
            s,
            "<text x=\"{}\" y=\"{}\" text-anchor=\"end\" font-size=\"{font}\">{}</text>",
            left - 5.0,
            fmt6(top + (i as f64 + 0.7) * cell),
            escape(label)
        );
    }
    s.push_str("</svg>\n");
    s
}
