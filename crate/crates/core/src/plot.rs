//! Error against tuning time, one scatter panel per dataset, as SVG 1.1.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::bench::{Aggregate, BenchReport};
use crate::error::{Error, Result};
use crate::metrics::MetricKind;

const PANEL_W: f64 = 360.0;
const PANEL_H: f64 = 280.0;
const MARGIN_L: f64 = 64.0;
const MARGIN_R: f64 = 16.0;
const MARGIN_T: f64 = 36.0;
const MARGIN_B: f64 = 48.0;
const LEGEND_ROW: f64 = 18.0;
/// Shortest time drawn; keeps log10 finite.
const MIN_SECONDS: f64 = 1e-6;

const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// `[lo, hi]` padded by 5% each side, or by `pad` when degenerate.
fn padded(lo: f64, hi: f64, pad: f64) -> (f64, f64) {
    if hi - lo < 1e-12 {
        (lo - pad, hi + pad)
    } else {
        let m = 0.05 * (hi - lo);
        (lo - m, hi + m)
    }
}

struct Panel<'a> {
    dataset: &'a str,
    cells: Vec<&'a Aggregate>,
}

fn panels(report: &BenchReport) -> Vec<Panel<'_>> {
    let mut out: Vec<Panel> = Vec::new();
    for a in &report.aggregates {
        match out.iter_mut().find(|p| p.dataset == a.dataset) {
            Some(p) => p.cells.push(a),
            None => out.push(Panel {
                dataset: &a.dataset,
                cells: vec![a],
            }),
        }
    }
    out
}

fn draw_panel(svg: &mut String, panel: &Panel, x0: f64, methods: &[&str]) {
    let plot_w = PANEL_W - MARGIN_L - MARGIN_R;
    let plot_h = PANEL_H - MARGIN_T - MARGIN_B;
    let (left, top) = (x0 + MARGIN_L, MARGIN_T);

    let lx: Vec<f64> = panel.cells.iter().map(|a| a.mean_seconds.max(MIN_SECONDS).log10()).collect();
    let ys: Vec<f64> = panel.cells.iter().map(|a| a.mean_error).collect();
    let (xmin, xmax) = padded(
        lx.iter().copied().fold(f64::INFINITY, f64::min),
        lx.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        0.5,
    );
    let (ymin, ymax) = padded(
        ys.iter().copied().fold(f64::INFINITY, f64::min),
        ys.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        0.05,
    );
    let px = |v: f64| left + (v - xmin) / (xmax - xmin) * plot_w;
    let py = |v: f64| top + (ymax - v) / (ymax - ymin) * plot_h;

    let regression = panel.cells.iter().all(|a| a.metric == MetricKind::Rmse);
    let ylabel = if regression { "RMSE" } else { "Classification error" };

    let _ = writeln!(svg, r#"<g class="panel" data-dataset="{}">"#, escape(panel.dataset));
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="20" text-anchor="middle" font-size="14" font-weight="bold">{}</text>"#,
        left + plot_w / 2.0,
        escape(panel.dataset)
    );
    let _ = writeln!(
        svg,
        r##"<rect x="{left:.2}" y="{top:.2}" width="{plot_w:.2}" height="{plot_h:.2}" fill="none" stroke="#333"/>"##
    );

    // decade ticks on x, five even ticks on y
    let mut d = xmin.ceil() as i64;
    while (d as f64) <= xmax {
        let x = px(d as f64);
        let _ = writeln!(
            svg,
            r##"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="#333"/><text x="{x:.2}" y="{:.2}" text-anchor="middle" font-size="10">1e{d}</text>"##,
            top + plot_h,
            top + plot_h + 4.0,
            top + plot_h + 16.0
        );
        d += 1;
    }
    for i in 0..=4 {
        let v = ymin + (ymax - ymin) * i as f64 / 4.0;
        let y = py(v);
        let _ = writeln!(
            svg,
            r##"<line x1="{:.2}" y1="{y:.2}" x2="{left:.2}" y2="{y:.2}" stroke="#333"/><text x="{:.2}" y="{:.2}" text-anchor="end" font-size="10">{v:.3}</text>"##,
            left - 4.0,
            left - 6.0,
            y + 3.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="12">Tuning time (s, log scale)</text>"#,
        left + plot_w / 2.0,
        top + plot_h + 34.0
    );
    let (lxp, lyp) = (x0 + 16.0, top + plot_h / 2.0);
    let _ = writeln!(
        svg,
        r#"<text x="{lxp:.2}" y="{lyp:.2}" text-anchor="middle" font-size="12" transform="rotate(-90 {lxp:.2} {lyp:.2})">{ylabel}</text>"#
    );

    for (a, (&x, &y)) in panel.cells.iter().zip(lx.iter().zip(&ys)) {
        let color = PALETTE[methods.iter().position(|m| *m == a.method).unwrap_or(0) % PALETTE.len()];
        let _ = writeln!(
            svg,
            r#"<circle class="marker" data-method="{m}" cx="{:.2}" cy="{:.2}" r="5" fill="{color}"><title>{m}: {ylabel} {y:.4}, {:.3} s</title></circle>"#,
            px(x),
            py(y),
            a.mean_seconds,
            m = escape(&a.method),
        );
    }
    svg.push_str("</g>\n");
}

/// Renders every aggregate cell of `report`; errors when there are none.
pub fn render_svg(report: &BenchReport) -> Result<String> {
    if report.aggregates.is_empty() {
        return Err(Error::InvalidArgument("report has no aggregate cells to plot".into()));
    }
    let panels = panels(report);
    let mut methods: Vec<&str> = Vec::new();
    for a in &report.aggregates {
        if !methods.contains(&a.method.as_str()) {
            methods.push(&a.method);
        }
    }
    let width = PANEL_W * panels.len() as f64;
    let height = PANEL_H + 12.0 + LEGEND_ROW * methods.len() as f64;

    let mut svg = String::new();
    svg.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}" font-family="sans-serif">"#
    );
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    for (i, p) in panels.iter().enumerate() {
        draw_panel(&mut svg, p, i as f64 * PANEL_W, &methods);
    }
    svg.push_str("<g class=\"legend\">\n");
    for (i, m) in methods.iter().enumerate() {
        let y = PANEL_H + 4.0 + LEGEND_ROW * i as f64;
        let _ = writeln!(
            svg,
            r#"<rect class="swatch" x="{:.2}" y="{y:.2}" width="10" height="10" fill="{}"/><text x="{:.2}" y="{:.2}" font-size="11">{}</text>"#,
            MARGIN_L,
            PALETTE[i % PALETTE.len()],
            MARGIN_L + 16.0,
            y + 9.0,
            escape(m)
        );
    }
    svg.push_str("</g>\n</svg>\n");
    Ok(svg)
}

pub fn write_svg(report: &BenchReport, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let svg = render_svg(report)?;
    fs::write(path, svg).map_err(|e| Error::io(path, e))
}
