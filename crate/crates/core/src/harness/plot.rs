//! Static SVG line charts of summary curves, one chart per metric.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{FlockError, Result};

use super::experiments::{MeanMetrics, Summary};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    NumComponents,
    MaxDiameter,
    VelocityConvergence,
    Irregularity,
}

impl Metric {
    pub const ALL: [Metric; 4] = [
        Metric::NumComponents,
        Metric::MaxDiameter,
        Metric::VelocityConvergence,
        Metric::Irregularity,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Metric::NumComponents => "num_components",
            Metric::MaxDiameter => "max_diameter",
            Metric::VelocityConvergence => "velocity_convergence",
            Metric::Irregularity => "irregularity",
        }
    }

    fn title(self) -> &'static str {
        match self {
            Metric::NumComponents => "Number of connected components",
            Metric::MaxDiameter => "Maximum component diameter",
            Metric::VelocityConvergence => "Velocity convergence",
            Metric::Irregularity => "Irregularity",
        }
    }

    pub fn value(self, m: &MeanMetrics) -> Option<f64> {
        match self {
            Metric::NumComponents => Some(m.num_components),
            Metric::MaxDiameter => m.max_diameter,
            Metric::VelocityConvergence => Some(m.velocity_convergence),
            Metric::Irregularity => Some(m.irregularity),
        }
    }
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-12 {
        let pad = if lo.abs() > 1e-12 { 0.1 * lo.abs() } else { 1.0 };
        return (lo - pad, hi + pad);
    }
    (lo, hi)
}

/// Renders one metric of `summary`. A series is split into separate
/// polylines wherever its value is undefined.
pub fn render_svg(summary: &Summary, metric: Metric) -> String {
    let models = summary.models();
    let xs = range(summary.rows.iter().map(|r| r.x as f64));
    let ys = range(summary.rows.iter().filter_map(|r| metric.value(&r.means)));
    let (pw, ph) = (WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM);
    let px = |x: f64| LEFT + (x - xs.0) / (xs.1 - xs.0) * pw;
    let py = |y: f64| TOP + ph - (y - ys.0) / (ys.1 - ys.0) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="24" font-family="sans-serif" font-size="15" text-anchor="middle">{}</text>"#,
        LEFT + pw / 2.0,
        escape(metric.title())
    );
    let _ = writeln!(
        s,
        r#"<rect class="plot-area" x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    for k in 0..=4 {
        let fx = xs.0 + (xs.1 - xs.0) * k as f64 / 4.0;
        let fy = ys.0 + (ys.1 - ys.0) * k as f64 / 4.0;
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="11" text-anchor="middle">{}</text>"#,
            px(fx),
            TOP + ph + 16.0,
            tick(fx)
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="11" text-anchor="end">{}</text>"#,
            LEFT - 6.0,
            py(fy) + 4.0,
            tick(fy)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="12" text-anchor="middle">{}</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 12.0,
        summary.axis.as_str()
    );

    for (k, model) in models.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let mut segments: Vec<Vec<(f64, f64)>> = vec![Vec::new()];
        for row in summary.series(*model) {
            match metric.value(&row.means) {
                Some(y) => segments.last_mut().unwrap().push((px(row.x as f64), py(y))),
                None => {
                    if !segments.last().unwrap().is_empty() {
                        segments.push(Vec::new());
                    }
                }
            }
        }
        for seg in segments.iter().filter(|seg| !seg.is_empty()) {
            let points: Vec<String> = seg.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
            let _ = writeln!(
                s,
                r#"<polyline class="series" data-model="{}" fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                escape(model.as_str()),
                points.join(" ")
            );
        }
        let ly = TOP + 10.0 + 18.0 * k as f64;
        let lx = WIDTH - RIGHT + 12.0;
        let _ = writeln!(
            s,
            r#"<g class="legend-entry"><line x1="{lx:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="2"/><text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="11">{}</text></g>"#,
            lx + 20.0,
            lx + 26.0,
            ly + 4.0,
            escape(model.as_str())
        );
    }
    s.push_str("</svg>\n");
    s
}

fn tick(v: f64) -> String {
    if v.abs() >= 1000.0 || (v != 0.0 && v.abs() < 0.01) {
        format!("{v:.2e}")
    } else {
        format!("{v:.2}")
    }
}

/// Writes `<metric>.svg` for every metric into `dir`.
pub fn emit_plots(summary: &Summary, dir: &Path) -> Result<Vec<PathBuf>> {
    if summary.rows.is_empty() {
        return Err(FlockError::InvalidParameter("cannot plot an empty summary".into()));
    }
    Metric::ALL
        .iter()
        .map(|&m| {
            let path = dir.join(format!("{}.svg", m.as_str()));
            std::fs::write(&path, render_svg(summary, m)).map_err(|e| FlockError::io(&path, e))?;
            Ok(path)
        })
        .collect()
}
