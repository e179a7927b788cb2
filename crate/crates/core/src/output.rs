//! CSV and SVG emission.

use std::fmt::Write as _;

use thiserror::Error;

use crate::bounds::MonitorResult;
use crate::flow::StepRecord;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OutputError {
    #[error("csv is empty")]
    Empty,
    #[error("csv has no column named {0:?}")]
    MissingColumn(String),
    #[error("csv line {line}: {msg}")]
    Malformed { line: usize, msg: String },
}

pub const TIMESERIES_COLUMNS: [&str; 11] = [
    "t",
    "dt",
    "rho",
    "vol",
    "min_u",
    "max_u",
    "min_S",
    "max_S",
    "s_minus_l2",
    "s_minus_linf",
    "energy_S_rho",
];

/// Decimal float with 17 significant digits.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn timeseries_csv(records: &[StepRecord]) -> String {
    let mut out = TIMESERIES_COLUMNS.join(",");
    out.push('\n');
    for r in records {
        let row = [
            r.t,
            r.dt,
            r.rho,
            r.vol,
            r.min_u,
            r.max_u,
            r.min_s,
            r.max_s,
            r.s_minus_l2,
            r.s_minus_linf,
            r.energy,
        ];
        let line: Vec<String> = row.iter().map(|v| fmt17(*v)).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

pub fn monitors_csv(results: &[MonitorResult]) -> String {
    let mut out = String::from(crate::bounds::MonitorRow::csv_header());
    out.push('\n');
    for r in results {
        for row in &r.rows {
            out.push_str(&row.csv_line());
            out.push('\n');
        }
    }
    out
}

/// Parsed numeric CSV with a header row.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn parse(text: &str) -> Result<Self, OutputError> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let (_, head) = lines.next().ok_or(OutputError::Empty)?;
        let header: Vec<String> = head.split(',').map(|s| s.trim().to_string()).collect();
        let mut rows = Vec::new();
        for (i, line) in lines {
            let vals: Result<Vec<f64>, _> =
                line.split(',').map(|s| s.trim().parse::<f64>()).collect();
            let vals = vals.map_err(|e| OutputError::Malformed {
                line: i + 1,
                msg: e.to_string(),
            })?;
            if vals.len() != header.len() {
                return Err(OutputError::Malformed {
                    line: i + 1,
                    msg: format!("expected {} fields, found {}", header.len(), vals.len()),
                });
            }
            rows.push(vals);
        }
        if rows.is_empty() {
            return Err(OutputError::Empty);
        }
        Ok(Table { header, rows })
    }

    pub fn column(&self, name: &str) -> Result<Vec<f64>, OutputError> {
        let j = self
            .header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| OutputError::MissingColumn(name.to_string()))?;
        Ok(self.rows.iter().map(|r| r[j]).collect())
    }
}

/// Series drawn by the plot command, one SVG each.
pub const PLOT_SERIES: [&str; 7] = [
    "rho",
    "vol",
    "min_u",
    "max_u",
    "min_S",
    "max_S",
    "energy_S_rho",
];

/// Line chart of `ys` against `xs` as a standalone SVG document. Output depends only on the input.
pub fn line_chart_svg(title: &str, x_label: &str, xs: &[f64], ys: &[f64]) -> String {
    const W: f64 = 640.0;
    const H: f64 = 400.0;
    const L: f64 = 80.0;
    const R: f64 = 20.0;
    const T: f64 = 40.0;
    const B: f64 = 50.0;
    let finite = |v: &&f64| v.is_finite();
    let (x0, x1) = bounds(xs.iter().filter(finite).copied());
    let (y0, y1) = bounds(ys.iter().filter(finite).copied());
    let px = |x: f64| L + (x - x0) / (x1 - x0) * (W - L - R);
    let py = |y: f64| H - B - (y - y0) / (y1 - y0) * (H - T - B);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
        W / 2.0,
        escape(title)
    );
    let _ = writeln!(
        s,
        r#"<rect x="{L}" y="{T}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        W - L - R,
        H - T - B
    );
    for i in 0..=4 {
        let f = i as f64 / 4.0;
        let xv = x0 + f * (x1 - x0);
        let yv = y0 + f * (y1 - y0);
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            px(xv),
            H - B + 18.0,
            tick(xv)
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            L - 6.0,
            py(yv) + 4.0,
            tick(yv)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        (L + W - R) / 2.0,
        H - 10.0,
        escape(x_label)
    );
    let mut pts = String::new();
    for (x, y) in xs.iter().zip(ys) {
        if x.is_finite() && y.is_finite() {
            let _ = write!(pts, "{:.2},{:.2} ", px(*x), py(*y));
        }
    }
    let _ = writeln!(
        s,
        r#"<polyline fill="none" stroke="steelblue" stroke-width="1.5" points="{}"/>"#,
        pts.trim_end()
    );
    s.push_str("</svg>\n");
    s
}

fn bounds(it: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = it.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
        (a.min(v), b.max(v))
    });
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo <= 1e-12 * lo.abs().max(hi.abs()).max(1e-300) {
        let pad = if lo == 0.0 { 1.0 } else { 0.5 * lo.abs() };
        return (lo - pad, hi + pad);
    }
    (lo, hi)
}

fn tick(v: f64) -> String {
    if v != 0.0 && (v.abs() < 1e-3 || v.abs() >= 1e4) {
        format!("{v:.3e}")
    } else {
        format!("{v:.4}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
