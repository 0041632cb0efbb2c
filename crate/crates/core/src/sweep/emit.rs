use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use super::{AxisKind, SweepResult};
use crate::error::{Error, Result};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Svg => "svg",
        }
    }
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "svg" => Ok(Format::Svg),
            other => Err(Error::arg(format!("unknown output format {other:?} (expected csv, json or svg)"))),
        }
    }
}

/// Shortest representation that parses back to the same double.
pub fn fmt_num(x: f64) -> String {
    format!("{x:e}")
}

pub const CSV_HEADER: [&str; 6] = ["series", "gamma", "lambda", "swept_value", "c_max", "t_max"];

pub fn render_csv(res: &SweepResult) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::Numeric(format!("csv encoding failed: {e}"));
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for s in &res.series {
        for p in &s.points {
            w.write_record([
                s.label.clone(),
                fmt_num(s.gamma),
                fmt_num(s.lambda),
                fmt_num(p.swept_value),
                fmt_num(p.c_max),
                fmt_num(p.t_max),
            ])
            .map_err(csv_err)?;
        }
    }
    let bytes = w.into_inner().map_err(|e| Error::Numeric(format!("csv encoding failed: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is ASCII"))
}

/// One parsed data row of a sweep CSV.
#[derive(Clone, Debug, PartialEq)]
pub struct CsvRow {
    pub series: String,
    pub gamma: f64,
    pub lambda: f64,
    pub swept_value: f64,
    pub c_max: f64,
    pub t_max: f64,
}

pub fn parse_csv(text: &str) -> Result<Vec<CsvRow>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers().map_err(|e| Error::arg(format!("bad csv header: {e}")))?;
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::arg(format!("unexpected csv header {header:?}")));
    }
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| Error::arg(format!("bad csv row {}: {e}", i + 1)))?;
        let num = |j: usize| -> Result<f64> {
            rec[j].parse().map_err(|_| Error::arg(format!("row {}: {:?} is not a number", i + 1, &rec[j])))
        };
        rows.push(CsvRow {
            series: rec[0].to_string(),
            gamma: num(1)?,
            lambda: num(2)?,
            swept_value: num(3)?,
            c_max: num(4)?,
            t_max: num(5)?,
        });
    }
    Ok(rows)
}

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

fn axis_label(kind: AxisKind) -> &'static str {
    match kind {
        AxisKind::OmegaD => "drive frequency ω_d / h₀",
        AxisKind::Lambda => "dephasing rate λ",
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// SVG 1.1 line plot of `C_max` against the swept value, one polyline per
/// series.
pub fn render_svg(res: &SweepResult) -> String {
    let curves: Vec<Curve> = res
        .series
        .iter()
        .map(|s| Curve { label: s.label.clone(), points: s.points.iter().map(|p| (p.swept_value, p.c_max)).collect() })
        .collect();
    line_plot_svg(axis_label(res.axis), "maximal concurrence C_max", &curves)
}

/// A labelled polyline for [`line_plot_svg`].
#[derive(Clone, Debug, PartialEq)]
pub struct Curve {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

/// Generic SVG 1.1 line plot with the y range starting at zero.
pub fn line_plot_svg(x_label: &str, y_label: &str, curves: &[Curve]) -> String {
    let (w, h) = (640.0, 420.0);
    let (left, right, top, bottom) = (70.0, 150.0, 30.0, 60.0);
    let (pw, ph) = (w - left - right, h - top - bottom);
    let finite = || curves.iter().flat_map(|c| c.points.iter()).filter(|(x, y)| x.is_finite() && y.is_finite());
    let (mut x0, mut x1) = finite().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p.0), b.max(p.0)));
    if !(x1 > x0) {
        x0 = if x0.is_finite() { x0 - 0.5 } else { 0.0 };
        x1 = x0 + 1.0;
    }
    let ymax = finite().fold(0.0f64, |m, p| m.max(p.1)).max(1.0);
    let sx = |x: f64| left + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| top + ph - y / ymax * ph;

    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8" standalone="no"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = writeln!(out, r#"<rect x="0" y="0" width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<g id="axes" stroke="black" stroke-width="1"><line x1="{left}" y1="{}" x2="{}" y2="{}"/><line x1="{left}" y1="{top}" x2="{left}" y2="{}"/></g>"#,
        top + ph,
        left + pw,
        top + ph,
        top + ph
    );
    let _ = writeln!(out, r#"<g id="ticks" font-family="sans-serif" font-size="11">"#);
    for i in 0..=5 {
        let fx = x0 + (x1 - x0) * i as f64 / 5.0;
        let fy = ymax * i as f64 / 5.0;
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            sx(fx),
            top + ph + 16.0,
            trim(fx)
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            left - 6.0,
            sy(fy) + 4.0,
            trim(fy)
        );
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(
        out,
        r#"<text id="x-label" x="{:.2}" y="{:.2}" text-anchor="middle" font-family="sans-serif" font-size="13">{}</text>"#,
        left + pw / 2.0,
        h - 18.0,
        escape(x_label)
    );
    let _ = writeln!(
        out,
        r#"<text id="y-label" x="18" y="{:.2}" text-anchor="middle" font-family="sans-serif" font-size="13" transform="rotate(-90 18 {:.2})">{}</text>"#,
        top + ph / 2.0,
        top + ph / 2.0,
        escape(y_label)
    );
    for (i, c) in curves.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts: Vec<String> = c
            .points
            .iter()
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .map(|&(x, y)| format!("{:.3},{:.3}", sx(x), sy(y)))
            .collect();
        let _ = writeln!(
            out,
            r#"<polyline class="series" fill="none" stroke="{color}" stroke-width="1.5" points="{}"><title>{}</title></polyline>"#,
            pts.join(" "),
            escape(&c.label)
        );
        let ly = top + 14.0 + 18.0 * i as f64;
        let lx = left + pw + 12.0;
        let _ = writeln!(
            out,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/><text x="{}" y="{}" font-family="sans-serif" font-size="11">{}</text>"#,
            lx + 20.0,
            lx + 26.0,
            ly + 4.0,
            escape(&c.label)
        );
    }
    let _ = writeln!(out, "</svg>");
    out
}

fn trim(x: f64) -> String {
    let s = format!("{x:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.into() }
}

/// Writes through a temporary sibling and renames into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".partial");
    let tmp = PathBuf::from(tmp);
    if let Err(e) = fs::write(&tmp, contents) {
        let _ = fs::remove_file(&tmp);
        return Err(Error::io(&tmp, e));
    }
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        Error::io(path, e)
    })
}

/// Writes several named files into `dir`; on failure every file written by
/// this call is removed again.
pub fn write_all(dir: &Path, files: &[(String, Vec<u8>)]) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();
    for (name, bytes) in files {
        let path = dir.join(name);
        if let Err(e) = write_atomic(&path, bytes) {
            for p in &written {
                let _ = fs::remove_file(p);
            }
            return Err(e);
        }
        written.push(path);
    }
    Ok(written)
}

#[derive(Serialize)]
struct Manifest<'a> {
    files: Vec<String>,
    rows: usize,
    #[serde(flatten)]
    result: &'a SweepResult,
}

/// Emits `<stem>.csv`, `<stem>.json` and `<stem>.svg` as requested.
pub fn emit_results(res: &SweepResult, dir: &Path, stem: &str, formats: &[Format]) -> Result<Vec<PathBuf>> {
    if res.row_count() == 0 {
        return Err(Error::arg("refusing to emit an empty result"));
    }
    let names: Vec<String> = formats.iter().map(|f| format!("{stem}.{}", f.extension())).collect();
    let mut files = Vec::with_capacity(formats.len());
    for (f, name) in formats.iter().zip(&names) {
        let bytes = match f {
            Format::Csv => render_csv(res)?.into_bytes(),
            Format::Svg => render_svg(res).into_bytes(),
            Format::Json => {
                let m = Manifest { files: names.clone(), rows: res.row_count(), result: res };
                serde_json::to_vec_pretty(&m).map_err(|e| Error::Numeric(format!("json encoding failed: {e}")))?
            }
        };
        files.push((name.clone(), bytes));
    }
    write_all(dir, &files)
}
