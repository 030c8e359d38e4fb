//! CSV tables and SVG line plots.

use std::fs;
use std::path::{Path, PathBuf};

use plotters::prelude::*;

use crate::ExpError;

/// Full-precision (17 significant digits) rendering of a float.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// `{family}_{alpha}_{param}`, e.g. `pd_0.25_10`.
pub fn stem(family: &str, alpha: f64, param: f64) -> String {
    format!("{family}_{alpha}_{param}")
}

/// A header and string-valued rows, written as comma-separated text.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    /// Parsed numeric column; empty cells become `None`.
    pub fn floats(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let c = self.column(name)?;
        Some(self.rows.iter().map(|r| r[c].parse().ok()).collect())
    }

    pub fn write(&self, path: &Path) -> Result<(), ExpError> {
        let io = |e: csv::Error| ExpError::Io(format!("{}: {e}", path.display()));
        let mut w = csv::Writer::from_path(path).map_err(io)?;
        w.write_record(&self.header).map_err(io)?;
        for r in &self.rows {
            w.write_record(r).map_err(io)?;
        }
        w.flush().map_err(|e| ExpError::Io(format!("{}: {e}", path.display())))
    }

    pub fn read(path: &Path) -> Result<Self, ExpError> {
        let io = |e: csv::Error| ExpError::Io(format!("{}: {e}", path.display()));
        let mut r = csv::Reader::from_path(path).map_err(io)?;
        let header = r.headers().map_err(io)?.iter().map(str::to_string).collect();
        let mut rows = Vec::new();
        for rec in r.records() {
            rows.push(rec.map_err(io)?.iter().map(str::to_string).collect());
        }
        Ok(Self { header, rows })
    }
}

pub fn ensure_dir(dir: &Path) -> Result<(), ExpError> {
    fs::create_dir_all(dir).map_err(|e| ExpError::Io(format!("{}: {e}", dir.display())))
}

/// One named curve.
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

const PALETTE: [RGBColor; 5] = [BLACK, RED, BLUE, RGBColor(0, 140, 0), RGBColor(150, 0, 150)];

/// Line plot with a logarithmic x axis.
pub fn plot_log_x(path: &Path, title: &str, y_label: &str, series: &[Series]) -> Result<PathBuf, ExpError> {
    let pts = series.iter().flat_map(|s| s.points.iter()).filter(|(x, y)| *x > 0.0 && y.is_finite());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        return Err(ExpError::Plot(format!("{}: nothing to plot", path.display())));
    }
    if x1 <= x0 {
        x1 = x0 * 1.5;
    }
    let pad = ((y1 - y0) * 0.05).max(y1.abs() * 1e-6).max(1e-12);
    let (y0, y1) = (y0 - pad, y1 + pad);

    let plot_err = |e: String| ExpError::Plot(format!("{}: {e}", path.display()));
    let root = SVGBackend::new(path, (800, 500)).into_drawing_area();
    root.fill(&WHITE).map_err(|e| plot_err(e.to_string()))?;
    let mut chart = ChartBuilder::on(&root)
        .caption(title, ("sans-serif", 20))
        .margin(10)
        .x_label_area_size(40)
        .y_label_area_size(70)
        .build_cartesian_2d((x0..x1).log_scale(), y0..y1)
        .map_err(|e| plot_err(e.to_string()))?;
    chart.configure_mesh().x_desc("n").y_desc(y_label).draw().map_err(|e| plot_err(e.to_string()))?;
    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts: Vec<(f64, f64)> =
            s.points.iter().copied().filter(|(x, y)| *x >= x0 && *x > 0.0 && y.is_finite()).collect();
        chart
            .draw_series(LineSeries::new(pts, color.stroke_width(2)))
            .map_err(|e| plot_err(e.to_string()))?
            .label(s.name.clone())
            .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 20, y)], color.stroke_width(2)));
    }
    chart
        .configure_series_labels()
        .background_style(WHITE.mix(0.8))
        .border_style(BLACK)
        .draw()
        .map_err(|e| plot_err(e.to_string()))?;
    root.present().map_err(|e| plot_err(e.to_string()))?;
    Ok(path.to_path_buf())
}
