//! Histogram bar charts as SVG, with a plain-text twin.
//!
//! Panels are laid out left to right in rows of `columns`. Each panel shows
//! bin counts over the difficulty intervals, with the mean difficulty in its
//! title.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::histogram::{BinningSpec, DifficultyHistogram};

use super::write_atomic;

const PANEL_W: f64 = 360.0;
const PANEL_H: f64 = 240.0;
const MARGIN_L: f64 = 44.0;
const MARGIN_R: f64 = 12.0;
const MARGIN_T: f64 = 30.0;
const MARGIN_B: f64 = 34.0;
const TEXT_BAR: usize = 40;

#[derive(Debug, Clone, PartialEq)]
pub struct PlotPanel {
    pub title: String,
    pub counts: Vec<f64>,
    /// Mean difficulty; `None` prints as "n/a".
    pub mean: Option<f64>,
}

impl PlotPanel {
    /// Panel for `hist`, with the mean estimated from bin midpoints.
    pub fn from_histogram(title: impl Into<String>, hist: &DifficultyHistogram) -> Self {
        PlotPanel {
            title: title.into(),
            counts: hist.counts().to_vec(),
            mean: hist.midpoint_mean(),
        }
    }

    fn heading(&self) -> String {
        match self.mean {
            Some(m) => format!("{} (mean {m:.3})", self.title),
            None => format!("{} (mean n/a)", self.title),
        }
    }
}

fn check(panels: &[PlotPanel], columns: usize) -> Result<usize> {
    let first = panels.first().ok_or_else(|| Error::InvalidParameter {
        name: "panels",
        reason: "nothing to plot".into(),
    })?;
    if columns == 0 {
        return Err(Error::InvalidParameter {
            name: "columns",
            reason: "must be at least 1".into(),
        });
    }
    let n = first.counts.len();
    BinningSpec::new(n)?;
    for p in panels {
        if p.counts.len() != n {
            return Err(Error::LengthMismatch {
                left: p.counts.len(),
                right: n,
            });
        }
    }
    Ok(n)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn render_svg(panels: &[PlotPanel], columns: usize) -> Result<String> {
    let n = check(panels, columns)?;
    let spec = BinningSpec::new(n)?;
    let cols = columns.min(panels.len());
    let rows = panels.len().div_ceil(cols);
    let width = PANEL_W * cols as f64;
    let height = PANEL_H * rows as f64;
    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">"#
    )
    .unwrap();
    writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    for (i, panel) in panels.iter().enumerate() {
        let x0 = PANEL_W * (i % cols) as f64;
        let y0 = PANEL_H * (i / cols) as f64;
        let plot_w = PANEL_W - MARGIN_L - MARGIN_R;
        let plot_h = PANEL_H - MARGIN_T - MARGIN_B;
        let base = y0 + MARGIN_T + plot_h;
        let max = panel.counts.iter().copied().fold(0.0, f64::max);
        let bar_w = plot_w / n as f64;
        writeln!(s, r#"<g class="panel">"#).unwrap();
        writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-size="12">{}</text>"#,
            x0 + MARGIN_L + plot_w / 2.0,
            y0 + 18.0,
            escape(&panel.heading())
        )
        .unwrap();
        for (k, &c) in panel.counts.iter().enumerate() {
            let h = if max > 0.0 { plot_h * c / max } else { 0.0 };
            writeln!(
                s,
                r##"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="#4878a8"><title>{}: {}</title></rect>"##,
                x0 + MARGIN_L + bar_w * k as f64 + 0.5,
                base - h,
                (bar_w - 1.0).max(0.5),
                h,
                interval_label(spec, k),
                c
            )
            .unwrap();
        }
        writeln!(
            s,
            r#"<line x1="{:.1}" y1="{base:.1}" x2="{:.1}" y2="{base:.1}" stroke="black"/>"#,
            x0 + MARGIN_L,
            x0 + MARGIN_L + plot_w
        )
        .unwrap();
        writeln!(
            s,
            r#"<line x1="{0:.1}" y1="{1:.1}" x2="{0:.1}" y2="{base:.1}" stroke="black"/>"#,
            x0 + MARGIN_L,
            y0 + MARGIN_T
        )
        .unwrap();
        for (frac, label) in [(0.0, "0"), (0.5, "0.5"), (1.0, "1")] {
            writeln!(
                s,
                r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{label}</text>"#,
                x0 + MARGIN_L + plot_w * frac,
                base + 14.0
            )
            .unwrap();
        }
        writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">difficulty</text>"#,
            x0 + MARGIN_L + plot_w / 2.0,
            base + 28.0
        )
        .unwrap();
        writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#,
            x0 + MARGIN_L - 4.0,
            y0 + MARGIN_T + 4.0,
            fmt_count(max)
        )
        .unwrap();
        writeln!(s, "</g>").unwrap();
    }
    s.push_str("</svg>\n");
    Ok(s)
}

fn fmt_count(c: f64) -> String {
    if c.fract() == 0.0 {
        format!("{c:.0}")
    } else {
        format!("{c:.3}")
    }
}

fn interval_label(spec: BinningSpec, k: usize) -> String {
    let (lo, hi) = spec.edges(k);
    let close = if k + 1 == spec.bin_count() { ']' } else { ')' };
    format!("[{lo:.2},{hi:.2}{close}")
}

pub fn render_text(panels: &[PlotPanel]) -> Result<String> {
    let n = check(panels, 1)?;
    let spec = BinningSpec::new(n)?;
    let mut s = String::new();
    for (i, panel) in panels.iter().enumerate() {
        if i > 0 {
            s.push('\n');
        }
        writeln!(s, "{}", panel.heading()).unwrap();
        let max = panel.counts.iter().copied().fold(0.0, f64::max);
        for (k, &c) in panel.counts.iter().enumerate() {
            let len = if max > 0.0 {
                (c / max * TEXT_BAR as f64).round() as usize
            } else {
                0
            };
            writeln!(s, "{:<12} |{:<TEXT_BAR$}| {}", interval_label(spec, k), "#".repeat(len), fmt_count(c)).unwrap();
        }
    }
    Ok(s)
}

/// Writes the SVG to `path` and the text version next to it with a `.txt`
/// extension. Returns both paths.
pub fn emit_histogram_plot(panels: &[PlotPanel], columns: usize, path: &Path) -> Result<(PathBuf, PathBuf)> {
    let svg = render_svg(panels, columns)?;
    let text = render_text(panels)?;
    let txt_path = path.with_extension("txt");
    write_atomic(path, svg.as_bytes())?;
    write_atomic(&txt_path, text.as_bytes())?;
    Ok((path.to_path_buf(), txt_path))
}
