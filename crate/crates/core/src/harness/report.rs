//! Report types and their CSV, JSON and SVG renderings.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::ExperimentConfig;
use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "pattern,ratio,trials,successes,rate";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridCell {
    pub pattern: String,
    pub ratio: f64,
    pub trials: usize,
    pub successes: usize,
    pub rate: f64,
}

impl GridCell {
    pub fn new(pattern: String, ratio: f64, trials: usize, successes: usize) -> Self {
        GridCell {
            pattern,
            ratio,
            trials,
            successes,
            rate: if trials == 0 { 0.0 } else { successes as f64 / trials as f64 },
        }
    }

    /// Binomial standard error `sqrt(p(1−p)/N)`.
    pub fn se(&self) -> f64 {
        if self.trials == 0 {
            return 0.0;
        }
        (self.rate * (1.0 - self.rate) / self.trials as f64).sqrt()
    }

    fn csv_row(&self) -> String {
        format!("{},{},{},{},{}", self.pattern, self.ratio, self.trials, self.successes, self.rate)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub version: String,
    pub git_hash: Option<String>,
    pub timestamp_unix: u64,
}

impl Metadata {
    pub fn collect() -> Self {
        let git_hash = std::process::Command::new("git")
            .args(["rev-parse", "HEAD"])
            .output()
            .ok()
            .filter(|o| o.status.success())
            .and_then(|o| String::from_utf8(o.stdout).ok())
            .map(|s| s.trim().to_string())
            .filter(|s| !s.is_empty());
        let timestamp_unix = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        Metadata {
            version: env!("CARGO_PKG_VERSION").to_string(),
            git_hash,
            timestamp_unix,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransitionReport {
    pub config: ExperimentConfig,
    pub grid: Vec<GridCell>,
    pub metadata: Metadata,
}

impl TransitionReport {
    pub fn cell(&self, pattern: &str, ratio: f64) -> Option<&GridCell> {
        self.grid.iter().find(|c| c.pattern == pattern && c.ratio == ratio)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> std::io::Result<()> {
        write_grid_csv(&self.grid, w)
    }

    pub fn write(&self, path: &Path, format: ReportFormat) -> Result<()> {
        let mut out = Vec::new();
        match format {
            ReportFormat::Csv => self.write_csv(&mut out).expect("in-memory write"),
            ReportFormat::Json => out = to_json(self)?,
        }
        std::fs::write(path, out).map_err(|e| Error::io(path, e))
    }

    pub fn read_json(path: &Path) -> Result<Self> {
        from_json(path)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Arm {
    pub label: String,
    pub report: TransitionReport,
}

/// Reports for several arms run on the same trial schedule.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairedReport {
    pub arms: Vec<Arm>,
}

impl PairedReport {
    pub fn arm(&self, label: &str) -> Option<&TransitionReport> {
        self.arms.iter().find(|a| a.label == label).map(|a| &a.report)
    }

    /// Cells labelled `arm/pattern`.
    pub fn flattened(&self) -> Vec<GridCell> {
        self.arms
            .iter()
            .flat_map(|a| {
                a.report.grid.iter().map(move |c| GridCell {
                    pattern: format!("{}/{}", a.label, c.pattern),
                    ..c.clone()
                })
            })
            .collect()
    }

    /// CSV with a leading `arm` column.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "arm,{CSV_HEADER}")?;
        for a in &self.arms {
            for c in &a.report.grid {
                writeln!(w, "{},{}", a.label, c.csv_row())?;
            }
        }
        Ok(())
    }

    pub fn write(&self, path: &Path, format: ReportFormat) -> Result<()> {
        let mut out = Vec::new();
        match format {
            ReportFormat::Csv => self.write_csv(&mut out).expect("in-memory write"),
            ReportFormat::Json => out = to_json(self)?,
        }
        std::fs::write(path, out).map_err(|e| Error::io(path, e))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

impl ReportFormat {
    /// `.json` selects JSON; anything else CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => ReportFormat::Json,
            _ => ReportFormat::Csv,
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    serde_json::to_vec_pretty(value).map_err(|e| Error::InvalidInput(format!("serialization: {e}")))
}

fn from_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_slice(&bytes).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

pub fn write_grid_csv<W: Write>(cells: &[GridCell], mut w: W) -> std::io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for c in cells {
        writeln!(w, "{}", c.csv_row())?;
    }
    Ok(())
}

fn parse_csv(text: &str, origin: &Path) -> Result<Vec<GridCell>> {
    let bad = |line: usize, what: &str| {
        Error::InvalidInput(format!("{}:{}: {what}", origin.display(), line + 1))
    };
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| bad(0, "empty file"))?;
    let with_arm = match header.trim() {
        h if h == CSV_HEADER => false,
        h if h == format!("arm,{CSV_HEADER}") => true,
        _ => return Err(bad(0, "unrecognized header")),
    };
    let mut cells = Vec::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.trim().split(',').collect();
        let f = if with_arm { &fields[1.min(fields.len())..] } else { &fields[..] };
        if f.len() != 5 {
            return Err(bad(i, "expected 5 columns"));
        }
        let pattern = if with_arm { format!("{}/{}", fields[0], f[0]) } else { f[0].to_string() };
        let ratio = f[1].parse().map_err(|_| bad(i, "bad ratio"))?;
        let trials = f[2].parse().map_err(|_| bad(i, "bad trial count"))?;
        let successes = f[3].parse().map_err(|_| bad(i, "bad success count"))?;
        cells.push(GridCell::new(pattern, ratio, trials, successes));
    }
    Ok(cells)
}

/// Reads grid cells from a CSV or JSON report, paired or single.
pub fn read_grid(path: &Path) -> Result<Vec<GridCell>> {
    match ReportFormat::from_path(path) {
        ReportFormat::Csv => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            parse_csv(&text, path)
        }
        ReportFormat::Json => {
            let value: serde_json::Value = from_json(path)?;
            let invalid = |e: serde_json::Error| Error::InvalidInput(format!("{}: {e}", path.display()));
            if value.get("arms").is_some() {
                Ok(serde_json::from_value::<PairedReport>(value).map_err(invalid)?.flattened())
            } else {
                Ok(serde_json::from_value::<TransitionReport>(value).map_err(invalid)?.grid)
            }
        }
    }
}

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// One success-rate polyline per label, in order of first appearance.
pub fn render_grid_svg(cells: &[GridCell]) -> String {
    let (w, h) = (640.0, 400.0);
    let (left, right, top, bottom) = (60.0, 160.0, 20.0, 50.0);
    let pw = w - left - right;
    let ph = h - top - bottom;

    let mut labels: Vec<&str> = Vec::new();
    for c in cells {
        if !labels.contains(&c.pattern.as_str()) {
            labels.push(&c.pattern);
        }
    }
    let mut ratios: Vec<f64> = cells.iter().map(|c| c.ratio).collect();
    ratios.sort_by(f64::total_cmp);
    ratios.dedup();
    let (lo, hi) = match (ratios.first(), ratios.last()) {
        (Some(&a), Some(&b)) if b > a => (a, b),
        (Some(&a), _) => (a - 0.5, a + 0.5),
        _ => (0.0, 1.0),
    };
    let sx = |r: f64| left + (r - lo) / (hi - lo) * pw;
    let sy = |p: f64| top + (1.0 - p) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    for k in 0..=4 {
        let p = k as f64 / 4.0;
        let y = sy(p);
        let _ = writeln!(
            s,
            "<line x1=\"{left}\" y1=\"{y:.2}\" x2=\"{:.2}\" y2=\"{y:.2}\" stroke=\"#ddd\"/>",
            left + pw
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{p}</text>"#,
            left - 6.0,
            y + 4.0
        );
    }
    for &r in &ratios {
        let x = sx(r);
        let _ = writeln!(
            s,
            r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{r}</text>"#,
            top + ph + 16.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">m/n</text>"#,
        left + pw / 2.0,
        h - 10.0
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">success rate</text>"#,
        top + ph / 2.0,
        top + ph / 2.0
    );
    for (i, label) in labels.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let mut pts: Vec<(f64, f64)> = cells
            .iter()
            .filter(|c| c.pattern == *label)
            .map(|c| (c.ratio, c.rate))
            .collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        let path: Vec<String> = pts.iter().map(|&(r, p)| format!("{:.2},{:.2}", sx(r), sy(p))).collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
            path.join(" ")
        );
        for &(r, p) in &pts {
            let _ = writeln!(
                s,
                r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#,
                sx(r),
                sy(p)
            );
        }
        let ly = top + 14.0 + 18.0 * i as f64;
        let lx = left + pw + 12.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/>"#,
            lx + 20.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}">{}</text>"#,
            lx + 26.0,
            ly + 4.0,
            escape(label)
        );
    }
    s.push_str("</svg>\n");
    s
}

pub fn render_svg(report: &TransitionReport, path: &Path) -> Result<()> {
    std::fs::write(path, render_grid_svg(&report.grid)).map_err(|e| Error::io(path, e))
}
