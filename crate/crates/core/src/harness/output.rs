//! Artifact writers: CSV tables with a provenance footer, JSON records and small
//! native SVG plots.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{QnsError, Result};

/// Version string in `git describe` style; set `QNS_GIT_DESCRIBE` at build time to
/// embed the real one.
pub fn version() -> String {
    option_env!("QNS_GIT_DESCRIBE")
        .map(str::to_string)
        .unwrap_or_else(|| format!("v{}", env!("CARGO_PKG_VERSION")))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Provenance {
    pub experiment: String,
    pub seed: u64,
    pub config_hash: String,
}

/// Collects artifacts in memory and writes them in one go, so a failing run never
/// leaves a half-written directory behind.
#[derive(Debug, Default)]
pub struct Artifacts {
    files: Vec<(String, String)>,
}

impl Artifacts {
    pub fn csv(&mut self, name: &str, table: &Table, prov: &Provenance) {
        let mut s = String::new();
        s.push_str(&table.columns.join(","));
        s.push('\n');
        for row in &table.rows {
            s.push_str(&row.join(","));
            s.push('\n');
        }
        self.csv_body(name, s, prov);
    }

    /// Already formatted CSV; the provenance footer is appended.
    pub fn csv_body(&mut self, name: &str, mut s: String, prov: &Provenance) {
        let _ = writeln!(s, "# version={}", version());
        let _ = writeln!(s, "# experiment={}", prov.experiment);
        let _ = writeln!(s, "# seed={}", prov.seed);
        let _ = writeln!(s, "# config_sha256={}", prov.config_hash);
        self.files.push((name.to_string(), s));
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let s = serde_json::to_string_pretty(value).map_err(|e| QnsError::Io(e.to_string()))?;
        self.files.push((name.to_string(), s + "\n"));
        Ok(())
    }

    pub fn text(&mut self, name: &str, body: String) {
        self.files.push((name.to_string(), body));
    }

    pub fn names(&self) -> Vec<&str> {
        self.files.iter().map(|(n, _)| n.as_str()).collect()
    }

    pub fn get(&self, name: &str) -> Option<&str> {
        self.files.iter().find(|(n, _)| n == name).map(|(_, b)| b.as_str())
    }

    pub fn write_all(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir).map_err(|e| QnsError::Io(format!("{}: {e}", dir.display())))?;
        let mut written = Vec::new();
        for (name, body) in &self.files {
            let path = dir.join(name);
            fs::write(&path, body).map_err(|e| QnsError::Io(format!("{}: {e}", path.display())))?;
            written.push(path);
        }
        Ok(written)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// Shortest round-trip representation, so reruns are byte-identical.
pub fn num(v: f64) -> String {
    format!("{v:?}")
}

pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];
const W: f64 = 640.0;
const H: f64 = 400.0;
const PAD: f64 = 56.0;

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.filter(|v| v.is_finite()).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if hi - lo < 1e-12 {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

fn frame(title: &str, xlabel: &str, ylabel: &str, x: (f64, f64), y: (f64, f64)) -> String {
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" font-family="sans-serif" font-size="12">"#);
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>"#, W / 2.0, escape(title));
    let _ = writeln!(
        s,
        r#"<rect x="{PAD}" y="{PAD}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        W - 2.0 * PAD,
        H - 2.0 * PAD
    );
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, W / 2.0, H - 12.0, escape(xlabel));
    let _ = writeln!(
        s,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
        H / 2.0,
        H / 2.0,
        escape(ylabel)
    );
    for i in 0..=4 {
        let f = i as f64 / 4.0;
        let px = PAD + f * (W - 2.0 * PAD);
        let py = H - PAD - f * (H - 2.0 * PAD);
        let _ = writeln!(s, r#"<text x="{px:.1}" y="{}" text-anchor="middle">{}</text>"#, H - PAD + 16.0, tick(x.0 + f * (x.1 - x.0)));
        let _ = writeln!(s, r#"<text x="{}" y="{:.1}" text-anchor="end">{}</text>"#, PAD - 4.0, py + 4.0, tick(y.0 + f * (y.1 - y.0)));
    }
    s
}

fn tick(v: f64) -> String {
    if v != 0.0 && (v.abs() < 1e-2 || v.abs() >= 1e4) {
        format!("{v:.1e}")
    } else {
        format!("{v:.3}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn map(v: f64, range: (f64, f64), lo: f64, hi: f64) -> f64 {
    lo + (v - range.0) / (range.1 - range.0) * (hi - lo)
}

fn legend(s: &mut String, labels: &[&str]) {
    for (i, l) in labels.iter().enumerate() {
        let y = PAD + 14.0 + 16.0 * i as f64;
        let c = PALETTE[i % PALETTE.len()];
        let _ = writeln!(s, r#"<line x1="{}" y1="{y}" x2="{}" y2="{y}" stroke="{c}" stroke-width="2"/>"#, W - PAD - 150.0, W - PAD - 130.0);
        let _ = writeln!(s, r#"<text x="{}" y="{}">{}</text>"#, W - PAD - 124.0, y + 4.0, escape(l));
    }
}

pub fn line_plot(title: &str, xlabel: &str, ylabel: &str, series: &[Series]) -> String {
    let x = bounds(series.iter().flat_map(|s| s.points.iter().map(|p| p.0)));
    let y = bounds(series.iter().flat_map(|s| s.points.iter().map(|p| p.1)));
    let mut s = frame(title, xlabel, ylabel, x, y);
    for (i, ser) in series.iter().enumerate() {
        let pts: Vec<String> = ser
            .points
            .iter()
            .filter(|p| p.0.is_finite() && p.1.is_finite())
            .map(|p| format!("{:.2},{:.2}", map(p.0, x, PAD, W - PAD), map(p.1, y, H - PAD, PAD)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{}" stroke-width="1.5" points="{}"/>"#,
            PALETTE[i % PALETTE.len()],
            pts.join(" ")
        );
    }
    legend(&mut s, &series.iter().map(|s| s.label.as_str()).collect::<Vec<_>>());
    s.push_str("</svg>\n");
    s
}

/// Overlaid step histograms on shared bins.
pub fn histogram_plot(title: &str, xlabel: &str, edges: &[f64], counts: &[(String, Vec<usize>)]) -> String {
    let x = (edges[0], edges[edges.len() - 1]);
    let y = (0.0, counts.iter().flat_map(|c| c.1.iter()).copied().max().unwrap_or(1).max(1) as f64);
    let mut s = frame(title, xlabel, "count", x, y);
    for (i, (_, c)) in counts.iter().enumerate() {
        let mut pts = vec![format!("{:.2},{:.2}", map(edges[0], x, PAD, W - PAD), H - PAD)];
        for (b, &n) in c.iter().enumerate() {
            let py = map(n as f64, y, H - PAD, PAD);
            pts.push(format!("{:.2},{py:.2}", map(edges[b], x, PAD, W - PAD)));
            pts.push(format!("{:.2},{py:.2}", map(edges[b + 1], x, PAD, W - PAD)));
        }
        pts.push(format!("{:.2},{:.2}", map(x.1, x, PAD, W - PAD), H - PAD));
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{}" stroke-width="1.5" points="{}"/>"#,
            PALETTE[i % PALETTE.len()],
            pts.join(" ")
        );
    }
    legend(&mut s, &counts.iter().map(|c| c.0.as_str()).collect::<Vec<_>>());
    s.push_str("</svg>\n");
    s
}

/// Counts of `values` in `bins` equal-width bins over `[lo, hi]`; outliers are clamped
/// into the edge bins.
pub fn histogram(values: impl Iterator<Item = f64>, lo: f64, hi: f64, bins: usize) -> Vec<usize> {
    let mut out = vec![0; bins];
    for v in values {
        let i = ((v - lo) / (hi - lo) * bins as f64).floor();
        let i = if i.is_nan() { 0 } else { (i.max(0.0) as usize).min(bins - 1) };
        out[i] += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_has_header_and_footer() {
        let mut t = Table::new(&["a", "b"]);
        t.push(vec![num(1.0), num(0.1)]);
        let mut art = Artifacts::default();
        let prov = Provenance { experiment: "x".into(), seed: 3, config_hash: "abc".into() };
        art.csv("t.csv", &t, &prov);
        let body = art.get("t.csv").unwrap();
        assert!(body.starts_with("a,b\n1.0,0.1\n"));
        assert!(body.contains("# seed=3\n") && body.contains("# config_sha256=abc\n") && body.contains("# version=v"));
    }

    #[test]
    fn histogram_clamps() {
        assert_eq!(histogram([-5.0, 0.1, 0.6, 9.0].into_iter(), 0.0, 1.0, 2), vec![2, 2]);
    }

    #[test]
    fn plots_are_svg() {
        let s = line_plot("t", "x", "y", &[Series { label: "a<b".into(), points: vec![(0.0, 1.0), (1.0, 2.0)] }]);
        assert!(s.starts_with("<svg") && s.contains("a&lt;b") && s.ends_with("</svg>\n"));
        let h = histogram_plot("t", "x", &[0.0, 0.5, 1.0], &[("a".into(), vec![1, 3])]);
        assert!(h.contains("polyline"));
    }
}
