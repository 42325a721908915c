//! Standalone SVG line charts of CSV columns.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{LabError, Result};
use crate::output::{missing_column, Table};

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 150.0;
const MARGIN_T: f64 = 20.0;
const MARGIN_B: f64 = 50.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scale {
    /// Both axes logarithmic.
    LogLog,
    /// Linear x, logarithmic y.
    LinLog,
}

/// How rows sharing an x value are combined into one point.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Reduce {
    None,
    Median,
    Max,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlotSpec {
    pub x: String,
    pub y: Vec<String>,
    pub scale: Scale,
    pub reduce: Reduce,
}

struct Series {
    name: String,
    points: Vec<(f64, f64)>,
}

fn series(table: &Table, spec: &PlotSpec) -> Result<Vec<Series>> {
    if table.rows.is_empty() {
        return Err(LabError::Config(format!("{} has no data rows", table.name)));
    }
    let xs = table.floats(&spec.x)?;
    let mut out = Vec::new();
    for name in &spec.y {
        if table.column(name).is_none() {
            return Err(missing_column(name, &table.header));
        }
        let ys = table.floats(name)?;
        let pairs: Vec<(f64, f64)> = xs.iter().copied().zip(ys).collect();
        let points = match spec.reduce {
            Reduce::None => pairs,
            Reduce::Median | Reduce::Max => {
                let mut groups: BTreeMap<u64, Vec<f64>> = BTreeMap::new();
                let mut keys: Vec<u64> = Vec::new();
                for (x, y) in pairs {
                    let key = x.to_bits();
                    if !groups.contains_key(&key) {
                        keys.push(key);
                    }
                    groups.entry(key).or_default().push(y);
                }
                keys.iter()
                    .map(|k| {
                        let mut v = groups[k].clone();
                        v.sort_by(f64::total_cmp);
                        let y = if spec.reduce == Reduce::Max { v[v.len() - 1] } else { v[v.len() / 2] };
                        (f64::from_bits(*k), y)
                    })
                    .collect()
            }
        };
        out.push(Series { name: name.clone(), points });
    }
    Ok(out)
}

struct Axis {
    log: bool,
    lo: f64,
    hi: f64,
}

impl Axis {
    fn fit(values: impl Iterator<Item = f64>, log: bool) -> Option<Axis> {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in values {
            let t = if log { v.log10() } else { v };
            lo = lo.min(t);
            hi = hi.max(t);
        }
        if !lo.is_finite() || !hi.is_finite() {
            return None;
        }
        if log {
            lo = lo.floor();
            hi = hi.ceil().max(lo + 1.0);
        } else if hi == lo {
            lo -= 0.5;
            hi += 0.5;
        }
        Some(Axis { log, lo, hi })
    }

    fn unit(&self, v: f64) -> f64 {
        let t = if self.log { v.log10() } else { v };
        (t - self.lo) / (self.hi - self.lo)
    }

    fn ticks(&self) -> Vec<(f64, String)> {
        if self.log {
            let span = (self.hi - self.lo) as i64;
            let step = (span / 8 + 1).max(1);
            (0..=span)
                .step_by(step as usize)
                .map(|i| {
                    let e = self.lo as i64 + i;
                    (10f64.powi(e as i32), format!("1e{e}"))
                })
                .collect()
        } else {
            (0..=5)
                .map(|i| {
                    let v = self.lo + (self.hi - self.lo) * i as f64 / 5.0;
                    (v, format!("{v:.3}"))
                })
                .collect()
        }
    }
}

fn usable(v: f64, log: bool) -> bool {
    v.is_finite() && (!log || v > 0.0)
}

/// Renders the chart as an SVG document.
pub fn render(table: &Table, spec: &PlotSpec) -> Result<String> {
    let mut all = series(table, spec)?;
    let log_x = spec.scale == Scale::LogLog;
    for s in &mut all {
        s.points.retain(|&(x, y)| usable(x, log_x) && usable(y, true));
    }
    let x_axis = Axis::fit(all.iter().flat_map(|s| s.points.iter().map(|p| p.0)), log_x);
    let y_axis = Axis::fit(all.iter().flat_map(|s| s.points.iter().map(|p| p.1)), true);
    let (Some(xa), Some(ya)) = (x_axis, y_axis) else {
        return Err(LabError::Config("no plottable (finite, positive) values in the selected columns".into()));
    };
    let pw = WIDTH - MARGIN_L - MARGIN_R;
    let ph = HEIGHT - MARGIN_T - MARGIN_B;
    let px = |x: f64| MARGIN_L + xa.unit(x) * pw;
    let py = |y: f64| MARGIN_T + (1.0 - ya.unit(y)) * ph;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    for (v, label) in xa.ticks() {
        let x = px(v);
        let _ = writeln!(svg, r##"<line x1="{x:.2}" y1="{MARGIN_T}" x2="{x:.2}" y2="{:.2}" stroke="#ddd"/>"##, MARGIN_T + ph);
        let _ = writeln!(svg, r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{label}</text>"#, MARGIN_T + ph + 16.0);
    }
    for (v, label) in ya.ticks() {
        let y = py(v);
        let _ = writeln!(svg, r##"<line x1="{MARGIN_L}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#ddd"/>"##, MARGIN_L + pw);
        let _ = writeln!(svg, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{label}</text>"#, MARGIN_L - 6.0, y + 4.0);
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        MARGIN_L + pw / 2.0,
        HEIGHT - 12.0,
        escape(&spec.x)
    );
    for (i, s) in all.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts: Vec<String> = s.points.iter().map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y))).collect();
        if !pts.is_empty() {
            let _ = writeln!(svg, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, pts.join(" "));
        }
        let ly = MARGIN_T + 14.0 + 18.0 * i as f64;
        let lx = MARGIN_L + pw + 12.0;
        let _ = writeln!(svg, r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/>"#, lx + 20.0);
        let _ = writeln!(svg, r#"<text x="{:.2}" y="{:.2}">{}</text>"#, lx + 26.0, ly + 4.0, escape(&s.name));
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn emit_plot(csv: &Path, spec: &PlotSpec, out: &Path) -> Result<()> {
    let table = Table::read(csv)?;
    let svg = render(&table, spec)?;
    if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| LabError::io(parent, e))?;
    }
    std::fs::write(out, svg).map_err(|e| LabError::io(out, e))
}
