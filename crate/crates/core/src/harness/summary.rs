//! Aggregation of trial records and static SVG figures.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use thiserror::Error;

use super::config::Method;
use super::records::{read_records, CsvError, TrialRecord};

#[derive(Debug, Error)]
pub enum SummaryError {
    #[error(transparent)]
    Csv(#[from] CsvError),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("unknown summary kind `{0}` (expected fraction-curve, heatmap or noise-curve)")]
    UnknownKind(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SummaryKind {
    FractionCurve,
    Heatmap,
    NoiseCurve,
}

impl SummaryKind {
    pub fn name(self) -> &'static str {
        match self {
            SummaryKind::FractionCurve => "fraction-curve",
            SummaryKind::Heatmap => "heatmap",
            SummaryKind::NoiseCurve => "noise-curve",
        }
    }
}

impl FromStr for SummaryKind {
    type Err = SummaryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "fraction-curve" => Ok(SummaryKind::FractionCurve),
            "heatmap" => Ok(SummaryKind::Heatmap),
            "noise-curve" => Ok(SummaryKind::NoiseCurve),
            other => Err(SummaryError::UnknownKind(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct OrdF64(f64);

impl Eq for OrdF64 {}

impl PartialOrd for OrdF64 {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OrdF64 {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Aggregate over all trials of one (method, L, d, SNR) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellSummary {
    pub method: Method,
    pub len: usize,
    pub d: usize,
    pub snr_db: f64,
    pub trials: usize,
    pub perfect: usize,
    pub median_ser_db: f64,
}

impl CellSummary {
    pub fn rate(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.perfect as f64 / self.trials as f64
        }
    }

    pub fn fraction(&self) -> f64 {
        self.d as f64 / self.len as f64
    }
}

pub fn median(values: &mut [f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        let (a, b) = (values[n / 2 - 1], values[n / 2]);
        if a == b {
            a
        } else {
            (a + b) / 2.0
        }
    }
}

/// Groups records by (L, d, SNR, method), in that sort order.
pub fn aggregate(records: &[TrialRecord]) -> Vec<CellSummary> {
    let mut groups: BTreeMap<(usize, usize, OrdF64, Method), Vec<&TrialRecord>> = BTreeMap::new();
    for r in records {
        groups
            .entry((r.len, r.d, OrdF64(r.snr_db), r.method))
            .or_default()
            .push(r);
    }
    groups
        .into_iter()
        .map(|((len, d, snr, method), rs)| {
            let mut sers: Vec<f64> = rs.iter().map(|r| r.ser.db()).collect();
            CellSummary {
                method,
                len,
                d,
                snr_db: snr.0,
                trials: rs.len(),
                perfect: rs.iter().filter(|r| r.ser.is_perfect()).count(),
                median_ser_db: median(&mut sers),
            }
        })
        .collect()
}

/// Plain-text table of recovery rates, one row per cell.
pub fn format_table(cells: &[CellSummary]) -> String {
    let mut out =
        String::from("method     L      d  frac   snr_db  trials  rate   median_ser_db\n");
    for c in cells {
        let _ = writeln!(
            out,
            "{:<8} {:>5} {:>5}  {:.3} {:>7}  {:>6}  {:.2}  {:>8.2}",
            c.method.name(),
            c.len,
            c.d,
            c.fraction(),
            c.snr_db,
            c.trials,
            c.rate(),
            c.median_ser_db
        );
    }
    out
}

pub fn summary_csv(cells: &[CellSummary]) -> String {
    let mut out = String::from("method,L,d,fraction,snr_db,trials,perfect,rate,median_ser_db\n");
    for c in cells {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            c.method,
            c.len,
            c.d,
            c.fraction(),
            c.snr_db,
            c.trials,
            c.perfect,
            c.rate(),
            c.median_ser_db
        );
    }
    out
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 60.0;
const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

struct Canvas {
    body: String,
}

impl Canvas {
    fn new(title: &str) -> Self {
        let mut body = String::new();
        let _ = writeln!(
            body,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">"#
        );
        let _ = writeln!(body, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(
            body,
            r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>"#,
            WIDTH / 2.0,
            escape(title)
        );
        Canvas { body }
    }

    fn text(&mut self, x: f64, y: f64, anchor: &str, class: &str, s: &str) {
        let _ = writeln!(
            self.body,
            r#"<text class="{class}" x="{x:.1}" y="{y:.1}" text-anchor="{anchor}">{}</text>"#,
            escape(s)
        );
    }

    fn line(&mut self, x1: f64, y1: f64, x2: f64, y2: f64, stroke: &str, width: f64) {
        let _ = writeln!(
            self.body,
            r#"<line x1="{x1:.1}" y1="{y1:.1}" x2="{x2:.1}" y2="{y2:.1}" stroke="{stroke}" stroke-width="{width}"/>"#
        );
    }

    fn axes(&mut self, x_label: &str, y_label: &str) {
        let (x0, y0, x1, y1) = plot_box();
        self.line(x0, y1, x1, y1, "black", 1.0);
        self.line(x0, y0, x0, y1, "black", 1.0);
        self.text((x0 + x1) / 2.0, HEIGHT - 15.0, "middle", "axis", x_label);
        let _ = writeln!(
            self.body,
            r#"<text class="axis" x="15" y="{:.1}" text-anchor="middle" transform="rotate(-90 15 {:.1})">{}</text>"#,
            (y0 + y1) / 2.0,
            (y0 + y1) / 2.0,
            escape(y_label)
        );
    }

    fn finish(mut self) -> String {
        self.body.push_str("</svg>\n");
        self.body
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn plot_box() -> (f64, f64, f64, f64) {
    (
        MARGIN,
        MARGIN / 2.0 + 10.0,
        WIDTH - MARGIN * 2.0,
        HEIGHT - MARGIN,
    )
}

fn scale(v: f64, lo: f64, hi: f64, out_lo: f64, out_hi: f64) -> f64 {
    if hi > lo {
        out_lo + (v - lo) / (hi - lo) * (out_hi - out_lo)
    } else {
        (out_lo + out_hi) / 2.0
    }
}

struct Series {
    label: String,
    points: Vec<(f64, f64, String)>,
}

fn draw_series(canvas: &mut Canvas, series: &[Series], x_range: (f64, f64), y_range: (f64, f64)) {
    let (x0, y0, x1, y1) = plot_box();
    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let coords: Vec<(f64, f64)> = s
            .points
            .iter()
            .map(|(x, y, _)| {
                (
                    scale(*x, x_range.0, x_range.1, x0, x1),
                    scale(y.clamp(y_range.0, y_range.1), y_range.0, y_range.1, y1, y0),
                )
            })
            .collect();
        let path: Vec<String> = coords
            .iter()
            .map(|(x, y)| format!("{x:.1},{y:.1}"))
            .collect();
        let _ = writeln!(
            canvas.body,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            path.join(" ")
        );
        for ((x, y), (_, _, label)) in coords.iter().zip(&s.points) {
            let _ = writeln!(
                canvas.body,
                r#"<circle cx="{x:.1}" cy="{y:.1}" r="3" fill="{color}"/>"#
            );
            canvas.text(*x, y - 6.0, "middle", "value", label);
        }
        let ly = y0 + 14.0 * i as f64;
        canvas.line(x1 + 10.0, ly - 4.0, x1 + 25.0, ly - 4.0, color, 2.0);
        canvas.text(x1 + 30.0, ly, "start", "legend", &s.label);
    }
}

fn series_label(c: &CellSummary, with_d: bool) -> String {
    let mut label = format!("{} L={}", c.method, c.len);
    if with_d {
        let _ = write!(label, " d={}", c.d);
    } else if c.snr_db.is_finite() {
        let _ = write!(label, " snr={}", c.snr_db);
    }
    label
}

fn fraction_curve(cells: &[CellSummary]) -> String {
    let mut canvas = Canvas::new("Recovery rate vs missing fraction");
    canvas.axes("missing fraction d/L", "recovery rate (SER > 20 dB)");
    let mut groups: BTreeMap<(Method, usize, OrdF64), Series> = BTreeMap::new();
    for c in cells {
        groups
            .entry((c.method, c.len, OrdF64(c.snr_db)))
            .or_insert_with(|| Series {
                label: series_label(c, false),
                points: Vec::new(),
            })
            .points
            .push((c.fraction(), c.rate(), format!("{:.2}", c.rate())));
    }
    let series: Vec<Series> = groups.into_values().collect();
    let max_x = cells.iter().map(|c| c.fraction()).fold(0.0, f64::max);
    draw_series(&mut canvas, &series, (0.0, max_x.max(1e-9)), (0.0, 1.0));
    let (x0, _, _, y1) = plot_box();
    canvas.text(x0 - 5.0, y1, "end", "tick", "0");
    canvas.text(x0 - 5.0, plot_box().1 + 4.0, "end", "tick", "1");
    canvas.text(
        plot_box().2,
        y1 + 14.0,
        "middle",
        "tick",
        &format!("{max_x:.2}"),
    );
    canvas.finish()
}

fn noise_curve(cells: &[CellSummary]) -> String {
    const SER_CAP: f64 = 100.0;
    let mut canvas = Canvas::new("Median SER vs magnitude SNR");
    canvas.axes("magnitude SNR (dB)", "median SER (dB)");
    let finite: Vec<f64> = cells
        .iter()
        .map(|c| c.snr_db)
        .filter(|s| s.is_finite())
        .collect();
    let lo = finite.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = finite.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let (lo, hi) = if finite.is_empty() {
        (0.0, 1.0)
    } else {
        (lo, hi)
    };
    // Noiseless cells sit one step to the right of the largest SNR.
    let step = if hi > lo { (hi - lo) / 5.0 } else { 1.0 };
    let pos = |s: f64| if s.is_finite() { s } else { hi + step };

    let mut groups: BTreeMap<(Method, usize, usize), Series> = BTreeMap::new();
    for c in cells {
        let label = if c.median_ser_db.is_finite() {
            format!("{:.1}", c.median_ser_db)
        } else {
            "inf".to_string()
        };
        groups
            .entry((c.method, c.len, c.d))
            .or_insert_with(|| Series {
                label: series_label(c, true),
                points: Vec::new(),
            })
            .points
            .push((pos(c.snr_db), c.median_ser_db.min(SER_CAP), label));
    }
    let series: Vec<Series> = groups.into_values().collect();
    let y_lo = cells
        .iter()
        .map(|c| c.median_ser_db)
        .fold(0.0, f64::min)
        .max(-SER_CAP);
    let x_hi = if cells.iter().any(|c| !c.snr_db.is_finite()) {
        hi + step
    } else {
        hi
    };
    draw_series(&mut canvas, &series, (lo, x_hi), (y_lo, SER_CAP));
    let (x0, y0, x1, y1) = plot_box();
    canvas.text(x0, y1 + 14.0, "middle", "tick", &format!("{lo}"));
    canvas.text(x1, y1 + 14.0, "middle", "tick", &format!("{x_hi}"));
    canvas.text(x0 - 5.0, y1, "end", "tick", &format!("{y_lo:.0}"));
    canvas.text(x0 - 5.0, y0 + 4.0, "end", "tick", &format!("{SER_CAP:.0}"));
    canvas.finish()
}

fn heatmap(cells: &[CellSummary]) -> String {
    let method = Method::ALL
        .iter()
        .rev()
        .find(|m| cells.iter().any(|c| c.method == **m))
        .copied();
    let mut canvas = Canvas::new(&format!(
        "Recovery rate, {}",
        method.map(Method::name).unwrap_or("no data")
    ));
    canvas.axes("missing fraction d/L", "signal length L");
    let Some(method) = method else {
        return canvas.finish();
    };
    let snr = if cells
        .iter()
        .any(|c| c.method == method && c.snr_db == f64::INFINITY)
    {
        f64::INFINITY
    } else {
        cells
            .iter()
            .filter(|c| c.method == method)
            .map(|c| c.snr_db)
            .fold(f64::INFINITY, f64::min)
    };
    let chosen: Vec<&CellSummary> = cells
        .iter()
        .filter(|c| c.method == method && c.snr_db == snr)
        .collect();

    let key = |f: f64| (f * 1e6).round() as i64;
    let mut fractions: Vec<i64> = chosen.iter().map(|c| key(c.fraction())).collect();
    fractions.sort_unstable();
    fractions.dedup();
    let mut lengths: Vec<usize> = chosen.iter().map(|c| c.len).collect();
    lengths.sort_unstable();
    lengths.dedup();

    let (x0, y0, x1, y1) = plot_box();
    let cw = (x1 - x0) / fractions.len() as f64;
    let ch = (y1 - y0) / lengths.len() as f64;
    for c in &chosen {
        let col = fractions
            .binary_search(&key(c.fraction()))
            .expect("collected above");
        let row = lengths.binary_search(&c.len).expect("collected above");
        let x = x0 + col as f64 * cw;
        // Longest signals on top.
        let y = y1 - (row + 1) as f64 * ch;
        let shade = (255.0 * (1.0 - c.rate())).round() as u8;
        let _ = writeln!(
            canvas.body,
            r#"<rect x="{x:.1}" y="{y:.1}" width="{cw:.1}" height="{ch:.1}" fill="rgb({shade},{shade},255)" stroke="white"/>"#
        );
        canvas.text(
            x + cw / 2.0,
            y + ch / 2.0 + 4.0,
            "middle",
            "rate",
            &format!("{:.2}", c.rate()),
        );
    }
    for (i, f) in fractions.iter().enumerate() {
        canvas.text(
            x0 + (i as f64 + 0.5) * cw,
            y1 + 14.0,
            "middle",
            "tick",
            &format!("{:.2}", *f as f64 / 1e6),
        );
    }
    for (i, l) in lengths.iter().enumerate() {
        canvas.text(
            x0 - 5.0,
            y1 - (i as f64 + 0.5) * ch + 4.0,
            "end",
            "tick",
            &l.to_string(),
        );
    }

    // Guarantee line at d/L = 1/3, placed by interpolating between column centres.
    let centres: Vec<(f64, f64)> = fractions
        .iter()
        .enumerate()
        .map(|(i, f)| (*f as f64 / 1e6, x0 + (i as f64 + 0.5) * cw))
        .collect();
    let third = 1.0 / 3.0;
    let gx = match centres.len() {
        1 => {
            let (f, cx) = centres[0];
            if third < f {
                x0
            } else if third > f {
                x1
            } else {
                cx
            }
        }
        _ => {
            let seg = centres
                .windows(2)
                .position(|w| third <= w[1].0)
                .unwrap_or(centres.len() - 2);
            let (fa, xa) = centres[seg];
            let (fb, xb) = centres[seg + 1];
            (xa + (third - fa) / (fb - fa) * (xb - xa)).clamp(x0, x1)
        }
    };
    canvas.line(gx, y0, gx, y1, "red", 2.0);
    canvas.text(gx + 4.0, y0 + 12.0, "start", "guarantee", "d/L = 1/3");
    canvas.finish()
}

pub fn render_svg(kind: SummaryKind, cells: &[CellSummary]) -> String {
    match kind {
        SummaryKind::FractionCurve => fraction_curve(cells),
        SummaryKind::Heatmap => heatmap(cells),
        SummaryKind::NoiseCurve => noise_curve(cells),
    }
}

#[derive(Debug, Clone)]
pub struct SummaryOutput {
    pub svg: PathBuf,
    pub csv: PathBuf,
    pub cells: Vec<CellSummary>,
}

/// Reads a results CSV and writes `<stem>_<kind>.svg` and
/// `<stem>_<kind>.csv` into `out_dir` (default: next to the input).
pub fn emit_summary(
    csv_path: &Path,
    kind: SummaryKind,
    out_dir: Option<&Path>,
) -> Result<SummaryOutput, SummaryError> {
    let records = read_records(std::fs::File::open(csv_path)?)?;
    let cells = aggregate(&records);
    let dir = out_dir
        .map(Path::to_path_buf)
        .or_else(|| csv_path.parent().map(Path::to_path_buf))
        .unwrap_or_default();
    std::fs::create_dir_all(&dir).ok();
    let stem = csv_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "results".into());
    let svg = dir.join(format!("{stem}_{}.svg", kind.name()));
    let csv = dir.join(format!("{stem}_{}.csv", kind.name()));
    std::fs::write(&svg, render_svg(kind, &cells))?;
    std::fs::write(&csv, summary_csv(&cells))?;
    Ok(SummaryOutput { svg, csv, cells })
}
