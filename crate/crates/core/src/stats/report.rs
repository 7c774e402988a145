//! Table CSVs and box-plot SVGs.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::stats::summary::{summarize, SummaryStats};

/// First header cell of every table.
pub const STAT_COLUMN: &str = "stat";

/// `foo.csv` -> `foo.full.csv`.
pub fn full_precision_path(path: &Path) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    path.with_file_name(format!("{stem}.full.csv"))
}

fn table_text(labels: &[String], stats: &[SummaryStats], cell: impl Fn(f64) -> String) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec![STAT_COLUMN.to_string()];
    header.extend(labels.iter().cloned());
    w.write_record(&header)?;
    for (row, name) in SummaryStats::ROW_NAMES.iter().enumerate() {
        let mut rec = vec![name.to_string()];
        rec.extend(stats.iter().map(|s| cell(s.rows()[row])));
        w.write_record(&rec)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::io("<table>", e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Writes the two-decimal table to `path` and a full-precision copy next to
/// it (see [`full_precision_path`]).
pub fn emit_table_csv(labels: &[String], stats: &[SummaryStats], path: &Path) -> Result<()> {
    if labels.is_empty() {
        return Err(Error::Argument("a table needs at least one group".into()));
    }
    if labels.len() != stats.len() {
        return Err(Error::Argument(format!(
            "{} labels but {} summaries",
            labels.len(),
            stats.len()
        )));
    }
    let rounded = table_text(labels, stats, |v| format!("{v:.2}"))?;
    let full = table_text(labels, stats, |v| format!("{v}"))?;
    std::fs::write(path, rounded).map_err(|e| Error::io(path, e))?;
    let fp = full_precision_path(path);
    std::fs::write(&fp, full).map_err(|e| Error::io(&fp, e))
}

/// Parses a table written by [`emit_table_csv`].
pub fn read_table_csv(path: &Path) -> Result<(Vec<String>, Vec<SummaryStats>)> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let header = rdr.headers()?.clone();
    if header.get(0) != Some(STAT_COLUMN) {
        return Err(Error::Format(format!(
            "{}: missing `{STAT_COLUMN}` column",
            path.display()
        )));
    }
    let labels: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    let mut cols = vec![[0.0; 6]; labels.len()];
    let mut n_rows = 0;
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if row >= 6 || rec.get(0) != Some(SummaryStats::ROW_NAMES[row]) {
            return Err(Error::Format(format!("{}: unexpected row {}", path.display(), row + 1)));
        }
        for (c, col) in cols.iter_mut().enumerate() {
            let cell = rec.get(c + 1).unwrap_or("");
            col[row] = cell
                .parse()
                .map_err(|_| Error::Format(format!("{}: bad number `{cell}`", path.display())))?;
        }
        n_rows += 1;
    }
    if n_rows != 6 {
        return Err(Error::Format(format!(
            "{}: expected 6 rows, found {n_rows}",
            path.display()
        )));
    }
    Ok((labels, cols.into_iter().map(SummaryStats::from_rows).collect()))
}

const PLOT_TOP: f64 = 50.0;
const PLOT_HEIGHT: f64 = 300.0;
const PLOT_LEFT: f64 = 70.0;
const SLOT_WIDTH: f64 = 90.0;
const BOX_WIDTH: f64 = 44.0;

/// Vertical data-to-pixel mapping of a box plot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlotScale {
    pub lo: f64,
    pub hi: f64,
}

impl PlotScale {
    pub fn covering(stats: &[SummaryStats]) -> Self {
        let lo = stats.iter().map(|s| s.min).fold(f64::INFINITY, f64::min);
        let hi = stats.iter().map(|s| s.max).fold(f64::NEG_INFINITY, f64::max);
        let pad = if hi > lo { 0.05 * (hi - lo) } else { 1.0 };
        PlotScale {
            lo: lo - pad,
            hi: hi + pad,
        }
    }

    pub fn y(&self, v: f64) -> f64 {
        PLOT_TOP + PLOT_HEIGHT * (self.hi - v) / (self.hi - self.lo)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Renders one box per group: box from q1 to q3, median line, min/max
/// whiskers and a dot at the mean.
pub fn render_boxplot_svg(title: &str, y_label: &str, groups: &[(String, Vec<f64>)]) -> Result<String> {
    if groups.is_empty() {
        return Err(Error::Argument("a box plot needs at least one group".into()));
    }
    let stats = groups
        .iter()
        .map(|(label, v)| summarize(v).map_err(|e| Error::Argument(format!("group {label}: {e}"))))
        .collect::<Result<Vec<_>>>()?;
    let scale = PlotScale::covering(&stats);
    let width = PLOT_LEFT + SLOT_WIDTH * groups.len() as f64 + 20.0;
    let height = PLOT_TOP + PLOT_HEIGHT + 90.0;
    let bottom = PLOT_TOP + PLOT_HEIGHT;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
        width / 2.0,
        escape(title)
    );
    // axes
    let _ = writeln!(
        s,
        r#"<line x1="{PLOT_LEFT:.2}" y1="{PLOT_TOP:.2}" x2="{PLOT_LEFT:.2}" y2="{bottom:.2}" stroke="black"/>"#
    );
    let _ = writeln!(
        s,
        r#"<line x1="{PLOT_LEFT:.2}" y1="{bottom:.2}" x2="{:.2}" y2="{bottom:.2}" stroke="black"/>"#,
        width - 10.0
    );
    for k in 0..=5 {
        let v = scale.lo + (scale.hi - scale.lo) * k as f64 / 5.0;
        let y = scale.y(v);
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{y:.2}" x2="{PLOT_LEFT:.2}" y2="{y:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{v:.2}</text>"#,
            PLOT_LEFT - 4.0,
            PLOT_LEFT - 6.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text transform="translate(16 {:.2}) rotate(-90)" text-anchor="middle">{}</text>"#,
        PLOT_TOP + PLOT_HEIGHT / 2.0,
        escape(y_label)
    );

    for (i, ((label, _), st)) in groups.iter().zip(&stats).enumerate() {
        let cx = PLOT_LEFT + SLOT_WIDTH * (i as f64 + 0.5);
        let (x0, x1) = (cx - BOX_WIDTH / 2.0, cx + BOX_WIDTH / 2.0);
        let (y_min, y_q1, y_med, y_q3, y_max) = (
            scale.y(st.min),
            scale.y(st.q1),
            scale.y(st.median),
            scale.y(st.q3),
            scale.y(st.max),
        );
        let _ = writeln!(s, r#"<g class="group">"#);
        let _ = writeln!(
            s,
            r#"<line class="whisker" x1="{cx:.2}" y1="{y_max:.2}" x2="{cx:.2}" y2="{y_q3:.2}" stroke="black"/>"#
        );
        let _ = writeln!(
            s,
            r#"<line class="whisker" x1="{cx:.2}" y1="{y_q1:.2}" x2="{cx:.2}" y2="{y_min:.2}" stroke="black"/>"#
        );
        for y in [y_min, y_max] {
            let _ = writeln!(
                s,
                r#"<line class="cap" x1="{:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="black"/>"#,
                cx - BOX_WIDTH / 4.0,
                cx + BOX_WIDTH / 4.0
            );
        }
        let _ = writeln!(
            s,
            r#"<rect class="box" x="{x0:.2}" y="{y_q3:.2}" width="{BOX_WIDTH:.2}" height="{:.2}" fill="lightsteelblue" stroke="black"/>"#,
            y_q1 - y_q3
        );
        let _ = writeln!(
            s,
            r#"<line class="median" x1="{x0:.2}" y1="{y_med:.2}" x2="{x1:.2}" y2="{y_med:.2}" stroke="black" stroke-width="2"/>"#
        );
        let _ = writeln!(
            s,
            r#"<circle class="mean" cx="{cx:.2}" cy="{:.2}" r="3" fill="firebrick"/>"#,
            scale.y(st.mean)
        );
        let _ = writeln!(
            s,
            r#"<text x="{cx:.2}" y="{:.2}" text-anchor="end" transform="rotate(-35 {cx:.2} {:.2})">{}</text>"#,
            bottom + 16.0,
            bottom + 16.0,
            escape(label)
        );
        let _ = writeln!(s, "</g>");
    }
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn emit_boxplot_svg(title: &str, y_label: &str, groups: &[(String, Vec<f64>)], path: &Path) -> Result<()> {
    let svg = render_boxplot_svg(title, y_label, groups)?;
    std::fs::write(path, svg).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn labels(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("G{i}")).collect()
    }

    #[test]
    fn table_shape_and_rounding() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        let st = vec![
            summarize(&[1.0, 2.0, 3.0, 4.0]).unwrap(),
            summarize(&[10.0 / 3.0]).unwrap(),
        ];
        emit_table_csv(&["Original-QS".into(), "Avg-SP0GAx".into()], &st, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "stat,Original-QS,Avg-SP0GAx");
        assert_eq!(lines[1], "Min,1.00,3.33");
        assert_eq!(lines[2], "1st Qu,1.75,3.33");
        assert_eq!(lines.len(), 7);
        let names: Vec<&str> = lines[1..].iter().map(|l| l.split(',').next().unwrap()).collect();
        assert_eq!(names, SummaryStats::ROW_NAMES);
        assert!(dir.path().join("t.full.csv").exists());
    }

    #[test]
    fn empty_table_is_an_error_and_writes_nothing() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        assert!(emit_table_csv(&[], &[], &path).is_err());
        assert!(!path.exists());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn full_precision_round_trip(cols in prop::collection::vec(prop::collection::vec(-1e4f64..1e4, 1..20), 1..6)) {
            let dir = tempfile::tempdir().unwrap();
            let path = dir.path().join("t.csv");
            let st: Vec<SummaryStats> = cols.iter().map(|c| summarize(c).unwrap()).collect();
            emit_table_csv(&labels(st.len()), &st, &path).unwrap();
            let (l, back) = read_table_csv(&full_precision_path(&path)).unwrap();
            prop_assert_eq!(l, labels(st.len()));
            prop_assert_eq!(back, st);
        }
    }

    #[test]
    fn median_line_sits_at_median() {
        let groups = vec![("A".to_string(), vec![1.0, 2.0, 3.0, 4.0])];
        let svg = render_boxplot_svg("t", "y", &groups).unwrap();
        let scale = PlotScale::covering(&[summarize(&groups[0].1).unwrap()]);
        let y = format!("{:.2}", scale.y(2.5));
        let median = svg.lines().find(|l| l.contains(r#"class="median""#)).unwrap();
        assert!(median.contains(&format!(r#"y1="{y}""#)) && median.contains(&format!(r#"y2="{y}""#)));
        assert_eq!(svg.matches(r#"class="box""#).count(), 1);
        assert_eq!(svg.matches(r#"class="mean""#).count(), 1);
    }

    #[test]
    fn svg_is_deterministic_and_escaped() {
        let groups = vec![
            ("Avg-SP0GAx".to_string(), vec![3.0, 1.0, 2.0]),
            ("a<b".to_string(), vec![5.0]),
        ];
        let a = render_boxplot_svg("PSNR & co", "dB", &groups).unwrap();
        let b = render_boxplot_svg("PSNR & co", "dB", &groups).unwrap();
        assert_eq!(a, b);
        assert!(a.contains("PSNR &amp; co") && a.contains("a&lt;b"));
        assert_eq!(a.matches(r#"class="box""#).count(), 2);
        assert!(render_boxplot_svg("t", "y", &[]).is_err());
    }
}
