use std::fmt::Write as _;
use std::path::Path;

use super::experiment::{ExperimentReport, Method};
use crate::error::{Error, Result};

pub const PLOT_HEADER: &str = "baseline\tmethod\tmean_loss\tstderr\tmean_runtime_ms";

/// One parsed line of plot data.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotRow {
    pub baseline: usize,
    pub method: Method,
    pub mean_loss: f64,
    pub stderr: f64,
    pub mean_runtime_ms: Option<f64>,
}

pub fn plot_data_text(report: &ExperimentReport) -> Result<String> {
    if report.rows.is_empty() {
        return Err(Error::InvalidArgument("report has no rows".into()));
    }
    let mut s = String::from(PLOT_HEADER);
    s.push('\n');
    for r in &report.rows {
        let runtime = r.mean_runtime_ms.map_or_else(|| "NA".to_string(), |v| v.to_string());
        writeln!(s, "{}\t{}\t{}\t{}\t{}", r.baseline, r.method, r.mean_loss, r.stderr, runtime).unwrap();
    }
    Ok(s)
}

/// Writes `baseline, method, mean_loss, stderr, mean_runtime_ms` as
/// tab-separated values with a header row; missing runtimes are `NA`.
pub fn emit_plot_data(report: &ExperimentReport, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, plot_data_text(report)?).map_err(|e| Error::io(path, e))
}

pub fn parse_plot_data(text: &str) -> Result<Vec<PlotRow>> {
    let err = |line: usize, message: String| Error::Parse { path: "<plot data>".into(), line, message };
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h == PLOT_HEADER => {}
        _ => return Err(err(1, "missing header".into())),
    }
    let num = |line: usize, s: &str| s.parse::<f64>().map_err(|e| err(line, format!("bad number {s:?}: {e}")));
    lines
        .filter(|(_, l)| !l.is_empty())
        .map(|(k, l)| {
            let line = k + 1;
            let f: Vec<&str> = l.split('\t').collect();
            let [b, m, loss, se, rt] = f[..] else {
                return Err(err(line, format!("expected 5 columns, got {}", f.len())));
            };
            Ok(PlotRow {
                baseline: b.parse().map_err(|e| err(line, format!("bad baseline {b:?}: {e}")))?,
                method: m.parse().map_err(|e: Error| err(line, e.to_string()))?,
                mean_loss: num(line, loss)?,
                stderr: num(line, se)?,
                mean_runtime_ms: if rt == "NA" { None } else { Some(num(line, rt)?) },
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::experiment::{Assignment, ReportRow, Weighting};
    use crate::loss::LossKind;

    fn report(rows: Vec<ReportRow>) -> ExperimentReport {
        ExperimentReport { loss: LossKind::Hamming, rows, models: Vec::new() }
    }

    fn row(baseline: usize, runtime: Option<f64>) -> ReportRow {
        ReportRow {
            baseline,
            method: Method::new(Assignment::Quadratic, Weighting::Bistochastic),
            mean_loss: 0.1 + 1.0 / 3.0,
            stderr: 0.012345678901234,
            count: 7,
            mean_runtime_ms: runtime,
            lambda: None,
            converged: None,
        }
    }

    #[test]
    fn single_row_is_two_lines() {
        let text = plot_data_text(&report(vec![row(10, Some(1.5))])).unwrap();
        assert_eq!(text.lines().count(), 2);
        assert_eq!(text.lines().next().unwrap(), PLOT_HEADER);
    }

    #[test]
    fn parse_back_is_exact() {
        let r = report(vec![row(0, Some(0.1 + 0.2)), row(90, None)]);
        let parsed = parse_plot_data(&plot_data_text(&r).unwrap()).unwrap();
        assert_eq!(parsed.len(), 2);
        for (p, q) in parsed.iter().zip(&r.rows) {
            assert_eq!(p.baseline, q.baseline);
            assert_eq!(p.method, q.method);
            assert_eq!(p.mean_loss, q.mean_loss);
            assert_eq!(p.stderr, q.stderr);
            assert_eq!(p.mean_runtime_ms, q.mean_runtime_ms);
        }
    }

    #[test]
    fn empty_report_and_bad_path() {
        assert!(plot_data_text(&report(Vec::new())).is_err());
        let r = report(vec![row(0, None)]);
        assert!(emit_plot_data(&r, "/nonexistent-dir/x/y.tsv").is_err());
    }
}
