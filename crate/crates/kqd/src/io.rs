//! Dataset ingestion and report persistence.
//!
//! Datasets are plain numeric CSV, one row per sample point. Reports are
//! written either as CSV with the fixed schema
//! `method,param_name,param_value,rejection_rate,trials,seed` (one row per
//! sweep point) or as JSON mirroring [`ExperimentReport`]. Dataset floats are
//! written in shortest round-trip form, so `load(save(x)) = x` bit-exactly.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::data::SampleSet;
use crate::error::{Error, Result};
use crate::testing::{ExperimentReport, SweepPoint};

/// A named point table, loaded from disk or produced by a generator.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub points: SampleSet,
    pub source: String,
}

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Loads a numeric CSV file. Rows must be rectangular and every cell must
/// parse as a finite number; row/column positions in error messages are
/// 1-based and refer to the file, header line included.
pub fn load_csv(path: impl AsRef<Path>, has_header: bool) -> Result<Dataset> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width: Option<usize> = None;
    for (line_idx, line) in text.lines().enumerate() {
        let row_no = line_idx + 1;
        if has_header && line_idx == 0 {
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let mut row = Vec::new();
        for (col_idx, cell) in line.split(',').enumerate() {
            let col_no = col_idx + 1;
            let value: f64 = cell.trim().parse().map_err(|_| Error::CsvParse {
                path: path.to_path_buf(),
                row: row_no,
                col: col_no,
                message: format!("'{}' is not a number", cell.trim()),
            })?;
            if !value.is_finite() {
                return Err(Error::CsvParse {
                    path: path.to_path_buf(),
                    row: row_no,
                    col: col_no,
                    message: format!("non-finite value {value}"),
                });
            }
            row.push(value);
        }
        if let Some(w) = width {
            if row.len() != w {
                return Err(Error::CsvParse {
                    path: path.to_path_buf(),
                    row: row_no,
                    col: row.len().min(w) + 1,
                    message: format!("expected {w} columns, found {}", row.len()),
                });
            }
        } else {
            width = Some(row.len());
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::EmptyInput("CSV file holds no data rows"));
    }
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".to_string());
    Ok(Dataset {
        name,
        points: SampleSet::from_rows(&rows)?,
        source: path.display().to_string(),
    })
}

/// Writes a sample set as numeric CSV (no header). Values use the shortest
/// representation that parses back to the same bits.
pub fn save_csv(points: &SampleSet, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::new();
    for row in points.rows_iter() {
        for (j, v) in row.iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            let _ = write!(out, "{v}");
        }
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| io_err(path, e))
}

pub const REPORT_CSV_HEADER: &str = "method,param_name,param_value,rejection_rate,trials,seed";

/// One CSV row of a report file.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub method: String,
    pub param_name: String,
    pub param_value: f64,
    pub rejection_rate: f64,
    pub trials: usize,
    pub seed: u64,
}

/// Renders reports to the fixed CSV schema; rejection rates carry six
/// decimal places.
pub fn reports_to_csv(reports: &[ExperimentReport]) -> String {
    let mut out = String::from(REPORT_CSV_HEADER);
    out.push('\n');
    for report in reports {
        for point in &report.points {
            let _ = writeln!(
                out,
                "{},{},{},{:.6},{},{}",
                report.method,
                report.param_name,
                point.param_value,
                point.rejection_rate,
                report.trials,
                report.seed
            );
        }
    }
    out
}

pub fn write_reports_csv(reports: &[ExperimentReport], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, reports_to_csv(reports)).map_err(|e| io_err(path, e))
}

/// Parses report rows back from the CSV schema.
pub fn read_report_rows_csv(path: impl AsRef<Path>) -> Result<Vec<ReportRow>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut rows = Vec::new();
    for (line_idx, line) in text.lines().enumerate() {
        if line_idx == 0 || line.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 6 {
            return Err(Error::CsvParse {
                path: path.to_path_buf(),
                row: line_idx + 1,
                col: parts.len().min(6) + 1,
                message: format!("expected 6 columns, found {}", parts.len()),
            });
        }
        let parse_f64 = |col: usize| -> Result<f64> {
            parts[col].trim().parse().map_err(|_| Error::CsvParse {
                path: path.to_path_buf(),
                row: line_idx + 1,
                col: col + 1,
                message: format!("'{}' is not a number", parts[col].trim()),
            })
        };
        rows.push(ReportRow {
            method: parts[0].trim().to_string(),
            param_name: parts[1].trim().to_string(),
            param_value: parse_f64(2)?,
            rejection_rate: parse_f64(3)?,
            trials: parse_f64(4)? as usize,
            seed: parse_f64(5)? as u64,
        });
    }
    Ok(rows)
}

pub fn reports_to_json(reports: &[ExperimentReport]) -> Result<String> {
    let mut s = serde_json::to_string_pretty(reports)?;
    s.push('\n');
    Ok(s)
}

pub fn write_reports_json(reports: &[ExperimentReport], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, reports_to_json(reports)?).map_err(|e| io_err(path, e))
}

pub fn read_reports_json(path: impl AsRef<Path>) -> Result<Vec<ExperimentReport>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    Ok(serde_json::from_str(&text)?)
}

/// Convenience constructor used by the CLI when assembling sweep reports.
pub fn report_from_points(
    method: &str,
    param_name: &str,
    points: Vec<SweepPoint>,
    trials: usize,
    seed: u64,
    config: String,
) -> ExperimentReport {
    ExperimentReport {
        method: method.to_string(),
        param_name: param_name.to_string(),
        points,
        trials,
        seed,
        config,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::tempdir;

    #[test]
    fn parses_plain_csv() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("a.csv");
        fs::write(&path, "1,2\n3,4\n").unwrap();
        let ds = load_csv(&path, false).unwrap();
        assert_eq!(ds.points.n(), 2);
        assert_eq!(ds.points.row(0), &[1.0, 2.0]);
        assert_eq!(ds.points.row(1), &[3.0, 4.0]);
        assert_eq!(ds.name, "a");
    }

    #[test]
    fn ragged_rows_name_the_row() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("r.csv");
        fs::write(&path, "1,2\n3\n").unwrap();
        match load_csv(&path, false).unwrap_err() {
            Error::CsvParse { row, .. } => assert_eq!(row, 2),
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn scientific_notation_and_header() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("s.csv");
        fs::write(&path, "col0,col1\n1e3,-0.5\n").unwrap();
        let ds = load_csv(&path, true).unwrap();
        assert_eq!(ds.points.row(0), &[1000.0, -0.5]);
    }

    #[test]
    fn non_numeric_cell_reports_position() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        fs::write(&path, "1,2\n3,x\n").unwrap();
        match load_csv(&path, false).unwrap_err() {
            Error::CsvParse { row, col, .. } => {
                assert_eq!((row, col), (2, 2));
            }
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn rejects_non_finite() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("nan.csv");
        fs::write(&path, "1,NaN\n").unwrap();
        assert!(load_csv(&path, false).is_err());
        fs::write(&path, "inf,1\n").unwrap();
        assert!(load_csv(&path, false).is_err());
    }

    #[test]
    fn missing_file_is_io_error() {
        let err = load_csv("/nonexistent/nope.csv", false).unwrap_err();
        assert!(err.is_not_found());
    }

    #[test]
    fn dataset_roundtrip_is_bit_exact() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("rt.csv");
        let points = SampleSet::from_rows(&[
            vec![0.1, 1.0 / 3.0, 1e-300],
            vec![-2.5e17, 7.0, 0.30000000000000004],
        ])
        .unwrap();
        save_csv(&points, &path).unwrap();
        let loaded = load_csv(&path, false).unwrap();
        assert_eq!(loaded.points, points);
    }

    #[test]
    fn report_csv_round_trip() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("rep.csv");
        let report = report_from_points(
            "ekqd",
            "n",
            vec![SweepPoint {
                param_value: 100.0,
                rejection_rate: 0.05,
            }],
            200,
            7,
            "test".into(),
        );
        write_reports_csv(std::slice::from_ref(&report), &path).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0], REPORT_CSV_HEADER);
        assert!(lines[1].contains("0.050000"));
        let rows = read_report_rows_csv(&path).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].method, "ekqd");
        assert_eq!(rows[0].param_value, 100.0);
        assert_eq!(rows[0].rejection_rate, 0.05);
        assert_eq!(rows[0].trials, 200);
        assert_eq!(rows[0].seed, 7);
    }

    #[test]
    fn report_json_round_trip_is_field_equal() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("rep.json");
        let reports = vec![report_from_points(
            "mmd-u",
            "d",
            vec![
                SweepPoint {
                    param_value: 32.0,
                    rejection_rate: 0.97,
                },
                SweepPoint {
                    param_value: 128.0,
                    rejection_rate: 0.5,
                },
            ],
            100,
            42,
            "benchmark --experiment power-decay".into(),
        )];
        write_reports_json(&reports, &path).unwrap();
        let loaded = read_reports_json(&path).unwrap();
        assert_eq!(loaded, reports);
    }
}
