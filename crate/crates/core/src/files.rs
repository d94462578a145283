//! On-disk formats: input series files, ground-truth corpus CSVs and the
//! JSON-lines corpus manifest.
//!
//! A corpus CSV has the header `t,composite,trend,<seasonal columns>,remainder`
//! with one seasonal column per period in ascending period order. The
//! manifest lists one [`CorpusEntry`] per line; file paths are relative to
//! the manifest's directory.

use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simulate::SimulationConfig;

/// Writes `bytes` to a temporary sibling file and renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path
        .file_name()
        .ok_or_else(|| Error::Parse(format!("not a file path: {}", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Shortest round-trippable decimal form.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else {
        format!("{v}")
    }
}

/// A univariate series read from a delimited text file.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesFile {
    /// Timestamp or index labels, when the file has a time column.
    pub labels: Option<Vec<String>>,
    /// Observations; NaN marks an empty cell.
    pub values: Vec<f64>,
    pub value_column: String,
}

fn detect_delimiter(header: &str) -> u8 {
    // Ties resolve to the earliest candidate, so a bare column reads as comma-separated.
    b",;\t"
        .iter()
        .rev()
        .copied()
        .max_by_key(|d| header.bytes().filter(|b| b == d).count())
        .unwrap_or(b',')
}

/// Reads a series file. With `column = None` the file must have a single
/// value column, optionally preceded by a time column named like `t`,
/// `time`, `timestamp`, `date`, `datetime` or `index`.
pub fn read_series_file(path: &Path, column: Option<&str>) -> Result<SeriesFile> {
    let text = fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    let header = text
        .lines()
        .find(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .ok_or_else(|| Error::Parse(format!("{}: empty file", path.display())))?;
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(detect_delimiter(header))
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers: Vec<String> = reader.headers()?.iter().map(str::to_owned).collect();

    let is_time = |h: &str| {
        matches!(
            h.to_ascii_lowercase().as_str(),
            "t" | "time" | "timestamp" | "date" | "datetime" | "index" | "ds"
        )
    };
    let time_idx = headers.iter().position(|h| is_time(h));
    let value_idx = match column {
        Some(name) => headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::invalid("column", format!("no column named `{name}`")))?,
        None => {
            let candidates: Vec<usize> = (0..headers.len()).filter(|&i| Some(i) != time_idx).collect();
            match candidates.as_slice() {
                [one] => *one,
                [] => return Err(Error::Parse(format!("{}: no value column", path.display()))),
                _ => {
                    return Err(Error::invalid(
                        "column",
                        format!("file has several value columns ({}); pick one", candidates.len()),
                    ))
                }
            }
        }
    };

    let mut labels = time_idx.map(|_| Vec::new());
    let mut values = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        let cell = record.get(value_idx).unwrap_or("");
        let v = if cell.is_empty() || cell.eq_ignore_ascii_case("na") || cell.eq_ignore_ascii_case("nan") {
            f64::NAN
        } else {
            cell.parse::<f64>().map_err(|_| {
                Error::Parse(format!("{}: row {}: cannot parse `{cell}`", path.display(), row + 2))
            })?
        };
        values.push(v);
        if let (Some(l), Some(i)) = (labels.as_mut(), time_idx) {
            l.push(record.get(i).unwrap_or("").to_owned());
        }
    }
    if values.len() < 3 {
        return Err(Error::Parse(format!(
            "{}: need at least 3 data rows, found {}",
            path.display(),
            values.len()
        )));
    }
    Ok(SeriesFile {
        labels,
        values,
        value_column: headers[value_idx].clone(),
    })
}

/// Component columns of one corpus series.
#[derive(Debug, Clone, PartialEq)]
pub struct TruthTable {
    pub composite: Vec<f64>,
    pub trend: Vec<f64>,
    pub seasonals: Vec<Vec<f64>>,
    pub remainder: Vec<f64>,
}

/// Seasonal column names: `seasonal_short`/`seasonal_long` for two periods,
/// `seasonal_<p>` otherwise.
pub fn seasonal_column_names(periods: &[usize]) -> Vec<String> {
    if periods.len() == 2 {
        vec!["seasonal_short".into(), "seasonal_long".into()]
    } else {
        periods.iter().map(|p| format!("seasonal_{p}")).collect()
    }
}

pub fn render_truth_csv(table: &TruthTable, seasonal_names: &[String]) -> String {
    let mut out = String::from("t,composite,trend");
    for name in seasonal_names {
        out.push(',');
        out.push_str(name);
    }
    out.push_str(",remainder\n");
    for t in 0..table.composite.len() {
        out.push_str(&format!(
            "{},{},{}",
            t + 1,
            fmt_f64(table.composite[t]),
            fmt_f64(table.trend[t])
        ));
        for s in &table.seasonals {
            out.push(',');
            out.push_str(&fmt_f64(s[t]));
        }
        out.push(',');
        out.push_str(&fmt_f64(table.remainder[t]));
        out.push('\n');
    }
    out
}

pub fn read_truth_csv(path: &Path, num_seasonals: usize) -> Result<TruthTable> {
    let mut reader = csv::Reader::from_path(path)?;
    let width = reader.headers()?.len();
    if width != 4 + num_seasonals {
        return Err(Error::Parse(format!(
            "{}: expected {} columns, found {width}",
            path.display(),
            4 + num_seasonals
        )));
    }
    let mut table = TruthTable {
        composite: Vec::new(),
        trend: Vec::new(),
        seasonals: vec![Vec::new(); num_seasonals],
        remainder: Vec::new(),
    };
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        let parse = |i: usize| -> Result<f64> {
            let cell = record.get(i).unwrap_or("");
            cell.trim().parse::<f64>().map_err(|_| {
                Error::Parse(format!("{}: row {}: cannot parse `{cell}`", path.display(), row + 2))
            })
        };
        table.composite.push(parse(1)?);
        table.trend.push(parse(2)?);
        for (k, s) in table.seasonals.iter_mut().enumerate() {
            s.push(parse(3 + k)?);
        }
        table.remainder.push(parse(3 + num_seasonals)?);
    }
    Ok(table)
}

/// One line of a corpus manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusEntry {
    pub id: String,
    pub file: String,
    pub periods: Vec<usize>,
    /// Weights applied to the stored components to obtain the recoverable truth.
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulation: Option<SimulationConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub block_length: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub replicate: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl CorpusEntry {
    /// Per-seasonal-column weights in ascending period order.
    pub fn seasonal_weights(&self) -> Vec<f64> {
        match self.periods.len() {
            2 => vec![self.alpha, self.beta],
            k => vec![1.0; k],
        }
    }
}

pub fn render_manifest(entries: &[CorpusEntry]) -> Result<String> {
    let mut out = String::new();
    for e in entries {
        out.push_str(&serde_json::to_string(e)?);
        out.push('\n');
    }
    Ok(out)
}

/// Reads a manifest. Each line parses independently so one malformed line
/// does not hide the rest.
pub fn read_manifest(path: &Path) -> Result<Vec<Result<CorpusEntry>>> {
    let file = fs::File::open(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    let mut entries = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        entries.push(
            serde_json::from_str::<CorpusEntry>(&line)
                .map_err(|e| Error::Parse(format!("manifest line {}: {e}", i + 1))),
        );
    }
    Ok(entries)
}

/// Directory that manifest-relative paths resolve against.
pub fn manifest_dir(manifest: &Path) -> PathBuf {
    manifest
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_file_with_missing_and_time() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.csv");
        fs::write(&p, "timestamp,demand\n2012-01-01T00:00,1.5\n2012-01-01T01:00,\n2012-01-01T02:00,3\n").unwrap();
        let s = read_series_file(&p, None).unwrap();
        assert_eq!(s.values.len(), 3);
        assert!(s.values[1].is_nan());
        assert_eq!(s.labels.unwrap()[2], "2012-01-01T02:00");
        assert_eq!(s.value_column, "demand");
    }

    #[test]
    fn series_file_errors() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.csv");
        fs::write(&p, "a,b\n1,2\n3,4\n5,6\n").unwrap();
        assert!(matches!(read_series_file(&p, None), Err(Error::InvalidParameter { .. })));
        assert_eq!(read_series_file(&p, Some("b")).unwrap().values, vec![2.0, 4.0, 6.0]);
        fs::write(&p, "v\n1\nx\n3\n").unwrap();
        assert!(matches!(read_series_file(&p, None), Err(Error::Parse(_))));
        fs::write(&p, "v\n1\n2\n").unwrap();
        assert!(read_series_file(&p, None).is_err());
    }

    #[test]
    fn truth_csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.csv");
        let table = TruthTable {
            composite: vec![0.1, 0.2, 1.0 / 3.0],
            trend: vec![1.0, 2.0, 3.0],
            seasonals: vec![vec![0.5, -0.5, 0.25], vec![1e-17, 2.0, -3.5]],
            remainder: vec![0.0, 1.0, -1.0],
        };
        let names = seasonal_column_names(&[24, 168]);
        write_atomic(&p, render_truth_csv(&table, &names).as_bytes()).unwrap();
        assert_eq!(read_truth_csv(&p, 2).unwrap(), table);
        assert!(read_truth_csv(&p, 1).is_err());
    }

    #[test]
    fn manifest_tolerates_bad_lines() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("manifest.jsonl");
        let e = CorpusEntry {
            id: "a".into(),
            file: "a.csv".into(),
            periods: vec![7, 365],
            alpha: 1.0,
            beta: 1.0,
            gamma: 0.2,
            simulation: None,
            block_length: None,
            source: None,
            replicate: None,
            seed: Some(3),
        };
        let text = render_manifest(std::slice::from_ref(&e)).unwrap() + "{not json}\n\n";
        fs::write(&p, text).unwrap();
        let entries = read_manifest(&p).unwrap();
        assert_eq!(entries.len(), 2);
        assert_eq!(entries[0].as_ref().unwrap(), &e);
        assert!(entries[1].is_err());
        assert_eq!(manifest_dir(Path::new("manifest.jsonl")), PathBuf::from("."));
    }
}
