//! Dense delimiter-separated and sparse `label index:value` text formats.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::Dataset;
use crate::error::{EcocError, Result};
use crate::util::write_atomic;

/// Which column of a dense file holds the class label.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelColumn {
    Index(usize),
    Last,
}

fn dataset_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

fn split_cells(line: &str, delimiter: char) -> Vec<&str> {
    if delimiter.is_whitespace() {
        line.split_whitespace().collect()
    } else {
        line.split(delimiter).map(str::trim).collect()
    }
}

pub fn load_dense(path: &Path, label_column: LabelColumn, delimiter: char) -> Result<Dataset> {
    let text = fs::read_to_string(path).map_err(|e| EcocError::io(path, e))?;
    parse_dense(&text, label_column, delimiter, dataset_name(path))
}

/// Parses dense rows. Blank lines and lines starting with `#` are skipped;
/// error positions are 1-based line and column numbers.
pub fn parse_dense(text: &str, label_column: LabelColumn, delimiter: char, name: impl Into<String>) -> Result<Dataset> {
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    let mut width: Option<usize> = None;
    for (lineno, line) in text.lines().enumerate().map(|(i, l)| (i + 1, l)) {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let cells = split_cells(trimmed, delimiter);
        match width {
            None => width = Some(cells.len()),
            Some(w) if w != cells.len() => {
                return Err(EcocError::parse(
                    lineno,
                    cells.len().min(w) + 1,
                    format!("row {lineno} has {} cells, expected {w}", cells.len()),
                ))
            }
            _ => {}
        }
        let label_at = match label_column {
            LabelColumn::Last => cells.len() - 1,
            LabelColumn::Index(i) if i < cells.len() => i,
            LabelColumn::Index(i) => {
                return Err(EcocError::parse(lineno, i + 1, format!("row {lineno} has no label column {i}")))
            }
        };
        let label = cells[label_at];
        if label.is_empty() {
            return Err(EcocError::parse(lineno, label_at + 1, format!("row {lineno} has an empty label")));
        }
        let mut features = Vec::with_capacity(cells.len() - 1);
        for (col, cell) in cells.iter().enumerate() {
            if col == label_at {
                continue;
            }
            let v: f64 = cell.parse().map_err(|_| {
                EcocError::parse(lineno, col + 1, format!("row {lineno}, column {}: non-numeric cell {cell:?}", col + 1))
            })?;
            features.push(v);
        }
        rows.push(features);
        labels.push(label.to_string());
    }
    if rows.is_empty() {
        return Err(EcocError::Empty);
    }
    Dataset::from_rows(name, rows, labels)
}

pub fn load_sparse(path: &Path) -> Result<Dataset> {
    let text = fs::read_to_string(path).map_err(|e| EcocError::io(path, e))?;
    parse_sparse(&text, dataset_name(path))
}

/// Parses `label index:value ...` lines with 1-based, strictly increasing
/// indices. `#` starts a comment. Absent indices read as 0.0.
pub fn parse_sparse(text: &str, name: impl Into<String>) -> Result<Dataset> {
    let mut entries: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut labels = Vec::new();
    let mut n_features = 0;
    for (lineno, line) in text.lines().enumerate().map(|(i, l)| (i + 1, l)) {
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut tokens = content.split_whitespace();
        let label = tokens.next().expect("non-empty line has a token");
        let mut row = Vec::new();
        let mut last = 0usize;
        for (pos, tok) in tokens.enumerate().map(|(i, t)| (i + 2, t)) {
            let (idx, val) = tok
                .split_once(':')
                .ok_or_else(|| EcocError::parse(lineno, pos, format!("expected index:value, got {tok:?}")))?;
            let idx: usize = idx
                .parse()
                .map_err(|_| EcocError::parse(lineno, pos, format!("bad feature index {idx:?}")))?;
            let val: f64 = val
                .parse()
                .map_err(|_| EcocError::parse(lineno, pos, format!("bad feature value {val:?}")))?;
            if idx == 0 {
                return Err(EcocError::parse(lineno, pos, "feature indices are 1-based"));
            }
            if idx <= last {
                return Err(EcocError::parse(lineno, pos, "indices not increasing"));
            }
            last = idx;
            row.push((idx, val));
        }
        n_features = n_features.max(last);
        entries.push(row);
        labels.push(label.to_string());
    }
    if entries.is_empty() {
        return Err(EcocError::Empty);
    }
    let rows = entries
        .into_iter()
        .map(|row| {
            let mut dense = vec![0.0; n_features];
            for (idx, val) in row {
                dense[idx - 1] = val;
            }
            dense
        })
        .collect();
    Dataset::from_rows(name, rows, labels)
}

/// Writes features then label, one instance per line. Values use the
/// shortest representation that parses back to the same float.
pub fn write_dense(data: &Dataset, path: &Path, delimiter: char) -> Result<()> {
    let mut out = String::new();
    let sep = delimiter.to_string();
    for inst in data.instances() {
        for v in &inst.features {
            write!(out, "{v}{sep}").unwrap();
        }
        writeln!(out, "{}", data.classes()[inst.label]).unwrap();
    }
    write_atomic(path, out.as_bytes())
}

/// Writes non-zero features in sparse form.
pub fn write_sparse(data: &Dataset, path: &Path) -> Result<()> {
    let mut out = String::new();
    for inst in data.instances() {
        out.push_str(&data.classes()[inst.label]);
        for (i, v) in inst.features.iter().enumerate() {
            if *v != 0.0 {
                write!(out, " {}:{v}", i + 1).unwrap();
            }
        }
        out.push('\n');
    }
    write_atomic(path, out.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dense_three_rows() {
        let d = parse_dense("1,2,a\n3,4,b\n5,6,a\n", LabelColumn::Last, ',', "t").unwrap();
        assert_eq!(d.n_features(), 2);
        assert_eq!(d.classes(), ["a", "b"]);
        assert_eq!(d.labels(), vec![0, 1, 0]);
        assert_eq!(d.instances()[2].features, vec![5.0, 6.0]);
    }

    #[test]
    fn dense_label_in_first_column() {
        let d = parse_dense("x 1 2\ny 3 4\n", LabelColumn::Index(0), ' ', "t").unwrap();
        assert_eq!(d.instances()[1].features, vec![3.0, 4.0]);
        assert_eq!(d.classes(), ["x", "y"]);
    }

    #[test]
    fn dense_empty_file() {
        let err = parse_dense("", LabelColumn::Last, ',', "t").unwrap_err();
        assert_eq!(err.to_string(), "no instances");
    }

    #[test]
    fn dense_missing_cell_names_row() {
        let err = parse_dense("1,2,a\n3,b\n", LabelColumn::Last, ',', "t").unwrap_err();
        match err {
            EcocError::Parse { line, ref message, .. } => {
                assert_eq!(line, 2);
                assert!(message.contains("row 2"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
        let err = parse_dense("1,2,a\n3,,b\n", LabelColumn::Last, ',', "t").unwrap_err();
        assert!(matches!(err, EcocError::Parse { line: 2, column: 2, .. }), "{err:?}");
    }

    #[test]
    fn dense_non_numeric_reports_position() {
        let err = parse_dense("1,2,a\n3,zz,b\n", LabelColumn::Last, ',', "t").unwrap_err();
        assert!(matches!(err, EcocError::Parse { line: 2, column: 2, .. }), "{err:?}");
    }

    #[test]
    fn sparse_line_fills_zeros() {
        let d = parse_sparse("2 1:0.5 3:-1\n", "t").unwrap();
        assert_eq!(d.n_features(), 3);
        assert_eq!(d.instances()[0].features, vec![0.5, 0.0, -1.0]);
        assert_eq!(d.classes(), ["2"]);
    }

    #[test]
    fn sparse_label_only_line() {
        let d = parse_sparse("1\n2 2:3\n", "t").unwrap();
        assert_eq!(d.instances()[0].features, vec![0.0, 0.0]);
    }

    #[test]
    fn sparse_rejects_non_increasing_indices() {
        let err = parse_sparse("1 3:1 2:1\n", "t").unwrap_err();
        assert!(err.to_string().contains("indices not increasing"), "{err}");
    }

    #[test]
    fn sparse_rejects_garbage() {
        assert!(parse_sparse("1 2:x\n", "t").is_err());
        assert!(parse_sparse("1 abc\n", "t").is_err());
        assert!(parse_sparse("1 0:1\n", "t").is_err());
    }

    #[test]
    fn sparse_comments_and_blank_lines() {
        let d = parse_sparse("# header\n\n1 1:2 # trailing\n", "t").unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d.instances()[0].features, vec![2.0]);
    }
}
