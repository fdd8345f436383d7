//! Text format:
//!
//! ```text
//! N L strategy_tag
//! <N lines of L values in {-1, 0, 1}>
//! <L lines: col positive=<ids> negative=<ids>>
//! ```
//!
//! Class ids are comma-separated row indices.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::{CodeMatrix, ColumnMeta};
use crate::dataset::ClassId;
use crate::error::{EcocError, Result};
use crate::util::write_atomic;

fn join(ids: &[ClassId]) -> String {
    ids.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

impl CodeMatrix {
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {} {}\n", self.n_classes(), self.n_columns(), self.strategy());
        for row in self.rows() {
            let cells: Vec<String> = row.iter().map(ToString::to_string).collect();
            writeln!(out, "{}", cells.join(" ")).unwrap();
        }
        for col in self.columns() {
            writeln!(out, "col positive={} negative={}", join(&col.positive), join(&col.negative)).unwrap();
        }
        out
    }
}

pub fn write_matrix(matrix: &CodeMatrix, path: &Path) -> Result<()> {
    write_atomic(path, matrix.to_text().as_bytes())
}

pub fn read_matrix(path: &Path) -> Result<CodeMatrix> {
    let text = fs::read_to_string(path).map_err(|e| EcocError::io(path, e))?;
    parse_matrix(&text)
}

fn parse_ids(field: &str, key: &str, line: usize) -> Result<Vec<ClassId>> {
    let list = field
        .strip_prefix(key)
        .and_then(|f| f.strip_prefix('='))
        .ok_or_else(|| EcocError::parse(line, 1, format!("expected {key}=<ids>")))?;
    list.split(',')
        .map(|t| {
            t.parse()
                .map_err(|_| EcocError::parse(line, 1, format!("bad class id {t:?}")))
        })
        .collect()
}

/// Parses the text format and checks that cells and column metadata agree.
pub fn parse_matrix(text: &str) -> Result<CodeMatrix> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let (_, header) = lines.next().ok_or(EcocError::Empty)?;
    let head: Vec<&str> = header.split_whitespace().collect();
    if head.len() != 3 {
        return Err(EcocError::parse(1, 1, "header must be `N L strategy_tag`"));
    }
    let n: usize = head[0].parse().map_err(|_| EcocError::parse(1, 1, "bad class count"))?;
    let l: usize = head[1].parse().map_err(|_| EcocError::parse(1, 2, "bad column count"))?;

    let mut rows = Vec::with_capacity(n);
    for _ in 0..n {
        let (lineno, line) = lines.next().ok_or_else(|| EcocError::parse(0, 0, "truncated matrix rows"))?;
        let row = line
            .split_whitespace()
            .enumerate()
            .map(|(col, t)| match t {
                "1" => Ok(1i8),
                "0" => Ok(0),
                "-1" => Ok(-1),
                _ => Err(EcocError::parse(lineno, col + 1, format!("bad cell {t:?}"))),
            })
            .collect::<Result<Vec<i8>>>()?;
        if row.len() != l {
            return Err(EcocError::parse(lineno, 1, format!("expected {l} cells, got {}", row.len())));
        }
        rows.push(row);
    }
    let mut columns = Vec::with_capacity(l);
    for _ in 0..l {
        let (lineno, line) = lines.next().ok_or_else(|| EcocError::parse(0, 0, "truncated column metadata"))?;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 || fields[0] != "col" {
            return Err(EcocError::parse(lineno, 1, "expected `col positive=<ids> negative=<ids>`"));
        }
        columns.push(ColumnMeta::new(
            parse_ids(fields[1], "positive", lineno)?,
            parse_ids(fields[2], "negative", lineno)?,
        ));
    }
    if let Some((lineno, extra)) = lines.find(|(_, l)| !l.is_empty()) {
        return Err(EcocError::parse(lineno, 1, format!("unexpected trailing content {extra:?}")));
    }
    let matrix = CodeMatrix::from_columns(n, columns, head[2])?;
    if matrix.rows() != rows.as_slice() {
        return Err(EcocError::Format("matrix cells disagree with column metadata".into()));
    }
    Ok(matrix)
}
