//! Code matrices: the matching-based hierarchy plus the classic baselines.

mod format;
mod hierarchy;
mod random;

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dataset::ClassId;
use crate::error::{EcocError, Result};

pub use format::{parse_matrix, read_matrix, write_matrix};
pub use hierarchy::{build_matching_code, first_subset_orientation, MatchingCode, RoundTrace, WeightOrientation};
pub use random::{admissible_column_count, dense_random, dense_width, sparse_random, sparse_width};

/// The two class sets a column separates. Both sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ColumnMeta {
    pub positive: Vec<ClassId>,
    pub negative: Vec<ClassId>,
}

impl ColumnMeta {
    pub fn new(mut positive: Vec<ClassId>, mut negative: Vec<ClassId>) -> Self {
        positive.sort_unstable();
        negative.sort_unstable();
        ColumnMeta { positive, negative }
    }

    pub fn label_of(&self, class: ClassId) -> i8 {
        if self.positive.binary_search(&class).is_ok() {
            1
        } else if self.negative.binary_search(&class).is_ok() {
            -1
        } else {
            0
        }
    }
}

/// N x L ternary matrix. Row `i` is the codeword of class `i`; column `j`
/// defines the binary problem `positive` (+1) against `negative` (-1), with
/// the remaining classes (0) left out.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeMatrix {
    n_classes: usize,
    cells: Vec<Vec<i8>>,
    columns: Vec<ColumnMeta>,
    strategy: String,
}

impl CodeMatrix {
    /// Builds the matrix from column definitions. Each column's sides must be
    /// non-empty, disjoint and within `0..n_classes`.
    pub fn from_columns(n_classes: usize, columns: Vec<ColumnMeta>, strategy: impl Into<String>) -> Result<Self> {
        let strategy = strategy.into();
        if strategy.is_empty() || strategy.contains(char::is_whitespace) {
            return Err(EcocError::invalid(format!("bad strategy tag {strategy:?}")));
        }
        let mut cells = vec![vec![0i8; columns.len()]; n_classes];
        for (j, col) in columns.iter().enumerate() {
            if col.positive.is_empty() || col.negative.is_empty() {
                return Err(EcocError::Column {
                    column: j,
                    message: "both sides must be non-empty".into(),
                });
            }
            for (side, value) in [(&col.positive, 1i8), (&col.negative, -1i8)] {
                for &c in side {
                    if c >= n_classes {
                        return Err(EcocError::Column {
                            column: j,
                            message: format!("class {c} out of range for {n_classes} classes"),
                        });
                    }
                    if cells[c][j] != 0 {
                        return Err(EcocError::Column {
                            column: j,
                            message: format!("class {c} listed twice"),
                        });
                    }
                    cells[c][j] = value;
                }
            }
        }
        Ok(CodeMatrix {
            n_classes,
            cells,
            columns,
            strategy,
        })
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn n_columns(&self) -> usize {
        self.columns.len()
    }

    pub fn cell(&self, class: ClassId, column: usize) -> i8 {
        self.cells[class][column]
    }

    pub fn codeword(&self, class: ClassId) -> &[i8] {
        &self.cells[class]
    }

    pub fn rows(&self) -> &[Vec<i8>] {
        &self.cells
    }

    pub fn column(&self, j: usize) -> &ColumnMeta {
        &self.columns[j]
    }

    pub fn columns(&self) -> &[ColumnMeta] {
        &self.columns
    }

    pub fn strategy(&self) -> &str {
        &self.strategy
    }

    /// Copy without column `j`.
    pub fn without_column(&self, j: usize) -> Result<CodeMatrix> {
        let mut columns = self.columns.clone();
        columns.remove(j);
        CodeMatrix::from_columns(self.n_classes, columns, self.strategy.clone())
    }

    fn column_vector(&self, j: usize) -> Vec<i8> {
        self.cells.iter().map(|row| row[j]).collect()
    }

    pub fn has_distinct_rows(&self) -> bool {
        let set: HashSet<&Vec<i8>> = self.cells.iter().collect();
        set.len() == self.n_classes
    }

    /// True when some column equals or negates another.
    pub fn has_repeated_columns(&self) -> bool {
        let mut seen = HashSet::new();
        for j in 0..self.n_columns() {
            let col = self.column_vector(j);
            // canonical sign: first non-zero entry positive
            let flip = col.iter().find(|&&v| v != 0).copied().unwrap_or(1);
            let canon: Vec<i8> = col.iter().map(|v| v * flip).collect();
            if !seen.insert(canon) {
                return true;
            }
        }
        false
    }

    /// Distinct codewords and no duplicated or negated columns.
    pub fn check_invariants(&self) -> Result<()> {
        if !self.has_distinct_rows() {
            return Err(EcocError::invalid("two classes share a codeword"));
        }
        if self.has_repeated_columns() {
            return Err(EcocError::invalid("a column duplicates or negates another"));
        }
        Ok(())
    }

    /// `+ - .` grid, one line per class, optionally prefixed by labels.
    pub fn render(&self, labels: Option<&[String]>) -> String {
        let width = labels.map_or(0, |l| l.iter().map(String::len).max().unwrap_or(0));
        let mut out = String::new();
        for (i, row) in self.cells.iter().enumerate() {
            if let Some(labels) = labels {
                out.push_str(&format!("{:>width$} ", labels[i]));
            }
            out.extend(row.iter().map(|&v| match v {
                1 => '+',
                -1 => '-',
                _ => '.',
            }));
            out.push('\n');
        }
        out
    }
}

pub fn one_vs_one(n_classes: usize) -> Result<CodeMatrix> {
    require_classes(n_classes, 2)?;
    let mut columns = Vec::with_capacity(n_classes * (n_classes - 1) / 2);
    for i in 0..n_classes {
        for j in i + 1..n_classes {
            columns.push(ColumnMeta::new(vec![i], vec![j]));
        }
    }
    CodeMatrix::from_columns(n_classes, columns, "ovo")
}

/// Column `i` is class `i` against all others. For two classes the columns
/// negate each other; that matrix is returned as is.
pub fn one_vs_all(n_classes: usize) -> Result<CodeMatrix> {
    require_classes(n_classes, 2)?;
    let columns = (0..n_classes)
        .map(|i| ColumnMeta::new(vec![i], (0..n_classes).filter(|&c| c != i).collect()))
        .collect();
    CodeMatrix::from_columns(n_classes, columns, "ova")
}

pub(crate) fn require_classes(n_classes: usize, min: usize) -> Result<()> {
    if n_classes < min {
        return Err(EcocError::invalid(format!("need at least {min} classes, got {n_classes}")));
    }
    Ok(())
}

/// Code construction strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Ovo,
    Ova,
    Dense,
    Sparse,
    Matching,
}

impl Strategy {
    pub const ALL: [Strategy; 5] = [
        Strategy::Ovo,
        Strategy::Ova,
        Strategy::Dense,
        Strategy::Sparse,
        Strategy::Matching,
    ];

    pub fn is_random(self) -> bool {
        matches!(self, Strategy::Dense | Strategy::Sparse)
    }

    /// Closed-form column count for `n_classes`.
    pub fn column_count(self, n_classes: usize) -> usize {
        match self {
            Strategy::Ovo => n_classes * (n_classes - 1) / 2,
            Strategy::Ova => n_classes,
            Strategy::Dense => dense_width(n_classes),
            Strategy::Sparse => sparse_width(n_classes),
            Strategy::Matching => n_classes - 1,
        }
    }

    /// Builds a data-independent matrix. `Matching` needs data and is
    /// rejected here.
    pub fn build_fixed(self, n_classes: usize, seed: u64) -> Result<CodeMatrix> {
        match self {
            Strategy::Ovo => one_vs_one(n_classes),
            Strategy::Ova => one_vs_all(n_classes),
            Strategy::Dense => dense_random(n_classes, seed),
            Strategy::Sparse => sparse_random(n_classes, seed),
            Strategy::Matching => Err(EcocError::invalid("the matching strategy needs training data")),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Ovo => "ovo",
            Strategy::Ova => "ova",
            Strategy::Dense => "dense",
            Strategy::Sparse => "sparse",
            Strategy::Matching => "matching",
        })
    }
}

impl FromStr for Strategy {
    type Err = EcocError;

    fn from_str(s: &str) -> Result<Self> {
        Strategy::ALL
            .into_iter()
            .find(|st| st.to_string() == s)
            .ok_or_else(|| EcocError::invalid(format!("unknown strategy {s:?} (ovo|ova|dense|sparse|matching)")))
    }
}
