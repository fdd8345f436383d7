//! Dense ({+1,-1}) and sparse ({+1,0,-1}) random codes.

use std::collections::HashSet;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{require_classes, CodeMatrix, ColumnMeta};
use crate::error::{EcocError, Result};
use crate::seed::rng_for;

const COLUMN_ATTEMPTS: usize = 20_000;
const MATRIX_ATTEMPTS: usize = 200;

/// `ceil(10 log2 N)`
pub fn dense_width(n_classes: usize) -> usize {
    (10.0 * (n_classes as f64).log2()).ceil() as usize
}

/// `ceil(15 log2 N)`
pub fn sparse_width(n_classes: usize) -> usize {
    (15.0 * (n_classes as f64).log2()).ceil() as usize
}

/// Number of distinct admissible columns up to negation, saturating at
/// `u128::MAX`: `2^(N-1) - 1` for dense codes and
/// `(3^N - 2^(N+1) + 1) / 2` for sparse ones.
pub fn admissible_column_count(n_classes: usize, sparse: bool) -> u128 {
    let n = n_classes as u32;
    if sparse {
        match (3u128.checked_pow(n), 2u128.checked_pow(n + 1)) {
            (Some(t), Some(b)) => (t - b).div_ceil(2),
            _ => u128::MAX,
        }
    } else {
        2u128.checked_pow(n.saturating_sub(1)).map_or(u128::MAX, |p| p - 1)
    }
}

fn sample_dense(rng: &mut ChaCha8Rng, n: usize) -> Vec<i8> {
    (0..n).map(|_| if rng.gen_bool(0.5) { 1 } else { -1 }).collect()
}

/// 0 with probability 1/2, +1 and -1 with probability 1/4 each.
fn sample_sparse(rng: &mut ChaCha8Rng, n: usize) -> Vec<i8> {
    (0..n)
        .map(|_| match rng.gen_range(0..4) {
            0 | 1 => 0,
            2 => 1,
            _ => -1,
        })
        .collect()
}

fn canonical(col: &[i8]) -> Vec<i8> {
    let flip = col.iter().find(|&&v| v != 0).copied().unwrap_or(1);
    col.iter().map(|v| v * flip).collect()
}

fn random_code(n_classes: usize, seed: u64, sparse: bool) -> Result<CodeMatrix> {
    require_classes(n_classes, 3)?;
    let (width, tag, stream) = if sparse {
        (sparse_width(n_classes), "sparse", 2u64)
    } else {
        (dense_width(n_classes), "dense", 1u64)
    };
    // Too few admissible columns to fill the width without repeats (only
    // happens for N < 6): repeats are then tolerated.
    let unique = admissible_column_count(n_classes, sparse) >= width as u128;
    let sample = if sparse { sample_sparse } else { sample_dense };

    for attempt in 0..MATRIX_ATTEMPTS {
        let mut rng = rng_for(seed, &[stream, attempt as u64]);
        let mut seen = HashSet::new();
        let mut columns: Vec<Vec<i8>> = Vec::with_capacity(width);
        'column: while columns.len() < width {
            for _ in 0..COLUMN_ATTEMPTS {
                let col = sample(&mut rng, n_classes);
                if !col.contains(&1) || !col.contains(&-1) {
                    continue;
                }
                if unique && !seen.insert(canonical(&col)) {
                    continue;
                }
                columns.push(col);
                continue 'column;
            }
            return Err(EcocError::Numerical(format!(
                "{tag} code: no admissible column found for {n_classes} classes"
            )));
        }
        let rows: HashSet<Vec<i8>> = (0..n_classes)
            .map(|i| columns.iter().map(|c| c[i]).collect())
            .collect();
        if rows.len() < n_classes {
            continue;
        }
        let metas = columns
            .iter()
            .map(|col| {
                let pick = |v: i8| (0..n_classes).filter(|&i| col[i] == v).collect();
                ColumnMeta::new(pick(1), pick(-1))
            })
            .collect();
        return CodeMatrix::from_columns(n_classes, metas, tag);
    }
    Err(EcocError::Numerical(format!(
        "{tag} code: resampling budget exhausted for {n_classes} classes"
    )))
}

/// `ceil(10 log2 N)` uniformly random +-1 columns, rejecting constant,
/// duplicated and negated columns and matrices with repeated codewords.
pub fn dense_random(n_classes: usize, seed: u64) -> Result<CodeMatrix> {
    random_code(n_classes, seed, false)
}

/// `ceil(15 log2 N)` random ternary columns (P(0) = 1/2), each with at least
/// one +1 and one -1; same rejection rules as [`dense_random`].
pub fn sparse_random(n_classes: usize, seed: u64) -> Result<CodeMatrix> {
    random_code(n_classes, seed, true)
}
