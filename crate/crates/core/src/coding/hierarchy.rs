//! Hierarchical code construction by repeated minimum-weight matching.
//!
//! Starting from singleton subsets, each round scores every pair of current
//! subsets, matches them with an exact minimum-weight perfect matching
//! (leaving out one "bye" subset when the count is odd), emits one column
//! per matched pair and merges the pairs. When two subsets remain they form
//! the last column. The result always has N - 1 columns.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Mutex;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{require_classes, CodeMatrix, ColumnMeta};
use crate::dataset::ClassId;
use crate::error::{EcocError, Result};
use crate::matching::{solve_with_bye, MatchingProblem};

/// How a pair's generalization performance becomes a matching weight.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightOrientation {
    /// Weight is the performance: hard-to-separate pairs merge first.
    #[default]
    Perf,
    /// Weight is `1 - performance`: easy pairs merge first.
    InversePerf,
}

impl WeightOrientation {
    pub fn weight(self, performance: f64) -> f64 {
        match self {
            WeightOrientation::Perf => performance,
            WeightOrientation::InversePerf => 1.0 - performance,
        }
    }
}

impl fmt::Display for WeightOrientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WeightOrientation::Perf => "perf",
            WeightOrientation::InversePerf => "inverse-perf",
        })
    }
}

impl FromStr for WeightOrientation {
    type Err = EcocError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "perf" => Ok(WeightOrientation::Perf),
            "inverse-perf" => Ok(WeightOrientation::InversePerf),
            other => Err(EcocError::invalid(format!("unknown weight orientation {other:?}"))),
        }
    }
}

/// One matching round.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundTrace {
    pub subsets: Vec<Vec<ClassId>>,
    /// Performance of every unordered subset pair `(p, q)`, `p < q`.
    pub performance: Vec<((usize, usize), f64)>,
    /// Matched subset indices.
    pub pairs: Vec<(usize, usize)>,
    pub bye: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchingCode {
    pub matrix: CodeMatrix,
    pub rounds: Vec<RoundTrace>,
}

/// Orders a matched pair: the subset holding the smallest class id becomes
/// the positive side.
pub fn first_subset_orientation(a: &[ClassId], b: &[ClassId]) -> (Vec<ClassId>, Vec<ClassId>) {
    let min_a = a.iter().min().copied().unwrap_or(usize::MAX);
    let min_b = b.iter().min().copied().unwrap_or(usize::MAX);
    if min_a <= min_b {
        (a.to_vec(), b.to_vec())
    } else {
        (b.to_vec(), a.to_vec())
    }
}

/// Builds the matching code for `n_classes` classes.
///
/// `perf(positive, negative)` estimates how well a binary classifier
/// separates the two class sets, in `[0, 1]`. Calls within a round may run
/// concurrently; results are memoized per subset pair.
pub fn build_matching_code<F>(n_classes: usize, orientation: WeightOrientation, perf: F) -> Result<MatchingCode>
where
    F: Fn(&[ClassId], &[ClassId]) -> Result<f64> + Sync,
{
    require_classes(n_classes, 2)?;
    let memo: Mutex<HashMap<(Vec<ClassId>, Vec<ClassId>), f64>> = Mutex::new(HashMap::new());
    let evaluate = |a: &[ClassId], b: &[ClassId]| -> Result<f64> {
        let (pos, neg) = first_subset_orientation(a, b);
        let key = (pos, neg);
        if let Some(&v) = memo.lock().unwrap().get(&key) {
            return Ok(v);
        }
        let v = perf(&key.0, &key.1)?;
        if !(0.0..=1.0).contains(&v) {
            return Err(EcocError::Numerical(format!(
                "performance {v} for {:?} vs {:?} outside [0, 1]",
                key.0, key.1
            )));
        }
        memo.lock().unwrap().insert(key, v);
        Ok(v)
    };

    let mut subsets: Vec<Vec<ClassId>> = (0..n_classes).map(|c| vec![c]).collect();
    let mut columns = Vec::with_capacity(n_classes - 1);
    let mut rounds = Vec::new();

    while subsets.len() > 2 {
        let m = subsets.len();
        let index_pairs: Vec<(usize, usize)> = (0..m).flat_map(|p| (p + 1..m).map(move |q| (p, q))).collect();
        let scores: Vec<f64> = index_pairs
            .par_iter()
            .map(|&(p, q)| evaluate(&subsets[p], &subsets[q]))
            .collect::<Result<_>>()?;
        let mut weights = vec![vec![0.0; m]; m];
        for (&(p, q), &s) in index_pairs.iter().zip(&scores) {
            weights[p][q] = orientation.weight(s);
            weights[q][p] = weights[p][q];
        }
        let (matching, bye) = solve_with_bye(&MatchingProblem::new(weights)?)?;

        let mut next = Vec::with_capacity(m / 2 + 1);
        for &(p, q) in &matching.pairs {
            let (pos, neg) = first_subset_orientation(&subsets[p], &subsets[q]);
            columns.push(ColumnMeta::new(pos.clone(), neg.clone()));
            let mut merged = [pos, neg].concat();
            merged.sort_unstable();
            next.push(merged);
        }
        if let Some(b) = bye {
            next.push(subsets[b].clone());
        }
        next.sort_by_key(|s| s[0]);

        rounds.push(RoundTrace {
            subsets: std::mem::replace(&mut subsets, next),
            performance: index_pairs.into_iter().zip(scores).collect(),
            pairs: matching.pairs,
            bye,
        });
    }

    let (pos, neg) = first_subset_orientation(&subsets[0], &subsets[1]);
    columns.push(ColumnMeta::new(pos, neg));
    let matrix = CodeMatrix::from_columns(n_classes, columns, "matching")?;
    Ok(MatchingCode { matrix, rounds })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flat(_: &[ClassId], _: &[ClassId]) -> Result<f64> {
        Ok(0.5)
    }

    #[test]
    fn orientation_rule() {
        assert_eq!(first_subset_orientation(&[3, 4], &[1, 2]), (vec![1, 2], vec![3, 4]));
        assert_eq!(first_subset_orientation(&[5], &[2]), (vec![2], vec![5]));
        assert_eq!(first_subset_orientation(&[2], &[5]), first_subset_orientation(&[5], &[2]));
    }

    #[test]
    fn hand_traced_four_classes() {
        // (0,1) and (2,3) are the cheapest pairs in round one
        let perf = |a: &[ClassId], b: &[ClassId]| -> Result<f64> {
            Ok(match (a, b) {
                ([0], [1]) | ([2], [3]) => 0.1,
                _ => 0.9,
            })
        };
        let code = build_matching_code(4, WeightOrientation::Perf, perf).unwrap();
        let cols: Vec<_> = code.matrix.columns().iter().map(|c| (c.positive.clone(), c.negative.clone())).collect();
        assert_eq!(
            cols,
            vec![(vec![0], vec![1]), (vec![2], vec![3]), (vec![0, 1], vec![2, 3])]
        );
        assert_eq!(code.rounds.len(), 1);
    }

    #[test]
    fn inverse_orientation_flips_preference() {
        let perf = |a: &[ClassId], b: &[ClassId]| -> Result<f64> {
            Ok(match (a, b) {
                ([0], [1]) | ([2], [3]) => 0.1,
                _ => 0.9,
            })
        };
        let code = build_matching_code(4, WeightOrientation::InversePerf, perf).unwrap();
        assert_eq!(code.matrix.column(0), &ColumnMeta::new(vec![0], vec![2]));
    }

    #[test]
    fn odd_counts_use_a_bye() {
        let code = build_matching_code(3, WeightOrientation::Perf, flat).unwrap();
        assert_eq!(code.matrix.n_columns(), 2);
        assert_eq!(code.rounds[0].bye, Some(0));
        // bye subset {0} meets the merged {1,2} in the last column
        assert_eq!(code.matrix.column(1), &ColumnMeta::new(vec![0], vec![1, 2]));
    }

    #[test]
    fn two_classes_single_column() {
        let code = build_matching_code(2, WeightOrientation::Perf, flat).unwrap();
        assert_eq!(code.matrix.n_columns(), 1);
        assert!(code.rounds.is_empty());
        assert!(build_matching_code(1, WeightOrientation::Perf, flat).is_err());
    }

    #[test]
    fn bad_performance_is_rejected() {
        let err = build_matching_code(4, WeightOrientation::Perf, |_: &[ClassId], _: &[ClassId]| Ok(1.5)).unwrap_err();
        assert!(matches!(err, EcocError::Numerical(_)));
        let err = build_matching_code(4, WeightOrientation::Perf, |_: &[ClassId], _: &[ClassId]| {
            Err(EcocError::invalid("learner failed"))
        })
        .unwrap_err();
        assert!(err.to_string().contains("learner failed"));
    }

    #[test]
    fn each_pair_scored_once() {
        let calls = Mutex::new(Vec::new());
        let perf = |a: &[ClassId], b: &[ClassId]| -> Result<f64> {
            calls.lock().unwrap().push((a.to_vec(), b.to_vec()));
            Ok(0.5)
        };
        build_matching_code(8, WeightOrientation::Perf, perf).unwrap();
        let calls = calls.into_inner().unwrap();
        // 28 + 6 pair evaluations; the final column is not scored
        assert_eq!(calls.len(), 34);
        let mut dedup = calls.clone();
        dedup.sort();
        dedup.dedup();
        assert_eq!(dedup.len(), calls.len());
    }

    #[test]
    fn orientation_names() {
        for o in [WeightOrientation::Perf, WeightOrientation::InversePerf] {
            assert_eq!(o.to_string().parse::<WeightOrientation>().unwrap(), o);
        }
    }
}
