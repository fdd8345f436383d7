use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::{ClassId, Dataset};
use crate::error::{EcocError, Result};
use crate::seed::rng_for;

/// Assignment of every instance to one of `k` folds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub k: usize,
    pub assignments: Vec<usize>,
    pub seed: u64,
    pub stratified: bool,
}

impl FoldPlan {
    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &f in &self.assignments {
            sizes[f] += 1;
        }
        sizes
    }

    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignments.len()).filter(|&i| self.assignments[i] == fold).collect()
    }

    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignments.len()).filter(|&i| self.assignments[i] != fold).collect()
    }
}

pub fn make_folds(data: &Dataset, k: usize, seed: u64, stratified: bool) -> Result<FoldPlan> {
    make_label_folds(&data.labels(), k, seed, stratified)
}

/// Partitions positions `0..labels.len()` into `k` folds.
///
/// Plain: one seeded shuffle of all positions, dealt round-robin.
/// Stratified: each class's positions are shuffled with their own stream and
/// dealt round-robin, the deal continuing across classes, so both per-class
/// and overall fold sizes differ by at most one.
pub fn make_label_folds(labels: &[ClassId], k: usize, seed: u64, stratified: bool) -> Result<FoldPlan> {
    if k < 2 {
        return Err(EcocError::invalid(format!("need at least 2 folds, got {k}")));
    }
    if k > labels.len() {
        return Err(EcocError::invalid(format!(
            "{k} folds requested for {} instances",
            labels.len()
        )));
    }
    let mut assignments = vec![0; labels.len()];
    if stratified {
        let n_classes = labels.iter().copied().max().map_or(0, |m| m + 1);
        let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); n_classes];
        for (i, &l) in labels.iter().enumerate() {
            by_class[l].push(i);
        }
        let mut next = 0;
        for (class, mut members) in by_class.into_iter().enumerate() {
            members.shuffle(&mut rng_for(seed, &[1, class as u64]));
            for i in members {
                assignments[i] = next % k;
                next += 1;
            }
        }
    } else {
        let mut order: Vec<usize> = (0..labels.len()).collect();
        order.shuffle(&mut rng_for(seed, &[0]));
        for (pos, i) in order.into_iter().enumerate() {
            assignments[i] = pos % k;
        }
    }
    Ok(FoldPlan {
        k,
        assignments,
        seed,
        stratified,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sorted_sizes(plan: &FoldPlan) -> Vec<usize> {
        let mut s = plan.fold_sizes();
        s.sort_unstable_by(|a, b| b.cmp(a));
        s
    }

    #[test]
    fn equal_split_and_remainder() {
        let plan = make_label_folds(&[0; 10], 5, 3, false).unwrap();
        assert_eq!(plan.fold_sizes(), vec![2; 5]);
        let plan = make_label_folds(&[0; 11], 5, 3, true).unwrap();
        assert_eq!(sorted_sizes(&plan), vec![3, 2, 2, 2, 2]);
    }

    #[test]
    fn deterministic() {
        let labels: Vec<usize> = (0..37).map(|i| i % 4).collect();
        for strat in [false, true] {
            assert_eq!(
                make_label_folds(&labels, 5, 11, strat).unwrap(),
                make_label_folds(&labels, 5, 11, strat).unwrap()
            );
        }
        assert_ne!(
            make_label_folds(&labels, 5, 11, false).unwrap().assignments,
            make_label_folds(&labels, 5, 12, false).unwrap().assignments
        );
    }

    #[test]
    fn errors() {
        assert!(make_label_folds(&[0, 1, 0], 4, 0, false).is_err());
        assert!(make_label_folds(&[0, 1, 0], 1, 0, false).is_err());
    }

    #[test]
    fn small_classes_spread_over_distinct_folds() {
        let labels = [0, 0, 0, 0, 0, 0, 0, 1, 1, 2];
        let plan = make_label_folds(&labels, 5, 4, true).unwrap();
        assert_ne!(plan.assignments[7], plan.assignments[8]);
    }

    proptest! {
        #[test]
        fn partition_properties(labels in prop::collection::vec(0usize..5, 2..120), k in 2usize..8, seed: u64, strat: bool) {
            prop_assume!(k <= labels.len());
            let plan = make_label_folds(&labels, k, seed, strat).unwrap();
            prop_assert_eq!(plan.assignments.len(), labels.len());
            prop_assert!(plan.assignments.iter().all(|&f| f < k));
            let sizes = plan.fold_sizes();
            prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
            let mut seen = vec![0; labels.len()];
            for f in 0..k {
                for i in plan.test_indices(f) { seen[i] += 1; }
                let train = plan.train_indices(f);
                prop_assert_eq!(train.len() + plan.test_indices(f).len(), labels.len());
            }
            prop_assert!(seen.iter().all(|&c| c == 1));
            if strat {
                for c in 0..5 {
                    let mut per = vec![0usize; k];
                    for (i, &l) in labels.iter().enumerate() {
                        if l == c { per[plan.assignments[i]] += 1; }
                    }
                    prop_assert!(per.iter().max().unwrap() - per.iter().min().unwrap() <= 1);
                }
            }
        }
    }
}
