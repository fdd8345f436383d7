use crate::coding::{build_matching_code, MatchingCode, WeightOrientation};
use crate::dataset::{make_label_folds, ClassId, Dataset};
use crate::error::{EcocError, Result};
use crate::learner::{BinaryClassifier, BinaryLearner};

/// k-fold cross-validated accuracy of `positive` vs `negative`.
///
/// The instances of both class sets form the pool `T`, which is split into
/// `k` stratified folds. Each fold is predicted by a model trained on the
/// other `k - 1`; the result is the total number of correct predictions over
/// `|T|`. A training portion with no instances on one side predicts the
/// other side for the whole fold.
pub fn generalization_performance<L: BinaryLearner>(
    data: &Dataset,
    positive: &[ClassId],
    negative: &[ClassId],
    learner: &L,
    k: usize,
    seed: u64,
) -> Result<f64> {
    if let Some(c) = positive.iter().find(|c| negative.contains(c)) {
        return Err(EcocError::invalid(format!("class {c} on both sides")));
    }
    let mut pool: Vec<(&[f64], ClassId, bool)> = Vec::new();
    for inst in data.instances() {
        if positive.contains(&inst.label) {
            pool.push((&inst.features, inst.label, true));
        } else if negative.contains(&inst.label) {
            pool.push((&inst.features, inst.label, false));
        }
    }
    let n_pos = pool.iter().filter(|p| p.2).count();
    if n_pos == 0 || n_pos == pool.len() {
        return Err(EcocError::invalid(format!(
            "both sides need instances ({n_pos} positive, {} negative)",
            pool.len() - n_pos
        )));
    }
    let labels: Vec<ClassId> = pool.iter().map(|p| p.1).collect();
    let plan = make_label_folds(&labels, k, seed, true)?;

    let mut correct = 0usize;
    for fold in 0..k {
        let (mut pos, mut neg) = (Vec::new(), Vec::new());
        for (i, &(x, _, is_pos)) in pool.iter().enumerate() {
            if plan.assignments[i] != fold {
                if is_pos {
                    pos.push(x);
                } else {
                    neg.push(x);
                }
            }
        }
        let model = if pos.is_empty() || neg.is_empty() {
            None
        } else {
            Some(learner.fit(&pos, &neg)?)
        };
        for (i, &(x, _, is_pos)) in pool.iter().enumerate() {
            if plan.assignments[i] != fold {
                continue;
            }
            let predicted_pos = match &model {
                Some(m) => m.predict_sign(x)? > 0,
                None => !pos.is_empty(),
            };
            if predicted_pos == is_pos {
                correct += 1;
            }
        }
    }
    Ok(correct as f64 / pool.len() as f64)
}

/// Matching code whose pair weights are cross-validated accuracies on
/// `data`, which should already be scaled.
pub fn build_matching_code_for_data<L: BinaryLearner>(
    data: &Dataset,
    learner: &L,
    k: usize,
    seed: u64,
    orientation: WeightOrientation,
) -> Result<MatchingCode> {
    build_matching_code(data.n_classes(), orientation, |pos, neg| {
        generalization_performance(data, pos, neg, learner, k, seed)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Mutex;

    /// Predicts positive when the first feature is positive.
    struct Oracle;
    struct OracleModel;
    impl BinaryClassifier for OracleModel {
        fn decision(&self, x: &[f64]) -> Result<f64> {
            Ok(x[0])
        }
    }
    impl BinaryLearner for Oracle {
        type Model = OracleModel;
        fn fit(&self, _: &[&[f64]], _: &[&[f64]]) -> Result<OracleModel> {
            Ok(OracleModel)
        }
    }

    struct Constant(f64);
    impl BinaryClassifier for Constant {
        fn decision(&self, _: &[f64]) -> Result<f64> {
            Ok(self.0)
        }
    }
    struct AlwaysPositive;
    impl BinaryLearner for AlwaysPositive {
        type Model = Constant;
        fn fit(&self, _: &[&[f64]], _: &[&[f64]]) -> Result<Constant> {
            Ok(Constant(1.0))
        }
    }

    /// Records (train ids, test ids) per fit via the feature's second slot.
    struct Recorder(Mutex<Vec<Vec<f64>>>);
    impl BinaryLearner for Recorder {
        type Model = Constant;
        fn fit(&self, p: &[&[f64]], n: &[&[f64]]) -> Result<Constant> {
            self.0.lock().unwrap().push(p.iter().chain(n).map(|x| x[1]).collect());
            Ok(Constant(-1.0))
        }
    }

    /// Class "a" at x > 0, class "b" at x < 0; second feature is an id.
    fn signed(n_a: usize, n_b: usize) -> Dataset {
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for i in 0..n_a {
            rows.push(vec![1.0 + i as f64, rows.len() as f64]);
            labels.push("a".to_string());
        }
        for i in 0..n_b {
            rows.push(vec![-1.0 - i as f64, rows.len() as f64]);
            labels.push("b".to_string());
        }
        Dataset::from_rows("s", rows, labels).unwrap()
    }

    #[test]
    fn perfect_learner_scores_one() {
        let d = signed(10, 10);
        assert_eq!(generalization_performance(&d, &[0], &[1], &Oracle, 5, 1).unwrap(), 1.0);
    }

    #[test]
    fn constant_learner_scores_the_positive_share() {
        // every validation prediction says "positive": exactly the 10
        // positives out of 20 are right, whatever the fold layout
        let d = signed(10, 10);
        assert_eq!(generalization_performance(&d, &[0], &[1], &AlwaysPositive, 5, 3).unwrap(), 0.5);
        let d = signed(7, 14);
        assert_eq!(generalization_performance(&d, &[0], &[1], &AlwaysPositive, 3, 3).unwrap(), 7.0 / 21.0);
    }

    #[test]
    fn leave_one_out() {
        let d = signed(2, 2);
        let rec = Recorder(Mutex::new(Vec::new()));
        // the recorder's models always say negative: 2 of 4 right
        assert_eq!(generalization_performance(&d, &[0], &[1], &rec, 4, 0).unwrap(), 0.5);
        let fits = rec.0.into_inner().unwrap();
        assert_eq!(fits.len(), 4);
        assert!(fits.iter().all(|f| f.len() == 3));
    }

    #[test]
    fn validation_never_in_training() {
        let d = signed(9, 8);
        let rec = Recorder(Mutex::new(Vec::new()));
        generalization_performance(&d, &[0], &[1], &rec, 5, 7).unwrap();
        let fits = rec.0.into_inner().unwrap();
        assert_eq!(fits.len(), 5);
        let mut held_out_total = 0;
        for train in &fits {
            let held_out: Vec<f64> = (0..17).map(|i| i as f64).filter(|id| !train.contains(id)).collect();
            held_out_total += held_out.len();
        }
        // each instance is held out exactly once across the folds
        assert_eq!(held_out_total, 17);
    }

    #[test]
    fn restricted_to_the_two_sides() {
        let mut rows = vec![vec![1.0, 0.0], vec![-1.0, 1.0], vec![5.0, 2.0], vec![2.0, 3.0], vec![-2.0, 4.0]];
        rows.push(vec![9.0, 5.0]);
        let labels = ["a", "b", "c", "a", "b", "c"].map(String::from).to_vec();
        let d = Dataset::from_rows("r", rows, labels).unwrap();
        let rec = Recorder(Mutex::new(Vec::new()));
        generalization_performance(&d, &[0], &[1], &rec, 2, 0).unwrap();
        for train in rec.0.into_inner().unwrap() {
            assert!(!train.contains(&2.0) && !train.contains(&5.0));
        }
    }

    #[test]
    fn errors() {
        let d = signed(2, 2);
        assert!(generalization_performance(&d, &[0], &[], &Oracle, 2, 0).is_err());
        assert!(generalization_performance(&d, &[0], &[1], &Oracle, 5, 0).is_err());
        assert!(generalization_performance(&d, &[0], &[0, 1], &Oracle, 2, 0).is_err());
        let lonely = signed(1, 6);
        // the single positive is never in its own training portion
        let v = generalization_performance(&lonely, &[0], &[1], &Oracle, 3, 0).unwrap();
        assert_eq!(v, 6.0 / 7.0);
    }

    #[test]
    fn deterministic() {
        let d = signed(11, 9);
        let cfg = crate::svm::SvmConfig::default();
        let a = generalization_performance(&d, &[0], &[1], &cfg, 5, 42).unwrap();
        assert_eq!(a, generalization_performance(&d, &[0], &[1], &cfg, 5, 42).unwrap());
    }
}
