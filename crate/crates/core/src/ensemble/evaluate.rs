use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::{build_matching_code_for_data, train_columns, EcocEnsemble};
use crate::coding::{CodeMatrix, Strategy, WeightOrientation};
use crate::dataset::{apply_scaling, fit_scaling, make_folds, Dataset};
use crate::decoding::DecoderSpec;
use crate::error::{EcocError, Result};
use crate::seed::derive_seed;
use crate::svm::SvmConfig;
use crate::util::mean_std;

const TAG_OUTER_FOLDS: u64 = 1;
const TAG_MATRIX: u64 = 2;
const TAG_INNER_CV: u64 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvaluationSettings {
    pub svm: SvmConfig,
    pub decoder: DecoderSpec,
    /// Folds used by the pair score inside the matching construction.
    pub inner_k: usize,
    pub orientation: WeightOrientation,
    pub stratified: bool,
}

impl Default for EvaluationSettings {
    fn default() -> Self {
        EvaluationSettings {
            svm: SvmConfig::default(),
            decoder: DecoderSpec::default(),
            inner_k: 5,
            orientation: WeightOrientation::default(),
            stratified: true,
        }
    }
}

/// Wall-clock durations, in seconds. Not deterministic.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub code_seconds: f64,
    pub train_seconds: f64,
    pub predict_seconds: f64,
    /// Prediction time divided by the number of predicted instances.
    pub predict_seconds_per_instance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerfReport {
    pub dataset: String,
    pub strategy: Strategy,
    pub n_classes: usize,
    pub n_classifiers: usize,
    pub accuracy_mean: f64,
    pub accuracy_std: f64,
    pub fold_accuracies: Vec<f64>,
    /// Column models that hit the iteration budget, summed over folds.
    pub non_converged: usize,
    /// True when the code matrix was rebuilt from each fold's training part.
    pub code_per_fold: bool,
    #[serde(skip)]
    pub timings: Timings,
}

impl PerfReport {
    /// Pretty JSON without the wall times, so reruns compare byte for byte.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Outer k-fold evaluation of one coding strategy.
///
/// Each fold fits scaling on its training part. The matching code is rebuilt
/// per fold from training data only; the other strategies build one matrix
/// from `seed` and reuse it.
pub fn evaluate(
    data: &Dataset,
    strategy: Strategy,
    settings: &EvaluationSettings,
    outer_k: usize,
    seed: u64,
) -> Result<PerfReport> {
    evaluate_repeat(data, strategy, settings, outer_k, seed, 0)
}

/// Like [`evaluate`], but draws random matrices from stream `repeat`. The
/// outer folds depend on `seed` alone, so repeats and strategies share them.
pub fn evaluate_repeat(
    data: &Dataset,
    strategy: Strategy,
    settings: &EvaluationSettings,
    outer_k: usize,
    seed: u64,
    repeat: u64,
) -> Result<PerfReport> {
    settings.svm.validate()?;
    if outer_k < 2 {
        return Err(EcocError::invalid(format!("outer k must be at least 2, got {outer_k}")));
    }
    let n = data.n_classes();
    let plan = make_folds(data, outer_k, derive_seed(seed, &[TAG_OUTER_FOLDS]), settings.stratified)?;
    let fixed = if strategy == Strategy::Matching {
        None
    } else {
        Some(strategy.build_fixed(n, derive_seed(seed, &[TAG_MATRIX, repeat]))?)
    };

    let mut timings = Timings::default();
    let mut accuracies = Vec::with_capacity(outer_k);
    let mut non_converged = 0;
    let mut n_classifiers = fixed.as_ref().map_or(0, CodeMatrix::n_columns);
    let mut predicted = 0usize;
    for fold in 0..outer_k {
        let train = data.subset(&plan.train_indices(fold));
        let test = data.subset(&plan.test_indices(fold));
        let scaling = fit_scaling(&train)?;
        let scaled = apply_scaling(&train, &scaling)?;

        let started = Instant::now();
        let matrix = match &fixed {
            Some(m) => m.clone(),
            None => {
                let inner_seed = derive_seed(seed, &[TAG_INNER_CV, fold as u64]);
                build_matching_code_for_data(&scaled, &settings.svm, settings.inner_k, inner_seed, settings.orientation)?
                    .matrix
            }
        };
        timings.code_seconds += started.elapsed().as_secs_f64();
        n_classifiers = matrix.n_columns();

        let started = Instant::now();
        let models = train_columns(&scaled, &matrix, &settings.svm)?;
        timings.train_seconds += started.elapsed().as_secs_f64();
        let ensemble = EcocEnsemble::new(matrix, models, settings.decoder, scaling, data.classes().to_vec())?;
        non_converged += ensemble.non_converged_columns().len();

        let started = Instant::now();
        accuracies.push(ensemble.accuracy(&test)?);
        timings.predict_seconds += started.elapsed().as_secs_f64();
        predicted += test.len();
    }
    timings.predict_seconds_per_instance = timings.predict_seconds / predicted.max(1) as f64;
    let (accuracy_mean, accuracy_std) = mean_std(&accuracies);
    Ok(PerfReport {
        dataset: data.name().to_string(),
        strategy,
        n_classes: n,
        n_classifiers,
        accuracy_mean,
        accuracy_std,
        fold_accuracies: accuracies,
        non_converged,
        code_per_fold: strategy == Strategy::Matching,
        timings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::synth::eight_gaussians;

    fn quick() -> EvaluationSettings {
        EvaluationSettings {
            svm: SvmConfig {
                tolerance: 1e-2,
                ..SvmConfig::default()
            },
            inner_k: 2,
            ..EvaluationSettings::default()
        }
    }

    #[test]
    fn counts_and_determinism() {
        let data = eight_gaussians(12, 0.2, 5).unwrap();
        let ovo = evaluate(&data, Strategy::Ovo, &quick(), 3, 9).unwrap();
        assert_eq!(ovo.n_classifiers, 28);
        assert_eq!(ovo.fold_accuracies.len(), 3);
        assert!(!ovo.code_per_fold);
        let m1 = evaluate(&data, Strategy::Matching, &quick(), 3, 9).unwrap();
        let m2 = evaluate(&data, Strategy::Matching, &quick(), 3, 9).unwrap();
        assert_eq!(m1.n_classifiers, 7);
        assert!(m1.code_per_fold);
        assert_eq!(m1.fold_accuracies, m2.fold_accuracies);
        assert_eq!(serde_json::to_string(&m1).unwrap(), serde_json::to_string(&m2).unwrap());
        for r in [&ovo, &m1] {
            assert!(r.fold_accuracies.iter().all(|a| (0.0..=1.0).contains(a)));
        }
    }

    #[test]
    fn repeats_share_folds_but_not_matrices() {
        let data = eight_gaussians(6, 0.2, 1).unwrap();
        let a = evaluate_repeat(&data, Strategy::Dense, &quick(), 2, 3, 0).unwrap();
        let b = evaluate_repeat(&data, Strategy::Dense, &quick(), 2, 3, 1).unwrap();
        assert_eq!(a.n_classifiers, b.n_classifiers);
        let m0 = Strategy::Dense.build_fixed(8, derive_seed(3, &[TAG_MATRIX, 0])).unwrap();
        let m1 = Strategy::Dense.build_fixed(8, derive_seed(3, &[TAG_MATRIX, 1])).unwrap();
        assert_ne!(m0, m1);
    }

    #[test]
    fn rejects_bad_k() {
        let data = eight_gaussians(4, 0.2, 5).unwrap();
        assert!(evaluate(&data, Strategy::Ova, &quick(), 1, 0).is_err());
        assert!(evaluate(&data, Strategy::Ova, &quick(), 100, 0).is_err());
    }
}
