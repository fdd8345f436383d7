//! One binary model per code column, end-to-end prediction, the
//! cross-validated pair score that drives the matching code, and outer-CV
//! evaluation.

mod cv;
mod evaluate;
mod persist;

use rayon::prelude::*;

use crate::coding::CodeMatrix;
use crate::dataset::{apply_scaling, fit_scaling, ClassId, Dataset, ScalingParams};
use crate::decoding::{distances, DecoderSpec, OutputVector};
use crate::error::{EcocError, Result};
use crate::learner::BinaryLearner;
use crate::svm::{BinaryModel, SvmConfig};

pub use cv::{build_matching_code_for_data, generalization_performance};
pub use evaluate::{evaluate, evaluate_repeat, EvaluationSettings, PerfReport, Timings};
pub use persist::{load_ensemble, save_ensemble, Manifest, MANIFEST_VERSION};

/// A trained ensemble. Inputs are scaled with `scaling` before the column
/// models see them.
#[derive(Debug, Clone, PartialEq)]
pub struct EcocEnsemble {
    pub matrix: CodeMatrix,
    pub models: Vec<BinaryModel>,
    pub decoder: DecoderSpec,
    pub scaling: ScalingParams,
    /// External label of each code-matrix row.
    pub classes: Vec<String>,
}

/// Trains one model per column of `matrix` on already scaled data.
/// Classes coded 0 in a column are left out of that column's training set.
pub fn train_columns<L: BinaryLearner>(data: &Dataset, matrix: &CodeMatrix, learner: &L) -> Result<Vec<L::Model>> {
    if matrix.n_classes() != data.n_classes() {
        return Err(EcocError::invalid(format!(
            "matrix has {} rows but data has {} classes",
            matrix.n_classes(),
            data.n_classes()
        )));
    }
    (0..matrix.n_columns())
        .into_par_iter()
        .map(|j| {
            let mut pos = Vec::new();
            let mut neg = Vec::new();
            for inst in data.instances() {
                match matrix.cell(inst.label, j) {
                    1 => pos.push(inst.features.as_slice()),
                    -1 => neg.push(inst.features.as_slice()),
                    _ => {}
                }
            }
            for (side, set) in [("positive", &pos), ("negative", &neg)] {
                if set.is_empty() {
                    return Err(EcocError::Column {
                        column: j,
                        message: format!("{side} side has no training instances"),
                    });
                }
            }
            learner.fit(&pos, &neg).map_err(|e| EcocError::Column {
                column: j,
                message: e.to_string(),
            })
        })
        .collect()
}

/// Fits scaling on `data`, then trains every column with the SVM.
pub fn train_ensemble(data: &Dataset, matrix: CodeMatrix, config: &SvmConfig, decoder: DecoderSpec) -> Result<EcocEnsemble> {
    let scaling = fit_scaling(data)?;
    let scaled = apply_scaling(data, &scaling)?;
    let models = train_columns(&scaled, &matrix, config)?;
    EcocEnsemble::new(matrix, models, decoder, scaling, data.classes().to_vec())
}

impl EcocEnsemble {
    /// Assembles an ensemble, stamping each model with its column's class sets.
    pub fn new(
        matrix: CodeMatrix,
        mut models: Vec<BinaryModel>,
        decoder: DecoderSpec,
        scaling: ScalingParams,
        classes: Vec<String>,
    ) -> Result<Self> {
        if models.len() != matrix.n_columns() {
            return Err(EcocError::invalid(format!(
                "{} models for {} columns",
                models.len(),
                matrix.n_columns()
            )));
        }
        if classes.len() != matrix.n_classes() {
            return Err(EcocError::invalid(format!(
                "{} class labels for {} matrix rows",
                classes.len(),
                matrix.n_classes()
            )));
        }
        for (j, model) in models.iter_mut().enumerate() {
            if model.n_features != scaling.n_features() {
                return Err(EcocError::Column {
                    column: j,
                    message: format!(
                        "model expects {} features, scaler has {}",
                        model.n_features,
                        scaling.n_features()
                    ),
                });
            }
            model.positive_classes = matrix.column(j).positive.clone();
            model.negative_classes = matrix.column(j).negative.clone();
        }
        Ok(EcocEnsemble {
            matrix,
            models,
            decoder,
            scaling,
            classes,
        })
    }

    pub fn n_features(&self) -> usize {
        self.scaling.n_features()
    }

    /// Scales `x` and evaluates every column model once.
    pub fn outputs(&self, x: &[f64]) -> Result<OutputVector> {
        let scaled = self.scaling.scale_vector(x)?;
        let values = self
            .models
            .iter()
            .map(|m| m.decision(&scaled))
            .collect::<Result<Vec<f64>>>()?;
        Ok(OutputVector::from_decisions(values))
    }

    pub fn predict(&self, x: &[f64]) -> Result<ClassId> {
        Ok(self.predict_with_distances(x)?.0)
    }

    /// Predicted class plus the decoder distance to every class.
    pub fn predict_with_distances(&self, x: &[f64]) -> Result<(ClassId, Vec<f64>)> {
        let out = self.outputs(x)?;
        let d = distances(self.decoder, &out, &self.matrix)?;
        Ok((crate::decoding::argmin(&d), d))
    }

    pub fn predict_label(&self, x: &[f64]) -> Result<&str> {
        Ok(&self.classes[self.predict(x)?])
    }

    /// Fraction of `data` predicted correctly. `data` must share this
    /// ensemble's class vocabulary.
    pub fn accuracy(&self, data: &Dataset) -> Result<f64> {
        if data.classes() != self.classes.as_slice() {
            return Err(EcocError::invalid("dataset classes differ from the ensemble's"));
        }
        if data.is_empty() {
            return Err(EcocError::Empty);
        }
        let correct = data
            .instances()
            .par_iter()
            .map(|inst| self.predict(&inst.features).map(|p| (p == inst.label) as usize))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .sum::<usize>();
        Ok(correct as f64 / data.len() as f64)
    }

    pub fn non_converged_columns(&self) -> Vec<usize> {
        (0..self.models.len()).filter(|&j| !self.models[j].converged).collect()
    }
}
