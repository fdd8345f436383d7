//! Learner abstraction shared by ensemble training and the cross-validated
//! performance estimate. Tests plug stub learners in here.

use crate::error::Result;

pub trait BinaryClassifier {
    fn decision(&self, x: &[f64]) -> Result<f64>;

    /// Positive when `decision >= 0`.
    fn predict_sign(&self, x: &[f64]) -> Result<i8> {
        self.decision(x).map(crate::svm::sign_of)
    }
}

pub trait BinaryLearner: Sync {
    type Model: BinaryClassifier + Send + Sync;

    fn fit(&self, positives: &[&[f64]], negatives: &[&[f64]]) -> Result<Self::Model>;
}
