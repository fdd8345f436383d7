//! Binary soft-margin kernel SVM, the base learner for every code column.

mod cache;
mod kernel;
mod smo;

use serde::{Deserialize, Serialize};

use crate::dataset::ClassId;
use crate::error::{EcocError, Result};
use crate::learner::{BinaryClassifier, BinaryLearner};

pub use kernel::{kernel_eval, KernelSpec};

pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvmConfig {
    pub c: f64,
    pub kernel: KernelSpec,
    /// KKT violation allowed at termination.
    pub tolerance: f64,
    /// Iteration budget, in multiples of the training-set size.
    pub max_passes: usize,
    pub cache_bytes: usize,
}

impl Default for SvmConfig {
    fn default() -> Self {
        SvmConfig {
            c: 1.0,
            kernel: KernelSpec::default(),
            tolerance: 1e-3,
            max_passes: 200,
            cache_bytes: 64 << 20,
        }
    }
}

impl SvmConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(EcocError::invalid(format!("C must be positive, got {}", self.c)));
        }
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(EcocError::invalid(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        if self.max_passes == 0 {
            return Err(EcocError::invalid("max_passes must be at least 1"));
        }
        self.kernel.validate()
    }
}

/// A trained binary SVM: `f(x) = sum_i coef_i K(sv_i, x) + bias`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinaryModel {
    pub version: u32,
    pub kernel: KernelSpec,
    pub c: f64,
    pub n_features: usize,
    pub support_vectors: Vec<Vec<f64>>,
    /// `alpha_i * y_i` for each support vector.
    pub dual_coefs: Vec<f64>,
    pub bias: f64,
    pub positive_classes: Vec<ClassId>,
    pub negative_classes: Vec<ClassId>,
    pub converged: bool,
    pub iterations: usize,
}

/// Trains on `positives` (label +1) against `negatives` (label -1).
///
/// Running out of iterations is not an error: the model is returned with
/// `converged == false`.
pub fn train<V: AsRef<[f64]>>(positives: &[V], negatives: &[V], config: &SvmConfig) -> Result<BinaryModel> {
    config.validate()?;
    if positives.is_empty() || negatives.is_empty() {
        return Err(EcocError::invalid(format!(
            "both sides need instances ({} positive, {} negative)",
            positives.len(),
            negatives.len()
        )));
    }
    let n_features = positives[0].as_ref().len();
    let points: Vec<&[f64]> = positives.iter().chain(negatives).map(AsRef::as_ref).collect();
    if let Some(bad) = points.iter().find(|p| p.len() != n_features) {
        return Err(EcocError::DimensionMismatch {
            expected: n_features,
            actual: bad.len(),
        });
    }
    if points.iter().flat_map(|p| p.iter()).any(|v| !v.is_finite()) {
        return Err(EcocError::Numerical("non-finite training feature".into()));
    }
    let y: Vec<f64> = (0..points.len())
        .map(|i| if i < positives.len() { 1.0 } else { -1.0 })
        .collect();

    let max_iter = config.max_passes.saturating_mul(points.len().max(100));
    let sol = smo::solve(
        &points,
        &y,
        config.kernel,
        config.c,
        config.tolerance,
        max_iter,
        config.cache_bytes,
    );

    let mut support_vectors = Vec::new();
    let mut dual_coefs = Vec::new();
    for (i, &a) in sol.alpha.iter().enumerate() {
        if a > 0.0 {
            support_vectors.push(points[i].to_vec());
            dual_coefs.push(a * y[i]);
        }
    }
    Ok(BinaryModel {
        version: MODEL_FORMAT_VERSION,
        kernel: config.kernel,
        c: config.c,
        n_features,
        support_vectors,
        dual_coefs,
        bias: -sol.rho,
        positive_classes: Vec::new(),
        negative_classes: Vec::new(),
        converged: sol.converged,
        iterations: sol.iterations,
    })
}

/// Maps a decision value to a label; ties go to the positive side.
pub fn sign_of(value: f64) -> i8 {
    if value >= 0.0 {
        1
    } else {
        -1
    }
}

impl BinaryModel {
    pub fn decision(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.n_features {
            return Err(EcocError::DimensionMismatch {
                expected: self.n_features,
                actual: x.len(),
            });
        }
        let sum: f64 = self
            .support_vectors
            .iter()
            .zip(&self.dual_coefs)
            .map(|(sv, coef)| coef * self.kernel.eval_unchecked(sv, x))
            .sum();
        Ok(sum + self.bias)
    }

    pub fn predict(&self, x: &[f64]) -> Result<i8> {
        self.decision(x).map(sign_of)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let model: BinaryModel = serde_json::from_str(text).map_err(|e| EcocError::Format(e.to_string()))?;
        if model.version != MODEL_FORMAT_VERSION {
            return Err(EcocError::Format(format!(
                "unsupported model version {} (expected {MODEL_FORMAT_VERSION})",
                model.version
            )));
        }
        if model.dual_coefs.len() != model.support_vectors.len() {
            return Err(EcocError::Format("support vector and coefficient counts differ".into()));
        }
        if model.support_vectors.iter().any(|sv| sv.len() != model.n_features) {
            return Err(EcocError::Format("support vector dimension differs from n_features".into()));
        }
        Ok(model)
    }
}

impl BinaryClassifier for BinaryModel {
    fn decision(&self, x: &[f64]) -> Result<f64> {
        BinaryModel::decision(self, x)
    }
}

impl BinaryLearner for SvmConfig {
    type Model = BinaryModel;

    fn fit(&self, positives: &[&[f64]], negatives: &[&[f64]]) -> Result<BinaryModel> {
        train(positives, negatives, self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn linear(c: f64) -> SvmConfig {
        SvmConfig {
            c,
            kernel: KernelSpec::Linear,
            ..SvmConfig::default()
        }
    }

    fn bare_model(kernel: KernelSpec, svs: Vec<Vec<f64>>, coefs: Vec<f64>, bias: f64, n_features: usize) -> BinaryModel {
        BinaryModel {
            version: MODEL_FORMAT_VERSION,
            kernel,
            c: 1.0,
            n_features,
            support_vectors: svs,
            dual_coefs: coefs,
            bias,
            positive_classes: vec![],
            negative_classes: vec![],
            converged: true,
            iterations: 0,
        }
    }

    #[test]
    fn separable_pair() {
        let m = train(&[vec![1.0, 1.0]], &[vec![-1.0, -1.0]], &linear(1.0)).unwrap();
        assert!(m.converged);
        assert_eq!(m.predict(&[1.0, 1.0]).unwrap(), 1);
        assert_eq!(m.predict(&[-1.0, -1.0]).unwrap(), -1);
        // the max-margin solution: w = (0.5, 0.5), b = 0
        assert!((m.decision(&[1.0, 1.0]).unwrap() - 1.0).abs() < 1e-3);
    }

    #[test]
    fn xor_with_rbf() {
        let pos = [vec![1.0, 1.0], vec![-1.0, -1.0]];
        let neg = [vec![1.0, -1.0], vec![-1.0, 1.0]];
        let cfg = SvmConfig {
            c: 10.0,
            kernel: KernelSpec::Rbf { gamma: 1.0 },
            ..SvmConfig::default()
        };
        let m = train(&pos, &neg, &cfg).unwrap();
        for p in &pos {
            assert!(m.decision(p).unwrap() > 0.0);
        }
        for p in &neg {
            assert!(m.decision(p).unwrap() < 0.0);
        }
    }

    #[test]
    fn empty_side_is_an_error() {
        let none: [Vec<f64>; 0] = [];
        assert!(train(&none, &[vec![1.0]], &linear(1.0)).is_err());
        assert!(train(&[vec![1.0]], &none, &linear(1.0)).is_err());
    }

    #[test]
    fn mixed_dimensions_rejected() {
        let err = train(&[vec![1.0, 2.0]], &[vec![1.0]], &linear(1.0)).unwrap_err();
        assert!(matches!(err, EcocError::DimensionMismatch { expected: 2, actual: 1 }));
    }

    #[test]
    fn invalid_config_rejected() {
        assert!(train(&[vec![1.0]], &[vec![0.0]], &linear(0.0)).is_err());
        let cfg = SvmConfig {
            tolerance: -1.0,
            ..SvmConfig::default()
        };
        assert!(train(&[vec![1.0]], &[vec![0.0]], &cfg).is_err());
    }

    #[test]
    fn decision_worked_values() {
        let m = bare_model(KernelSpec::Linear, vec![], vec![], 0.5, 3);
        assert_eq!(m.decision(&[9.0, -1.0, 4.0]).unwrap(), 0.5);

        let m = bare_model(KernelSpec::Rbf { gamma: 0.7 }, vec![vec![0.2, -0.4]], vec![1.0], 0.0, 2);
        assert_eq!(m.decision(&[0.2, -0.4]).unwrap(), 1.0);

        let m = bare_model(KernelSpec::Linear, vec![vec![2.0, 0.0]], vec![1.0], -1.0, 2);
        assert_eq!(m.decision(&[1.0, 0.0]).unwrap(), 1.0);
        assert!(m.decision(&[1.0]).is_err());
    }

    #[test]
    fn zero_decision_is_positive() {
        let m = bare_model(KernelSpec::Linear, vec![], vec![], 0.0, 1);
        assert_eq!(m.predict(&[3.0]).unwrap(), 1);
    }

    #[test]
    fn cache_size_does_not_change_the_model() {
        let pos: Vec<Vec<f64>> = (0..30).map(|i| vec![(i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()]).collect();
        let neg: Vec<Vec<f64>> = (0..30).map(|i| vec![(i as f64 * 0.29).cos() - 0.3, (i as f64 * 0.53).sin() + 0.2]).collect();
        let mut cfg = SvmConfig::default();
        cfg.kernel = KernelSpec::Rbf { gamma: 2.0 };
        let big = train(&pos, &neg, &cfg).unwrap();
        cfg.cache_bytes = 0;
        let none = train(&pos, &neg, &cfg).unwrap();
        cfg.cache_bytes = 3 * 60 * 8;
        let tiny = train(&pos, &neg, &cfg).unwrap();
        assert_eq!(big, none);
        assert_eq!(big, tiny);
    }

    #[test]
    fn json_round_trip_is_exact() {
        let pos = [vec![0.1, 1.0 / 3.0], vec![0.7, 0.2]];
        let neg = [vec![-0.3, -1.0 / 7.0]];
        let m = train(&pos, &neg, &SvmConfig::default()).unwrap();
        let back = BinaryModel::from_json(&m.to_json()).unwrap();
        assert_eq!(m, back);
        for (a, b) in m.dual_coefs.iter().zip(&back.dual_coefs) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn json_rejects_wrong_version_and_garbage() {
        let m = bare_model(KernelSpec::Linear, vec![], vec![], 0.0, 1);
        let text = m.to_json().replace("\"version\": 1", "\"version\": 99");
        assert!(matches!(BinaryModel::from_json(&text), Err(EcocError::Format(_))));
        assert!(BinaryModel::from_json("{").is_err());
    }

    #[test]
    fn iteration_budget_exhaustion_is_flagged() {
        let pos: Vec<Vec<f64>> = (0..40).map(|i| vec![(i as f64).sin(), (i as f64 * 1.7).cos()]).collect();
        let neg: Vec<Vec<f64>> = (0..40).map(|i| vec![(i as f64 * 0.3).cos(), (i as f64 * 2.1).sin()]).collect();
        let cfg = SvmConfig {
            max_passes: 1,
            tolerance: 1e-12,
            c: 100.0,
            kernel: KernelSpec::Rbf { gamma: 5.0 },
            ..SvmConfig::default()
        };
        let m = train(&pos, &neg, &cfg).unwrap();
        assert!(!m.converged);
        assert!(m.decision(&[0.0, 0.0]).unwrap().is_finite());
    }
}
