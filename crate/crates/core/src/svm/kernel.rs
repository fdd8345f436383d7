use serde::{Deserialize, Serialize};

use crate::error::{EcocError, Result};

/// Kernel function of the SVM.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum KernelSpec {
    Linear,
    /// `exp(-gamma * |a - b|^2)`
    Rbf { gamma: f64 },
}

impl Default for KernelSpec {
    fn default() -> Self {
        KernelSpec::Rbf { gamma: 0.1 }
    }
}

impl KernelSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            KernelSpec::Rbf { gamma } if !(gamma > 0.0 && gamma.is_finite()) => {
                Err(EcocError::invalid(format!("rbf gamma must be positive, got {gamma}")))
            }
            _ => Ok(()),
        }
    }

    /// Kernel value without a dimension check.
    #[inline]
    pub(crate) fn eval_unchecked(&self, a: &[f64], b: &[f64]) -> f64 {
        match *self {
            KernelSpec::Linear => a.iter().zip(b).map(|(x, y)| x * y).sum(),
            KernelSpec::Rbf { gamma } => {
                let d2: f64 = a
                    .iter()
                    .zip(b)
                    .map(|(x, y)| {
                        let d = x - y;
                        d * d
                    })
                    .sum();
                (-gamma * d2).exp()
            }
        }
    }
}

pub fn kernel_eval(spec: &KernelSpec, a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(EcocError::DimensionMismatch {
            expected: a.len(),
            actual: b.len(),
        });
    }
    Ok(spec.eval_unchecked(a, b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn worked_values() {
        let rbf = KernelSpec::Rbf { gamma: 0.1 };
        assert_eq!(kernel_eval(&rbf, &[0.3, -2.0], &[0.3, -2.0]).unwrap(), 1.0);
        // exp(-0.1 * 2)
        let v = kernel_eval(&rbf, &[0.0, 0.0], &[1.0, 1.0]).unwrap();
        assert!((v - 0.818_730_753_077_981_9).abs() < 1e-15);
        assert!((v - 0.818731).abs() < 1e-6);
        assert_eq!(kernel_eval(&KernelSpec::Linear, &[1.0, 2.0], &[3.0, 4.0]).unwrap(), 11.0);
    }

    #[test]
    fn dimension_mismatch() {
        assert!(matches!(
            kernel_eval(&KernelSpec::Linear, &[1.0], &[1.0, 2.0]),
            Err(EcocError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn gamma_must_be_positive() {
        assert!(KernelSpec::Rbf { gamma: 0.0 }.validate().is_err());
        assert!(KernelSpec::Rbf { gamma: f64::NAN }.validate().is_err());
        assert!(KernelSpec::Rbf { gamma: 0.5 }.validate().is_ok());
    }

    proptest! {
        #[test]
        fn symmetric(a in prop::collection::vec(-10.0f64..10.0, 4), b in prop::collection::vec(-10.0f64..10.0, 4), g in 0.001f64..5.0) {
            for spec in [KernelSpec::Linear, KernelSpec::Rbf { gamma: g }] {
                prop_assert_eq!(kernel_eval(&spec, &a, &b).unwrap().to_bits(), kernel_eval(&spec, &b, &a).unwrap().to_bits());
            }
        }
    }
}
