use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::error::{EcocError, Result};

/// Per-feature `(min, max)` observed on the data the scaler was fitted to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingParams {
    pub ranges: Vec<(f64, f64)>,
}

pub fn fit_scaling(data: &Dataset) -> Result<ScalingParams> {
    if data.is_empty() {
        return Err(EcocError::Empty);
    }
    let mut ranges = vec![(f64::INFINITY, f64::NEG_INFINITY); data.n_features()];
    for inst in data.instances() {
        for (r, &v) in ranges.iter_mut().zip(&inst.features) {
            r.0 = r.0.min(v);
            r.1 = r.1.max(v);
        }
    }
    Ok(ScalingParams { ranges })
}

impl ScalingParams {
    pub fn n_features(&self) -> usize {
        self.ranges.len()
    }

    /// Maps `x` into `[-1, 1]`. Constant features go to 0; values outside
    /// the fitted range are clamped.
    pub fn scale_vector(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.ranges.len() {
            return Err(EcocError::DimensionMismatch {
                expected: self.ranges.len(),
                actual: x.len(),
            });
        }
        Ok(x.iter()
            .zip(&self.ranges)
            .map(|(&v, &(lo, hi))| {
                if hi > lo {
                    (2.0 * (v - lo) / (hi - lo) - 1.0).clamp(-1.0, 1.0)
                } else {
                    0.0
                }
            })
            .collect())
    }
}

pub fn apply_scaling(data: &Dataset, params: &ScalingParams) -> Result<Dataset> {
    if data.n_features() != params.n_features() {
        return Err(EcocError::DimensionMismatch {
            expected: params.n_features(),
            actual: data.n_features(),
        });
    }
    let instances = data
        .instances()
        .iter()
        .map(|inst| {
            Ok(super::Instance {
                features: params.scale_vector(&inst.features)?,
                label: inst.label,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(data.with_instances(instances))
}
