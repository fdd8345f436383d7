//! Labeled feature data: containers, text formats, scaling and fold plans.

mod folds;
mod io;
mod scaling;
pub mod synth;

use std::cmp::Ordering;
use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{EcocError, Result};

pub use folds::{make_folds, make_label_folds, FoldPlan};
pub use io::{load_dense, load_sparse, parse_dense, parse_sparse, write_dense, write_sparse, LabelColumn};
pub use scaling::{apply_scaling, fit_scaling, ScalingParams};

/// Index of a class in a dataset's sorted vocabulary. Also the row index of
/// that class in every code matrix built for the dataset.
pub type ClassId = usize;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub features: Vec<f64>,
    pub label: ClassId,
}

/// A dense, labeled dataset.
///
/// `classes` holds the external label tokens sorted ascending (numerically
/// when every token parses as a number, lexically otherwise); an instance's
/// `label` indexes into it.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    name: String,
    n_features: usize,
    classes: Vec<String>,
    instances: Vec<Instance>,
}

/// Orders label tokens the way the class vocabulary is sorted.
pub fn sort_labels(labels: &mut [String]) {
    let numeric = labels.iter().all(|l| l.parse::<f64>().is_ok());
    if numeric {
        labels.sort_by(|a, b| {
            let (x, y) = (a.parse::<f64>().unwrap(), b.parse::<f64>().unwrap());
            x.partial_cmp(&y).unwrap_or(Ordering::Equal).then_with(|| a.cmp(b))
        });
    } else {
        labels.sort();
    }
}

impl Dataset {
    /// Builds a dataset from rows and external labels. The vocabulary is the
    /// sorted set of distinct labels; row order is preserved.
    pub fn from_rows(name: impl Into<String>, rows: Vec<Vec<f64>>, labels: Vec<String>) -> Result<Self> {
        if rows.len() != labels.len() {
            return Err(EcocError::invalid(format!(
                "{} rows but {} labels",
                rows.len(),
                labels.len()
            )));
        }
        if rows.is_empty() {
            return Err(EcocError::Empty);
        }
        let mut classes: Vec<String> = labels.clone();
        sort_labels(&mut classes);
        classes.dedup();
        let index: HashMap<&str, ClassId> = classes.iter().enumerate().map(|(i, c)| (c.as_str(), i)).collect();
        let n_features = rows[0].len();
        let mut instances = Vec::with_capacity(rows.len());
        for (row, (features, label)) in rows.into_iter().zip(&labels).enumerate() {
            if features.len() != n_features {
                return Err(EcocError::parse(
                    row + 1,
                    features.len(),
                    format!("row {} has {} features, expected {}", row + 1, features.len(), n_features),
                ));
            }
            instances.push(Instance {
                features,
                label: index[label.as_str()],
            });
        }
        Ok(Dataset {
            name: name.into(),
            n_features,
            classes,
            instances,
        })
    }

    /// Builds a dataset over an explicit vocabulary. `classes` must already be
    /// sorted and duplicate free; labels must index into it.
    pub fn from_parts(
        name: impl Into<String>,
        n_features: usize,
        classes: Vec<String>,
        instances: Vec<Instance>,
    ) -> Result<Self> {
        let mut sorted = classes.clone();
        sort_labels(&mut sorted);
        sorted.dedup();
        if sorted != classes {
            return Err(EcocError::invalid("class vocabulary must be sorted and distinct"));
        }
        for (i, inst) in instances.iter().enumerate() {
            if inst.features.len() != n_features {
                return Err(EcocError::DimensionMismatch {
                    expected: n_features,
                    actual: inst.features.len(),
                });
            }
            if inst.label >= classes.len() {
                return Err(EcocError::invalid(format!("instance {i} has unknown class {}", inst.label)));
            }
        }
        Ok(Dataset {
            name: name.into(),
            n_features,
            classes,
            instances,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn n_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn instances(&self) -> &[Instance] {
        &self.instances
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    pub fn labels(&self) -> Vec<ClassId> {
        self.instances.iter().map(|i| i.label).collect()
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.classes.len()];
        for inst in &self.instances {
            counts[inst.label] += 1;
        }
        counts
    }

    pub fn class_index(&self, label: &str) -> Option<ClassId> {
        self.classes.iter().position(|c| c == label)
    }

    /// Instances at `indices`, in that order, keeping the full class
    /// vocabulary (classes may end up with no instances).
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset {
            name: self.name.clone(),
            n_features: self.n_features,
            classes: self.classes.clone(),
            instances: indices.iter().map(|&i| self.instances[i].clone()).collect(),
        }
    }

    pub(crate) fn with_instances(&self, instances: Vec<Instance>) -> Dataset {
        Dataset {
            name: self.name.clone(),
            n_features: self.n_features,
            classes: self.classes.clone(),
            instances,
        }
    }
}
