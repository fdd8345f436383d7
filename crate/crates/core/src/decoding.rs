//! Decoding binary outputs against class codewords.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::coding::CodeMatrix;
use crate::dataset::ClassId;
use crate::error::{EcocError, Result};
use crate::svm::sign_of;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecoderSpec {
    Hamming,
    Euclidean,
    /// Euclidean distance restricted to the codeword's non-zero positions.
    #[default]
    AttenuatedEuclidean,
}

impl fmt::Display for DecoderSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DecoderSpec::Hamming => "hamming",
            DecoderSpec::Euclidean => "euclidean",
            DecoderSpec::AttenuatedEuclidean => "aed",
        })
    }
}

impl FromStr for DecoderSpec {
    type Err = EcocError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hamming" => Ok(DecoderSpec::Hamming),
            "euclidean" => Ok(DecoderSpec::Euclidean),
            "aed" | "attenuated_euclidean" => Ok(DecoderSpec::AttenuatedEuclidean),
            other => Err(EcocError::invalid(format!("unknown decoder {other:?} (hamming|euclidean|aed)"))),
        }
    }
}

/// Raw decision values of the L column classifiers and their signs.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputVector {
    pub values: Vec<f64>,
    pub signs: Vec<i8>,
}

impl OutputVector {
    pub fn from_decisions(values: Vec<f64>) -> Self {
        let signs = values.iter().map(|&v| sign_of(v)).collect();
        OutputVector { values, signs }
    }

    pub fn from_signs(signs: Vec<i8>) -> Self {
        OutputVector {
            values: signs.iter().map(|&s| s as f64).collect(),
            signs,
        }
    }

    pub fn len(&self) -> usize {
        self.signs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signs.is_empty()
    }
}

/// Distance between a sign vector `x` (entries +-1) and a codeword (entries
/// in {+1, 0, -1}).
pub fn distance(spec: DecoderSpec, x: &[i8], codeword: &[i8]) -> Result<f64> {
    if x.len() != codeword.len() {
        return Err(EcocError::DimensionMismatch {
            expected: codeword.len(),
            actual: x.len(),
        });
    }
    let pairs = x.iter().zip(codeword).map(|(&a, &b)| (a as f64, b as f64));
    Ok(match spec {
        DecoderSpec::Hamming => pairs.filter(|&(a, b)| b != 0.0 && a != b).count() as f64,
        DecoderSpec::Euclidean => pairs.map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt(),
        DecoderSpec::AttenuatedEuclidean => pairs
            .map(|(a, b)| b.abs() * a.abs() * (a - b) * (a - b))
            .sum::<f64>()
            .sqrt(),
    })
}

/// Distance from `x` to every codeword, in class order.
pub fn distances(spec: DecoderSpec, x: &OutputVector, matrix: &CodeMatrix) -> Result<Vec<f64>> {
    matrix.rows().iter().map(|row| distance(spec, &x.signs, row)).collect()
}

/// Class whose codeword is nearest to `x`; ties go to the smallest class id.
pub fn decode(spec: DecoderSpec, x: &OutputVector, matrix: &CodeMatrix) -> Result<ClassId> {
    let d = distances(spec, x, matrix)?;
    Ok(argmin(&d))
}

pub(crate) fn argmin(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v < values[best] {
            best = i;
        }
    }
    best
}
