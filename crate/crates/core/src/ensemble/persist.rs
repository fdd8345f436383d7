use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::EcocEnsemble;
use crate::coding::{read_matrix, write_matrix};
use crate::dataset::ScalingParams;
use crate::decoding::DecoderSpec;
use crate::error::{EcocError, Result};
use crate::svm::{BinaryModel, MODEL_FORMAT_VERSION};
use crate::util::write_atomic;

pub const MANIFEST_VERSION: u32 = 1;

const MATRIX_FILE: &str = "matrix";
const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: u32,
    pub model_format_version: u32,
    pub tool_version: String,
    pub decoder: DecoderSpec,
    pub scaling: ScalingParams,
    /// External label of row `i`.
    pub classes: Vec<String>,
    pub strategy: String,
    pub n_columns: usize,
    pub seed: Option<u64>,
    pub non_converged_columns: Vec<usize>,
}

fn model_file(j: usize) -> String {
    format!("model_{j}.json")
}

/// Writes `matrix`, one `model_<j>.json` per column and `manifest.json`
/// into `dir`, creating it if needed. The manifest is written last.
pub fn save_ensemble(ensemble: &EcocEnsemble, dir: &Path, seed: Option<u64>) -> Result<Manifest> {
    fs::create_dir_all(dir).map_err(|e| EcocError::io(dir, e))?;
    write_matrix(&ensemble.matrix, &dir.join(MATRIX_FILE))?;
    for (j, model) in ensemble.models.iter().enumerate() {
        write_atomic(&dir.join(model_file(j)), model.to_json().as_bytes())?;
    }
    let manifest = Manifest {
        version: MANIFEST_VERSION,
        model_format_version: MODEL_FORMAT_VERSION,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        decoder: ensemble.decoder,
        scaling: ensemble.scaling.clone(),
        classes: ensemble.classes.clone(),
        strategy: ensemble.matrix.strategy().to_string(),
        n_columns: ensemble.matrix.n_columns(),
        seed,
        non_converged_columns: ensemble.non_converged_columns(),
    };
    let text = serde_json::to_string_pretty(&manifest).map_err(|e| EcocError::Format(e.to_string()))?;
    write_atomic(&dir.join(MANIFEST_FILE), text.as_bytes())?;
    Ok(manifest)
}

pub fn load_ensemble(dir: &Path) -> Result<(EcocEnsemble, Manifest)> {
    let path = dir.join(MANIFEST_FILE);
    let text = fs::read_to_string(&path).map_err(|e| EcocError::io(&path, e))?;
    let manifest: Manifest = serde_json::from_str(&text)
        .map_err(|e| EcocError::Format(format!("{}: {e}", path.display())))?;
    if manifest.version != MANIFEST_VERSION {
        return Err(EcocError::Format(format!(
            "{}: manifest version {} (expected {MANIFEST_VERSION})",
            path.display(),
            manifest.version
        )));
    }
    let matrix = read_matrix(&dir.join(MATRIX_FILE))?;
    if matrix.n_columns() != manifest.n_columns {
        return Err(EcocError::Format(format!(
            "manifest lists {} columns, matrix has {}",
            manifest.n_columns,
            matrix.n_columns()
        )));
    }
    let mut models = Vec::with_capacity(matrix.n_columns());
    for j in 0..matrix.n_columns() {
        let path = dir.join(model_file(j));
        let text = fs::read_to_string(&path).map_err(|e| EcocError::io(&path, e))?;
        let model = BinaryModel::from_json(&text).map_err(|e| EcocError::Column {
            column: j,
            message: e.to_string(),
        })?;
        let meta = matrix.column(j);
        if model.positive_classes != meta.positive || model.negative_classes != meta.negative {
            return Err(EcocError::Column {
                column: j,
                message: "model class sets disagree with the matrix".into(),
            });
        }
        models.push(model);
    }
    let ensemble = EcocEnsemble::new(
        matrix,
        models,
        manifest.decoder,
        manifest.scaling.clone(),
        manifest.classes.clone(),
    )?;
    Ok((ensemble, manifest))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coding::one_vs_one;
    use crate::dataset::Dataset;
    use crate::ensemble::train_ensemble;
    use crate::svm::SvmConfig;

    fn toy() -> Dataset {
        let rows = (0..30)
            .map(|i| {
                let c = (i % 3) as f64;
                vec![c * 3.0 + 0.1 * (i as f64).sin(), -c + 0.1 * (i as f64).cos()]
            })
            .collect();
        let labels = (0..30).map(|i| ["x", "y", "z"][i % 3].to_string()).collect();
        Dataset::from_rows("toy", rows, labels).unwrap()
    }

    #[test]
    fn round_trip() {
        let data = toy();
        let ens = train_ensemble(&data, one_vs_one(3).unwrap(), &SvmConfig::default(), DecoderSpec::Hamming).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("ens");
        save_ensemble(&ens, &out, Some(4)).unwrap();
        for f in ["matrix", "manifest.json", "model_0.json", "model_1.json", "model_2.json"] {
            assert!(out.join(f).exists(), "{f}");
        }
        let (back, manifest) = load_ensemble(&out).unwrap();
        assert_eq!(back, ens);
        assert_eq!(manifest.seed, Some(4));
        for inst in data.instances() {
            assert_eq!(back.predict(&inst.features).unwrap(), ens.predict(&inst.features).unwrap());
        }
    }

    #[test]
    fn corrupt_manifest() {
        let data = toy();
        let ens = train_ensemble(&data, one_vs_one(3).unwrap(), &SvmConfig::default(), DecoderSpec::Hamming).unwrap();
        let dir = tempfile::tempdir().unwrap();
        save_ensemble(&ens, dir.path(), None).unwrap();
        fs::write(dir.path().join("manifest.json"), "{ not json").unwrap();
        assert!(matches!(load_ensemble(dir.path()), Err(EcocError::Format(_))));
        fs::remove_file(dir.path().join("manifest.json")).unwrap();
        assert!(matches!(load_ensemble(dir.path()), Err(EcocError::Io { .. })));
    }
}
