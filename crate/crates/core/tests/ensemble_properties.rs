use std::sync::Mutex;

use ecoc_core::coding::{one_vs_one, CodeMatrix, Strategy, WeightOrientation};
use ecoc_core::dataset::synth::{class_center, eight_gaussians};
use ecoc_core::dataset::{apply_scaling, fit_scaling, make_folds, Dataset};
use ecoc_core::decoding::{distance, DecoderSpec, OutputVector};
use ecoc_core::ensemble::{build_matching_code_for_data, train_columns, train_ensemble, EcocEnsemble};
use ecoc_core::learner::{BinaryClassifier, BinaryLearner};
use ecoc_core::svm::SvmConfig;
use ecoc_core::Result;

fn scaled(data: &Dataset) -> Dataset {
    apply_scaling(data, &fit_scaling(data).unwrap()).unwrap()
}

struct Size(usize);
impl BinaryClassifier for Size {
    fn decision(&self, _: &[f64]) -> Result<f64> {
        Ok(self.0 as f64)
    }
}

/// Records training-set sizes per fit.
struct Recorder(Mutex<Vec<usize>>);
impl BinaryLearner for Recorder {
    type Model = Size;
    fn fit(&self, p: &[&[f64]], n: &[&[f64]]) -> Result<Size> {
        self.0.lock().unwrap().push(p.len() + n.len());
        Ok(Size(p.len() + n.len()))
    }
}

#[test]
fn ovo_columns_train_on_two_classes() {
    let rows = (0..30).map(|i| vec![i as f64, (i % 3) as f64]).collect();
    let labels = (0..30).map(|i| format!("k{}", i % 3)).collect();
    let data = Dataset::from_rows("t", rows, labels).unwrap();
    let models = train_columns(&data, &one_vs_one(3).unwrap(), &Recorder(Mutex::new(vec![]))).unwrap();
    assert_eq!(models.iter().map(|m| m.0).collect::<Vec<_>>(), [20, 20, 20]);
}

#[test]
fn matching_code_depends_only_on_the_training_part() {
    let data = eight_gaussians(25, 0.3, 8).unwrap();
    let plan = make_folds(&data, 5, 1, true).unwrap();
    let cfg = SvmConfig::default();
    let train = data.subset(&plan.train_indices(0));
    let a = build_matching_code_for_data(&scaled(&train), &cfg, 3, 2, WeightOrientation::Perf).unwrap();
    let b = build_matching_code_for_data(&scaled(&train), &cfg, 3, 2, WeightOrientation::Perf).unwrap();
    assert_eq!(a, b);
    // the same training part taken from a dataset whose test part was moved
    let mut moved = data.instances().to_vec();
    for i in plan.test_indices(0) {
        moved[i].features = vec![100.0, -100.0];
    }
    let moved = Dataset::from_parts("moved", 2, data.classes().to_vec(), moved).unwrap();
    let c = build_matching_code_for_data(&scaled(&moved.subset(&plan.train_indices(0))), &cfg, 3, 2, WeightOrientation::Perf)
        .unwrap();
    assert_eq!(a.matrix, c.matrix);
}

#[test]
fn dropping_a_column_equals_skipping_its_coordinate() {
    let data = eight_gaussians(15, 0.5, 3).unwrap();
    let ens = train_ensemble(&data, Strategy::Ovo.build_fixed(8, 0).unwrap(), &SvmConfig::default(), DecoderSpec::AttenuatedEuclidean)
        .unwrap();
    for j in [0, 13, 27] {
        let matrix: CodeMatrix = ens.matrix.without_column(j).unwrap();
        let mut models = ens.models.clone();
        models.remove(j);
        let short = EcocEnsemble::new(matrix, models, ens.decoder, ens.scaling.clone(), ens.classes.clone()).unwrap();
        for inst in data.instances().iter().step_by(7) {
            let (_, d_short) = short.predict_with_distances(&inst.features).unwrap();
            let full = ens.outputs(&inst.features).unwrap();
            let mut signs = full.signs.clone();
            signs.remove(j);
            let skipped = OutputVector::from_signs(signs);
            for (c, &d) in d_short.iter().enumerate() {
                let mut row = ens.matrix.codeword(c).to_vec();
                row.remove(j);
                assert_eq!(d, distance(ens.decoder, &skipped.signs, &row).unwrap());
            }
        }
    }
}

#[test]
fn trained_matching_code_finds_cluster_centers() {
    let data = eight_gaussians(60, 0.2, 11).unwrap();
    let cfg = SvmConfig::default();
    let code = build_matching_code_for_data(&scaled(&data), &cfg, 5, 4, WeightOrientation::Perf).unwrap();
    assert_eq!(code.matrix.n_columns(), 7);
    let ens = train_ensemble(&data, code.matrix, &cfg, DecoderSpec::AttenuatedEuclidean).unwrap();
    for class in 0..8 {
        let x = class_center(class);
        assert_eq!(ens.predict_label(&x).unwrap(), (class + 1).to_string());
        assert_eq!(ens.predict(&x).unwrap(), ens.predict(&x).unwrap());
    }
    assert!(ens.predict(&[0.0]).is_err());
}
