use pdc_core::data::{load_csv, SchemaHints};
use pdc_core::eval::{run_cv, CvConfig};
use pdc_core::learners::{ForestParams, TreeParams};
use pdc_core::{EstimatorSpec, LearnerSpec, ModelFile, PdcConfig, Preprocessor};

fn iris() -> pdc_core::RawDataset {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/benchmark/public_iris.csv");
    load_csv(&path, None, &SchemaHints::new()).unwrap()
}

#[test]
fn saved_model_predicts_bit_for_bit() {
    let raw = iris();
    let pre = Preprocessor::fit(&raw).unwrap();
    let data = pre.transform(&raw).unwrap();
    let spec = EstimatorSpec::Pdc {
        learner: LearnerSpec::Forest(ForestParams {
            n_trees: 5,
            seed: 9,
            ..Default::default()
        }),
        config: PdcConfig::default(),
    };
    let model = spec.fit(&data).unwrap();
    let before = model.predict_proba(&data.x).unwrap();

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.json");
    ModelFile::new(pre, model).save(&path).unwrap();
    let loaded = ModelFile::load(&path).unwrap();
    let x = loaded.preprocessor.transform_features(&raw).unwrap();
    let after = loaded.model.predict_proba(&x).unwrap();
    assert_eq!(before, after);
}

#[test]
fn cross_validation_is_reproducible() {
    let raw = iris();
    let spec = EstimatorSpec::Pdc {
        learner: LearnerSpec::Tree(TreeParams::default()),
        config: PdcConfig::default(),
    };
    let cfg = CvConfig {
        folds: 3,
        repeats: 2,
        seed: 5,
        stratified: true,
        inner_folds: None,
    };
    let a = run_cv(&raw, &spec, &cfg).unwrap();
    let b = run_cv(&raw, &spec, &cfg).unwrap();
    assert_eq!(a.len(), 6);
    for (x, y) in a.iter().zip(&b) {
        assert_eq!((x.repeat, x.fold, x.n_test), (y.repeat, y.fold, y.n_test));
        assert_eq!(x.test_macro_f1.to_bits(), y.test_macro_f1.to_bits());
        assert_eq!(x.per_class_f1, y.per_class_f1);
    }
    assert!(a.iter().all(|r| r.test_macro_f1 > 0.8));
}
