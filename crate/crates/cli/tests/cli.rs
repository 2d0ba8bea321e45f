use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn pdc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pdc"))
        .args(args)
        .env_remove("PDC_THREADS")
        .output()
        .expect("spawn pdc")
}

fn iris() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/benchmark/public_iris.csv")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn read_csv(p: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(p).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

fn small_eval_csv(dir: &Path) -> PathBuf {
    let p = dir.join("small.csv");
    let mut text = String::from("a,b,y\n");
    for i in 0..30 {
        let (a, b) = (i as f64 * 0.1, (i % 7) as f64);
        text.push_str(&format!("{a},{b},{}\n", if i % 2 == 0 { "u" } else { "v" }));
    }
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn fit_then_predict_with_probabilities_and_uncertainty() {
    let tmp = TempDir::new().unwrap();
    let model = tmp.path().join("model.json");
    let o = pdc(&["fit", s(&iris()), "--out", s(&model), "--seed", "3"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(tmp.path().join("model.manifest.json").exists());

    let out = tmp.path().join("pred.csv");
    let o = pdc(&[
        "predict",
        s(&model),
        s(&iris()),
        "--proba",
        "--uncertainty",
        "--out",
        s(&out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (header, rows) = read_csv(&out);
    assert_eq!(
        header,
        [
            "prediction",
            "p_setosa",
            "p_versicolor",
            "p_virginica",
            "total_uncertainty",
            "aleatoric_uncertainty",
            "epistemic_uncertainty"
        ]
    );
    assert_eq!(rows.len(), 150);
    for r in &rows {
        let p: Vec<f64> = r[1..4].iter().map(|v| v.parse().unwrap()).collect();
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-6);
        let (tu, au, eu): (f64, f64, f64) = (r[4].parse().unwrap(), r[5].parse().unwrap(), r[6].parse().unwrap());
        assert!(eu >= -1e-9 && (tu - au - eu).abs() < 1e-6);
    }
    assert!(tmp.path().join("pred.manifest.json").exists());
}

#[test]
fn baseline_model_predicts_but_refuses_uncertainty() {
    let tmp = TempDir::new().unwrap();
    let model = tmp.path().join("base.json");
    let o = pdc(&["fit", s(&iris()), "--pdc", "off", "--out", s(&model)]);
    assert!(o.status.success(), "{}", stderr(&o));

    let o = pdc(&["predict", s(&model), s(&iris())]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().count(), 151);
    assert_eq!(text.lines().next(), Some("prediction"));

    let o = pdc(&["predict", s(&model), s(&iris()), "--uncertainty"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("error[usage]"));
}

#[test]
fn unknown_base_learner_is_a_usage_error() {
    let tmp = TempDir::new().unwrap();
    let o = pdc(&[
        "fit",
        s(&iris()),
        "--base",
        "svm",
        "--out",
        s(&tmp.path().join("m.json")),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn header_only_input_gives_header_only_output() {
    let tmp = TempDir::new().unwrap();
    let model = tmp.path().join("m.json");
    assert!(pdc(&["fit", s(&iris()), "--out", s(&model)]).status.success());
    let empty = tmp.path().join("empty.csv");
    std::fs::write(&empty, "sepal_length,sepal_width,petal_length,petal_width\n").unwrap();
    let o = pdc(&["predict", s(&model), s(&empty), "--proba"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(
        String::from_utf8(o.stdout).unwrap().trim_end(),
        "prediction,p_setosa,p_versicolor,p_virginica"
    );
}

#[test]
fn schema_mismatch_names_the_missing_column() {
    let tmp = TempDir::new().unwrap();
    let model = tmp.path().join("m.json");
    assert!(pdc(&["fit", s(&iris()), "--out", s(&model)]).status.success());
    let bad = tmp.path().join("bad.csv");
    std::fs::write(&bad, "sepal_length,sepal_width,petal_width\n5.0,3.0,0.2\n").unwrap();
    let o = pdc(&["predict", s(&model), s(&bad)]);
    assert_eq!(o.status.code(), Some(3));
    let err = stderr(&o);
    assert!(err.starts_with("error[data]") && err.contains("petal_length"), "{err}");
}

#[test]
fn evaluate_writes_one_row_per_fold_and_estimator() {
    let tmp = TempDir::new().unwrap();
    let data = small_eval_csv(tmp.path());
    let out = tmp.path().join("eval");
    let o = pdc(&[
        "evaluate",
        s(&data),
        "--folds",
        "2",
        "--repeats",
        "1",
        "--alpha",
        "1.0",
        "--out-dir",
        s(&out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (header, rows) = read_csv(&out.join("folds.csv"));
    assert_eq!(&header[..3], ["estimator", "repeat", "fold"]);
    assert_eq!(&header[7..], ["f1_u", "f1_v"]);
    assert_eq!(rows.iter().filter(|r| r[0] == "DecisionTree").count(), 2);
    assert_eq!(rows.iter().filter(|r| r[0] == "PDC(DecisionTree)").count(), 2);

    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["comparison"]["alpha"], 1.0);
    assert_eq!(summary["comparison"]["n_runs"], 2);
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["command"], "evaluate");
    assert_eq!(manifest["inputs"][0]["content_hash"].as_str().unwrap().len(), 16);
}

#[test]
fn evaluate_defaults_to_five_by_five() {
    let tmp = TempDir::new().unwrap();
    let data = small_eval_csv(tmp.path());
    let out = tmp.path().join("eval");
    let o = pdc(&["evaluate", s(&data), "--pdc-compare", "off", "--out-dir", s(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (_, rows) = read_csv(&out.join("folds.csv"));
    assert_eq!(rows.len(), 25);
    assert!(rows.iter().all(|r| r[0] == "DecisionTree"));
}

#[test]
fn evaluate_rejects_bad_cv_settings() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("eval");
    let o = pdc(&["evaluate", s(&iris()), "--folds", "1", "--out-dir", s(&out)]);
    assert_eq!(o.status.code(), Some(2));
    let o = pdc(&["evaluate", s(&iris()), "--alpha", "0", "--out-dir", s(&out)]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn anchors_writes_curve_and_fit() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("anchors");
    let o = pdc(&[
        "anchors",
        s(&iris()),
        "--sizes",
        "2,4,8",
        "--repeats",
        "5",
        "--out-dir",
        s(&out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (header, rows) = read_csv(&out.join("curve.csv"));
    assert_eq!(header, ["anchors", "mean_loss", "sem", "fitted_loss"]);
    let sizes: Vec<usize> = rows.iter().map(|r| r[0].parse().unwrap()).collect();
    assert_eq!(sizes[..4], [1, 2, 4, 8]);
    assert_eq!(*sizes.last().unwrap(), 100);
    let fit: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("fit.json")).unwrap()).unwrap();
    assert!(fit["fit"]["a"].is_number() && fit["fit"]["b"].is_number());
    assert!(out.join("manifest.json").exists());
}

#[test]
fn benchmark_on_empty_directory_succeeds() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path().join("none");
    std::fs::create_dir(&dir).unwrap();
    let out = tmp.path().join("out");
    let o = pdc(&["benchmark", s(&dir), "--out-dir", s(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (_, rows) = read_csv(&out.join("benchmark.csv"));
    assert!(rows.is_empty());
}

#[test]
fn benchmark_records_failures_and_continues() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path().join("sets");
    std::fs::create_dir(&dir).unwrap();
    std::fs::copy(small_eval_csv(tmp.path()), dir.join("a_good.csv")).unwrap();
    std::fs::write(dir.join("b_bad.csv"), "x,y\n1.0,u\n2.0\n3.0,v,extra\n").unwrap();
    let out = tmp.path().join("out");
    let o = pdc(&[
        "benchmark",
        s(&dir),
        "--folds",
        "2",
        "--repeats",
        "1",
        "--out-dir",
        s(&out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (_, rows) = read_csv(&out.join("benchmark.csv"));
    assert_eq!(rows.len(), 2);
    assert_eq!((rows[0][0].as_str(), rows[0][1].as_str()), ("a_good", "ok"));
    assert_eq!((rows[1][0].as_str(), rows[1][1].as_str()), ("b_bad", "failed"));
    assert!(!rows[1][12].is_empty());
}

#[test]
fn inner_search_adds_the_selected_learner_column() {
    let tmp = TempDir::new().unwrap();
    let data = small_eval_csv(tmp.path());
    let out = tmp.path().join("eval");
    let o = pdc(&[
        "evaluate",
        s(&data),
        "--base",
        "knn",
        "--folds",
        "2",
        "--repeats",
        "1",
        "--inner-search",
        "2",
        "--out-dir",
        s(&out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (header, rows) = read_csv(&out.join("folds.csv"));
    assert_eq!(header.last().map(String::as_str), Some("selected"));
    for r in &rows {
        let chosen: serde_json::Value = serde_json::from_str(r.last().unwrap()).unwrap();
        assert_eq!(chosen["type"], "knn", "{chosen}");
        assert!([1, 3, 5, 7].contains(&chosen["k"].as_u64().unwrap()));
    }
    let o = pdc(&["evaluate", s(&data), "--inner-search", "1", "--out-dir", s(&out)]);
    assert_eq!(o.status.code(), Some(2));
}
