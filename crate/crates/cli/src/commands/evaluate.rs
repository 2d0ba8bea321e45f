use std::path::Path;

use serde::Serialize;

use pdc_core::data::{load_csv, RawDataset};
use pdc_core::eval::cv::encode_labels;
use pdc_core::eval::stats::{mean, sem};
use pdc_core::eval::{compare, overfit_report, run_cv, ComparisonReport, CvConfig, FoldResult, OverfitReport};
use pdc_core::{EstimatorSpec, LearnerSpec, PdcConfig};

use crate::args::{EvaluateArgs, Switch};
use crate::error::CliResult;
use crate::manifest::{fingerprint, unix_now, RunManifest, SCHEMA_VERSION};
use crate::output::{csv_file, ensure_dir, fmt9, write_json};

#[derive(Debug, Clone, Serialize)]
pub struct ScoreSummary {
    pub estimator: String,
    pub test_mean: f64,
    pub test_sem: f64,
    pub train_mean: f64,
}

impl ScoreSummary {
    fn of(name: String, results: &[FoldResult]) -> Self {
        let test: Vec<f64> = results.iter().map(|r| r.test_macro_f1).collect();
        let train: Vec<f64> = results.iter().map(|r| r.train_macro_f1).collect();
        ScoreSummary {
            estimator: name,
            test_mean: mean(&test),
            test_sem: sem(&test),
            train_mean: mean(&train),
        }
    }
}

/// Cross-validation of a baseline and optionally its pairwise wrapper on
/// shared folds.
pub struct Evaluation {
    pub class_names: Vec<String>,
    pub base: Vec<FoldResult>,
    pub base_summary: ScoreSummary,
    pub pdc: Option<(Vec<FoldResult>, ScoreSummary)>,
    pub comparison: Option<ComparisonReport>,
    pub overfit: Option<OverfitReport>,
}

pub struct EvalSettings<'a> {
    pub learner: &'a LearnerSpec,
    pub pdc: Option<&'a PdcConfig>,
    pub cv: &'a CvConfig,
    pub alpha: f64,
    pub paired: bool,
}

pub fn evaluate(raw: &RawDataset, s: &EvalSettings) -> CliResult<Evaluation> {
    let (_, class_names) = encode_labels(&raw.labels());
    let base_spec = EstimatorSpec::Baseline {
        learner: s.learner.clone(),
    };
    let base = run_cv(raw, &base_spec, s.cv)?;
    let base_summary = ScoreSummary::of(base_spec.name(), &base);
    let (pdc, comparison, overfit) = match s.pdc {
        None => (None, None, None),
        Some(config) => {
            let spec = EstimatorSpec::Pdc {
                learner: s.learner.clone(),
                config: config.clone(),
            };
            let results = run_cv(raw, &spec, s.cv)?;
            let cmp = compare(&base, &results, s.alpha, s.paired)?;
            let gap = overfit_report(&base, &results, s.alpha)?;
            let summary = ScoreSummary::of(spec.name(), &results);
            (Some((results, summary)), Some(cmp), Some(gap))
        }
    };
    Ok(Evaluation {
        class_names,
        base,
        base_summary,
        pdc,
        comparison,
        overfit,
    })
}

/// One row per (estimator, repeat, fold). Wall times are left out so the
/// file is reproducible.
pub fn write_folds_csv(path: &Path, ev: &Evaluation) -> CliResult<()> {
    let mut w = csv_file(path)?;
    let mut header: Vec<String> = [
        "estimator",
        "repeat",
        "fold",
        "n_train",
        "n_test",
        "train_macro_f1",
        "test_macro_f1",
    ]
    .map(String::from)
    .to_vec();
    header.extend(ev.class_names.iter().map(|c| format!("f1_{c}")));
    let mut sets = vec![(&ev.base_summary.estimator, &ev.base)];
    if let Some((r, s)) = &ev.pdc {
        sets.push((&s.estimator, r));
    }
    let tuned = sets.iter().any(|(_, rs)| rs.iter().any(|r| r.selected.is_some()));
    if tuned {
        header.push("selected".into());
    }
    w.write_record(&header)?;
    for (name, results) in sets {
        for r in results {
            let mut rec = vec![
                name.clone(),
                r.repeat.to_string(),
                r.fold.to_string(),
                r.n_train.to_string(),
                r.n_test.to_string(),
                fmt9(r.train_macro_f1),
                fmt9(r.test_macro_f1),
            ];
            rec.extend(r.per_class_f1.iter().map(|&v| fmt9(v)));
            if tuned {
                rec.push(
                    r.selected
                        .as_ref()
                        .map(serde_json::to_string)
                        .transpose()?
                        .unwrap_or_default(),
                );
            }
            w.write_record(&rec)?;
        }
    }
    w.flush().map_err(|e| crate::error::CliError::io(path, e))
}

pub fn timing(ev: &Evaluation) -> serde_json::Value {
    let side = |r: &[FoldResult]| {
        serde_json::json!({
            "fit_seconds_mean": mean(&r.iter().map(|f| f.fit_seconds).collect::<Vec<_>>()),
            "predict_seconds_mean": mean(&r.iter().map(|f| f.predict_seconds).collect::<Vec<_>>()),
        })
    };
    serde_json::json!({
        "base": side(&ev.base),
        "pdc": ev.pdc.as_ref().map(|(r, _)| side(r)),
    })
}

#[derive(Serialize)]
struct Summary<'a> {
    schema_version: u32,
    dataset: String,
    n_rows: usize,
    class_names: &'a [String],
    cv: &'a CvConfig,
    base: &'a ScoreSummary,
    pdc: Option<&'a ScoreSummary>,
    comparison: Option<&'a ComparisonReport>,
    overfit: Option<&'a OverfitReport>,
}

pub fn run(args: &EvaluateArgs, threads: Option<usize>) -> CliResult<()> {
    let started = unix_now();
    let hints = args.data_args.hints()?;
    let learner = args.learner.spec()?;
    let cv = args.cv.config(args.learner.seed)?;
    let pdc_config = args.pdc_args.config(args.learner.seed);
    let raw = load_csv(&args.data, args.data_args.target.as_deref(), &hints)?;
    let ev = evaluate(
        &raw,
        &EvalSettings {
            learner: &learner,
            pdc: (args.pdc_compare == Switch::On).then_some(&pdc_config),
            cv: &cv,
            alpha: args.cv.alpha,
            paired: args.cv.paired,
        },
    )?;

    ensure_dir(&args.out_dir)?;
    let folds_path = args.out_dir.join("folds.csv");
    let summary_path = args.out_dir.join("summary.json");
    write_folds_csv(&folds_path, &ev)?;
    write_json(
        &summary_path,
        &Summary {
            schema_version: SCHEMA_VERSION,
            dataset: args.data.display().to_string(),
            n_rows: raw.len(),
            class_names: &ev.class_names,
            cv: &cv,
            base: &ev.base_summary,
            pdc: ev.pdc.as_ref().map(|(_, s)| s),
            comparison: ev.comparison.as_ref(),
            overfit: ev.overfit.as_ref(),
        },
    )?;

    let b = &ev.base_summary;
    println!("{:<24} {:.4} +- {:.4}", b.estimator, b.test_mean, b.test_sem);
    if let (Some((_, p)), Some(c)) = (&ev.pdc, &ev.comparison) {
        println!("{:<24} {:.4} +- {:.4}", p.estimator, p.test_mean, p.test_sem);
        println!(
            "delta_f1 {:+.4}  p = {:.4}  {:?}{}",
            c.delta_f1,
            c.p_value,
            c.outcome,
            if c.significant { " (significant)" } else { "" }
        );
    }

    let mut manifest = RunManifest::new("evaluate", args, threads, Some(args.learner.seed), started);
    manifest.inputs.push(fingerprint(&args.data)?);
    manifest.outputs = vec![folds_path.display().to_string(), summary_path.display().to_string()];
    manifest.timing = Some(timing(&ev));
    manifest.write(&args.out_dir.join("manifest.json"))
}
