use std::path::{Path, PathBuf};

use log::warn;
use serde::Serialize;

use pdc_core::data::{load_csv, SchemaHints};
use pdc_core::eval::{ComparisonReport, CvConfig, WinTally};

use super::evaluate::{evaluate, EvalSettings};
use crate::args::BenchmarkArgs;
use crate::error::{CliError, CliResult};
use crate::manifest::{fingerprint, unix_now, Fingerprint, RunManifest, SCHEMA_VERSION};
use crate::output::{csv_file, ensure_dir, fmt9, write_json};

#[derive(Debug, Serialize)]
struct DatasetRow {
    dataset: String,
    n_rows: usize,
    n_classes: usize,
    comparison: ComparisonReport,
}

#[derive(Debug, Serialize)]
struct Failure {
    dataset: String,
    error_class: &'static str,
    error: String,
}

#[derive(Serialize)]
struct Summary<'a> {
    schema_version: u32,
    base: String,
    pdc: String,
    cv: &'a CvConfig,
    alpha: f64,
    paired: bool,
    tally: WinTally,
    datasets: &'a [DatasetRow],
    failures: &'a [Failure],
}

fn csv_files(dir: &Path) -> CliResult<Vec<PathBuf>> {
    let entries = std::fs::read_dir(dir).map_err(|e| CliError::io(dir, e))?;
    let mut out = Vec::new();
    for e in entries {
        let p = e.map_err(|e| CliError::io(dir, e))?.path();
        if p.is_file() && p.extension().is_some_and(|x| x.eq_ignore_ascii_case("csv")) {
            out.push(p);
        }
    }
    out.sort();
    Ok(out)
}

fn stem(p: &Path) -> String {
    p.file_stem()
        .map_or_else(|| p.display().to_string(), |s| s.to_string_lossy().into_owned())
}

pub fn run(args: &BenchmarkArgs, threads: Option<usize>) -> CliResult<()> {
    let started = unix_now();
    let learner = args.learner.spec()?;
    let cv = args.cv.config(args.learner.seed)?;
    let pdc_config = args.pdc_args.config(args.learner.seed);
    let files = csv_files(&args.dir)?;
    if files.is_empty() {
        warn!("no CSV files in {}", args.dir.display());
    }

    let settings = EvalSettings {
        learner: &learner,
        pdc: Some(&pdc_config),
        cv: &cv,
        alpha: args.cv.alpha,
        paired: args.cv.paired,
    };
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    let mut inputs: Vec<Fingerprint> = Vec::new();
    for path in &files {
        let name = stem(path);
        inputs.push(fingerprint(path)?);
        let result = load_csv(path, None, &SchemaHints::new())
            .map_err(CliError::from)
            .and_then(|raw| Ok((raw.len(), evaluate(&raw, &settings)?)));
        match result {
            Ok((n_rows, ev)) => {
                let comparison = ev.comparison.expect("pdc side requested");
                eprintln!(
                    "{name:<32} base {:.4} +- {:.4}  pdc {:.4} +- {:.4}  {:?}",
                    comparison.base_mean,
                    comparison.base_sem,
                    comparison.pdc_mean,
                    comparison.pdc_sem,
                    comparison.outcome
                );
                rows.push(DatasetRow {
                    dataset: name,
                    n_rows,
                    n_classes: ev.class_names.len(),
                    comparison,
                });
            }
            Err(e) => {
                warn!("{name}: {e}");
                failures.push(Failure {
                    dataset: name,
                    error_class: e.class().as_str(),
                    error: e.to_string(),
                });
            }
        }
    }
    let tally = WinTally::from_reports(rows.iter().map(|r| &r.comparison));

    ensure_dir(&args.out_dir)?;
    let table_path = args.out_dir.join("benchmark.csv");
    let summary_path = args.out_dir.join("summary.json");
    let mut w = csv_file(&table_path)?;
    w.write_record([
        "dataset",
        "status",
        "n_rows",
        "n_classes",
        "base_mean",
        "base_sem",
        "pdc_mean",
        "pdc_sem",
        "delta_f1",
        "outcome",
        "significant",
        "p_value",
        "error",
    ])?;
    for r in &rows {
        let c = &r.comparison;
        w.write_record([
            r.dataset.clone(),
            "ok".into(),
            r.n_rows.to_string(),
            r.n_classes.to_string(),
            fmt9(c.base_mean),
            fmt9(c.base_sem),
            fmt9(c.pdc_mean),
            fmt9(c.pdc_sem),
            fmt9(c.delta_f1),
            serde_json::to_value(c.outcome)?
                .as_str()
                .unwrap_or_default()
                .to_string(),
            c.significant.to_string(),
            fmt9(c.p_value),
            String::new(),
        ])?;
    }
    for f in &failures {
        let mut rec = vec![f.dataset.clone(), "failed".into()];
        rec.extend(std::iter::repeat_n(String::new(), 10));
        rec.push(f.error.clone());
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| CliError::io(&table_path, e))?;
    write_json(
        &summary_path,
        &Summary {
            schema_version: SCHEMA_VERSION,
            base: learner.name(),
            pdc: format!("PDC({})", learner.name()),
            cv: &cv,
            alpha: args.cv.alpha,
            paired: args.cv.paired,
            tally,
            datasets: &rows,
            failures: &failures,
        },
    )?;
    println!(
        "{} datasets, {} failed: wins {} (significant {}), losses {} (significant {}), ties {}",
        rows.len(),
        failures.len(),
        tally.wins,
        tally.significant_wins,
        tally.losses,
        tally.significant_losses,
        tally.ties
    );

    let mut manifest = RunManifest::new("benchmark", args, threads, Some(args.learner.seed), started);
    manifest.inputs = inputs;
    manifest.outputs = vec![table_path.display().to_string(), summary_path.display().to_string()];
    manifest.write(&args.out_dir.join("manifest.json"))
}
