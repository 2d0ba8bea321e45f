use serde::Serialize;

use pdc_core::data::load_csv;
use pdc_core::eval::{run_anchor_experiment, AnchorCurve, AnchorExperiment};

use crate::args::AnchorsArgs;
use crate::error::{CliError, CliResult};
use crate::manifest::{fingerprint, unix_now, RunManifest, SCHEMA_VERSION};
use crate::output::{csv_file, ensure_dir, fmt9, write_json};

#[derive(Serialize)]
struct FitReport<'a> {
    schema_version: u32,
    dataset: String,
    case: Option<&'static str>,
    #[serde(flatten)]
    curve: &'a AnchorCurve,
}

pub fn run(args: &AnchorsArgs, threads: Option<usize>) -> CliResult<()> {
    let started = unix_now();
    if args.repeats == 0 {
        return Err(CliError::Usage("--repeats must be >= 1".into()));
    }
    if args.holdout_folds < 2 {
        return Err(CliError::Usage("--holdout-folds must be >= 2".into()));
    }
    let hints = args.data_args.hints()?;
    let raw = load_csv(&args.data, args.data_args.target.as_deref(), &hints)?;
    let exp = AnchorExperiment {
        learner: args.learner.spec()?,
        config: args.pdc_args.config(args.learner.seed),
        baseline: None,
        sizes: args.sizes.clone(),
        repeats: args.repeats,
        holdout_folds: args.holdout_folds,
        seed: args.learner.seed,
    };
    let curve = run_anchor_experiment(&raw, &exp)?;

    ensure_dir(&args.out_dir)?;
    let curve_path = args.out_dir.join("curve.csv");
    let fit_path = args.out_dir.join("fit.json");
    let mut w = csv_file(&curve_path)?;
    w.write_record(["anchors", "mean_loss", "sem", "fitted_loss"])?;
    for ((&a, &l), &s) in curve.sizes.iter().zip(&curve.mean_loss).zip(&curve.sem_loss) {
        w.write_record([a.to_string(), fmt9(l), fmt9(s), fmt9(curve.fit.predict(a as f64))])?;
    }
    w.flush().map_err(|e| CliError::io(&curve_path, e))?;
    write_json(
        &fit_path,
        &FitReport {
            schema_version: SCHEMA_VERSION,
            dataset: args.data.display().to_string(),
            case: curve.case.map(|c| c.label()),
            curve: &curve,
        },
    )?;

    println!(
        "L(A) = {:.4} + {:.4} / sqrt(A)   single-anchor loss {:.4}   full loss {:.4}",
        curve.fit.a, curve.fit.b, curve.gamma_loss, curve.pdc_loss
    );
    if let (Some(b), Some(case)) = (curve.baseline_loss, curve.case) {
        print!("baseline loss {b:.4}   case {}", case.label());
        match curve.crossover {
            Some(a) => println!("   crossover at A ~ {a:.1}"),
            None => println!(),
        }
    }

    let mut manifest = RunManifest::new("anchors", args, threads, Some(args.learner.seed), started);
    manifest.inputs.push(fingerprint(&args.data)?);
    manifest.outputs = vec![curve_path.display().to_string(), fit_path.display().to_string()];
    manifest.write(&args.out_dir.join("manifest.json"))
}
