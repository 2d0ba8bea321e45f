use pdc_core::data::{load_csv, Preprocessor};
use pdc_core::{EstimatorSpec, FittedEstimator, ModelFile};

use crate::args::{FitArgs, Switch};
use crate::error::CliResult;
use crate::manifest::{fingerprint, unix_now, RunManifest};
use crate::output::manifest_path_for;

pub fn run(args: &FitArgs, threads: Option<usize>) -> CliResult<()> {
    let started = unix_now();
    let hints = args.data_args.hints()?;
    let learner = args.learner.spec()?;
    let raw = load_csv(&args.data, args.data_args.target.as_deref(), &hints)?;
    let pre = Preprocessor::fit(&raw)?;
    let data = pre.transform(&raw)?;
    let spec = match args.pdc {
        Switch::On => EstimatorSpec::Pdc {
            learner,
            config: args.pdc_args.config(args.learner.seed),
        },
        Switch::Off => EstimatorSpec::Baseline { learner },
    };
    let model = spec.fit(&data)?;
    match &model {
        FittedEstimator::Pdc(m) => eprintln!(
            "fitted {} on {} rows: {} classes, {} anchors",
            spec.name(),
            data.len(),
            m.n_classes(),
            m.n_anchors()
        ),
        FittedEstimator::Baseline { class_names, .. } => {
            eprintln!(
                "fitted {} on {} rows: {} classes",
                spec.name(),
                data.len(),
                class_names.len()
            )
        }
    }
    ModelFile::new(pre, model).save(&args.out)?;

    let mut manifest = RunManifest::new("fit", args, threads, Some(args.learner.seed), started);
    manifest.inputs.push(fingerprint(&args.data)?);
    manifest.outputs.push(args.out.display().to_string());
    manifest.write(&manifest_path_for(&args.out))
}
