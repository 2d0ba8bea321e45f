use std::fs::File;
use std::io::Write;

use rayon::prelude::*;

use pdc_core::data::{read_csv_unlabeled, SchemaHints};
use pdc_core::pdc::argmax;
use pdc_core::{ModelFile, UncertaintyReport};

use crate::args::PredictArgs;
use crate::error::{CliError, CliResult};
use crate::manifest::{fingerprint, unix_now, RunManifest};
use crate::output::{fmt9, manifest_path_for};

pub fn run(args: &PredictArgs, threads: Option<usize>) -> CliResult<()> {
    let started = unix_now();
    let file = ModelFile::load(&args.model)?;
    let model = &file.model;
    let pdc = match (args.uncertainty, model.as_pdc()) {
        (true, None) => {
            return Err(CliError::Usage(
                "--uncertainty needs a pairwise model (fit with --pdc on)".into(),
            ))
        }
        (_, m) => m,
    };
    let input = File::open(&args.data).map_err(|e| CliError::io(&args.data, e))?;
    let raw = read_csv_unlabeled(input, &file.preprocessor.target_column, &SchemaHints::new())?;
    let x = file.preprocessor.transform_features(&raw)?;
    let proba = model.predict_proba(&x)?;
    let uncertainty: Vec<UncertaintyReport> = match (args.uncertainty, pdc) {
        (true, Some(m)) => (0..x.rows())
            .into_par_iter()
            .map(|i| m.uncertainty(x.row(i)))
            .collect::<Result<_, _>>()?,
        _ => Vec::new(),
    };

    let sink: Box<dyn Write> = match &args.out {
        Some(p) => Box::new(File::create(p).map_err(|e| CliError::io(p, e))?),
        None => Box::new(std::io::stdout().lock()),
    };
    let mut w = csv::Writer::from_writer(sink);
    let classes = model.class_names();
    let mut header = vec!["prediction".to_string()];
    if args.proba {
        header.extend(classes.iter().map(|c| format!("p_{c}")));
    }
    if args.uncertainty {
        header.extend(["total_uncertainty", "aleatoric_uncertainty", "epistemic_uncertainty"].map(String::from));
    }
    w.write_record(&header)?;
    for (i, p) in proba.iter_rows().enumerate() {
        let mut rec = vec![classes[argmax(p)].clone()];
        if args.proba {
            rec.extend(p.iter().map(|&v| fmt9(v)));
        }
        if let Some(u) = uncertainty.get(i) {
            rec.extend([u.total, u.aleatoric, u.epistemic].map(fmt9));
        }
        w.write_record(&rec)?;
    }
    w.flush()
        .map_err(|e| CliError::io(args.out.clone().unwrap_or_else(|| "<stdout>".into()), e))?;

    if let Some(out) = &args.out {
        let mut manifest = RunManifest::new("predict", args, threads, None, started);
        manifest.inputs.push(fingerprint(&args.model)?);
        manifest.inputs.push(fingerprint(&args.data)?);
        manifest.outputs.push(out.display().to_string());
        manifest.write(&manifest_path_for(out))?;
    }
    Ok(())
}
