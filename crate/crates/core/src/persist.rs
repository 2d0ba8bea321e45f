//! Versioned JSON model files.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::data::Preprocessor;
use crate::error::{Error, Result};
use crate::estimator::FittedEstimator;

pub const MODEL_FORMAT: &str = "pdc-model";
pub const MODEL_VERSION: u32 = 1;

/// Serializes an `f64` through its shortest round-trip decimal string, so
/// values such as split thresholds survive any JSON reader intact.
pub mod f64_string {
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(v)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(D::Error::custom)
    }
}

/// Everything needed to score raw rows: the fitted preprocessor and the
/// fitted estimator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub format: String,
    pub version: u32,
    pub preprocessor: Preprocessor,
    pub model: FittedEstimator,
}

impl ModelFile {
    pub fn new(preprocessor: Preprocessor, model: FittedEstimator) -> Self {
        ModelFile {
            format: MODEL_FORMAT.into(),
            version: MODEL_VERSION,
            preprocessor,
            model,
        }
    }

    pub fn to_writer<W: Write>(&self, w: W) -> Result<()> {
        serde_json::to_writer(w, self)?;
        Ok(())
    }

    pub fn from_reader<R: std::io::Read>(r: R) -> Result<Self> {
        let m: ModelFile = serde_json::from_reader(r)?;
        if m.format != MODEL_FORMAT {
            return Err(Error::ModelFormat(format!("unexpected format tag {:?}", m.format)));
        }
        if m.version != MODEL_VERSION {
            return Err(Error::ModelFormat(format!(
                "unsupported version {} (expected {MODEL_VERSION})",
                m.version
            )));
        }
        Ok(m)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let f = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(f);
        self.to_writer(&mut w)?;
        w.flush().map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let f = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_reader(BufReader::new(f))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::synthetic;
    use crate::estimator::EstimatorSpec;
    use crate::learners::{ForestParams, LearnerSpec};

    #[test]
    fn roundtrip_preserves_predictions() {
        let raw = synthetic::blobs(40, &[[0.0, 0.0], [2.0, 1.0], [0.0, 2.5]], 0.8, 3).to_raw();
        let pre = Preprocessor::fit(&raw).unwrap();
        let data = pre.transform(&raw).unwrap();
        let spec = EstimatorSpec::Pdc {
            learner: LearnerSpec::Forest(ForestParams {
                n_trees: 4,
                seed: 2,
                ..Default::default()
            }),
            config: Default::default(),
        };
        let file = ModelFile::new(pre, spec.fit(&data).unwrap());
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.json");
        file.save(&path).unwrap();
        let back = ModelFile::load(&path).unwrap();
        assert_eq!(back, file);
        assert_eq!(
            back.model.predict_proba(&data.x).unwrap(),
            file.model.predict_proba(&data.x).unwrap()
        );
    }

    #[test]
    fn rejects_foreign_documents() {
        let bad = r#"{"format":"other","version":1,"preprocessor":{},"model":{}}"#;
        assert!(ModelFile::from_reader(bad.as_bytes()).is_err());
    }

    #[test]
    fn f64_string_is_exact() {
        #[derive(Serialize, Deserialize)]
        struct W(#[serde(with = "f64_string")] f64);
        for v in [0.1 + 0.2, 1e-300, -3.5, 123456.789] {
            let s = serde_json::to_string(&W(v)).unwrap();
            assert_eq!(serde_json::from_str::<W>(&s).unwrap().0, v);
        }
    }
}
